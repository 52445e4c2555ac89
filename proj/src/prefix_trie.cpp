// SPDX-License-Identifier: Apache-2.0
#include "sparsecache/prefix_trie.hpp"

#include <cassert>

namespace sparsecache {

PrefixTrie::PrefixTrie() { nodes_.emplace_back(); }

std::uint32_t PrefixTrie::allocate(Token token) {
  std::uint32_t id;
  if (!free_.empty()) {
    id = free_.back();
    free_.pop_back();
    nodes_[id] = Node{};
  } else {
    nodes_.emplace_back();
    id = static_cast<std::uint32_t>(nodes_.size() - 1);
  }
  nodes_[id].token = token;
  return id;
}

std::uint32_t PrefixTrie::child(std::uint32_t node, Token token) const {
  for (std::uint32_t c = nodes_[node].first_child; c != kNone; c = nodes_[c].next_sibling) {
    if (nodes_[c].token == token) return c;
  }
  return kNone;
}

void PrefixTrie::insert(std::span<const Token> tokens, std::int64_t key) {
  std::uint32_t node = 0;
  nodes_[0].count += 1;
  nodes_[0].latest = key;
  for (Token tok : tokens) {
    std::uint32_t next = child(node, tok);
    if (next == kNone) {
      next = allocate(tok);
      nodes_[next].next_sibling = nodes_[node].first_child;
      nodes_[node].first_child = next;
    }
    node = next;
    nodes_[node].count += 1;
    nodes_[node].latest = key;
  }
}

void PrefixTrie::erase(std::span<const Token> tokens) {
  std::uint32_t node = 0;
  nodes_[0].count -= 1;
  for (Token tok : tokens) {
    const std::uint32_t next = child(node, tok);
    assert(next != kNone);
    if (nodes_[next].count == 1) {
      // Only the erased entry passes below here: unlink and free the chain.
      std::uint32_t* link = &nodes_[node].first_child;
      while (*link != next) link = &nodes_[*link].next_sibling;
      *link = nodes_[next].next_sibling;
      for (std::uint32_t dead = next; dead != kNone;) {
        const std::uint32_t below = nodes_[dead].first_child;
        nodes_[dead] = Node{};
        free_.push_back(dead);
        dead = below;
      }
      return;
    }
    nodes_[next].count -= 1;
    node = next;
  }
}

std::optional<PrefixTrie::Match> PrefixTrie::longest_match(
    std::span<const Token> tokens) const {
  std::uint32_t node = 0;
  Index depth = 0;
  for (Token tok : tokens) {
    const std::uint32_t next = child(node, tok);
    if (next == kNone) break;
    node = next;
    ++depth;
  }
  if (depth == 0) return std::nullopt;
  return Match{nodes_[node].latest, depth};
}

}  // namespace sparsecache
