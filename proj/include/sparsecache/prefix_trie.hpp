// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sparsecache/request.hpp"

namespace sparsecache {

/// Token trie over the cached prefixes, keyed by each entry's insertion index.
///
/// Every node records how many live entries pass through it and the most
/// recent such insertion index. Entries leave in insertion order (FIFO), so
/// removing one never invalidates `latest` of a node that stays alive.
class PrefixTrie {
 public:
  struct Match {
    std::int64_t key;
    Index depth;
  };

  PrefixTrie();

  /// `key` must exceed every key inserted before.
  void insert(std::span<const Token> tokens, std::int64_t key);
  /// Removes one entry with these tokens; entries must be erased oldest first.
  void erase(std::span<const Token> tokens);

  /// Entry sharing the longest common prefix with `tokens`, preferring the
  /// most recent on ties; nullopt when no entry shares even the first token.
  std::optional<Match> longest_match(std::span<const Token> tokens) const;

  std::size_t node_count() const noexcept { return nodes_.size() - free_.size(); }

 private:
  static constexpr std::uint32_t kNone = 0;

  // Children form a singly linked sibling list. A node has at most as many
  // children as there are live entries, so lookups stay short.
  struct Node {
    Token token = 0;
    std::uint32_t first_child = kNone;
    std::uint32_t next_sibling = kNone;
    std::int64_t count = 0;
    std::int64_t latest = -1;
  };

  std::uint32_t allocate(Token token);
  std::uint32_t child(std::uint32_t node, Token token) const;

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> free_;
};

}  // namespace sparsecache
