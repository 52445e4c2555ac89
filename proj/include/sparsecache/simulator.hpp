// SPDX-License-Identifier: Apache-2.0
//
// Trace replay through a last-K prefix cache whose entries store recurrent
// state only at sparse checkpoints.
//
// For each request the simulator finds the cached entry with the longest
// common prefix (overlap depth t), resumes from the deepest checkpoint
// l <= t and charges r = t - l recomputed tokens. The request is then
// admitted as a new entry with a checkpoint schedule planned from the
// current overlap-depth estimate, and the oldest entry beyond K is evicted.
#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sparsecache/estimator.hpp"
#include "sparsecache/placement.hpp"
#include "sparsecache/prefix_trie.hpp"
#include "sparsecache/request.hpp"

namespace sparsecache {

struct StateCostModel {
  std::int64_t recurrent_bytes_per_checkpoint = 0;
  std::int64_t kv_bytes_per_token = 0;
};

struct CacheEntry {
  std::vector<Token> tokens;  // empty for depth-mode entries
  Index length = 0;
  CheckpointSet checkpoints;
  std::int64_t insertion_index = 0;
};

/// FIFO cache holding the K most recently inserted entries.
class PrefixCache {
 public:
  struct Hit {
    const CacheEntry* entry;
    Index depth;
  };

  explicit PrefixCache(Index capacity);

  /// Token mode: entry with the longest common prefix, most recent on ties.
  /// Depth mode: the most recent entry at least as long as the declared
  /// depth, else the most recent entry with the depth clamped to its length.
  std::optional<Hit> match_longest_prefix(const Request& request) const;

  /// Admits an entry, evicting the oldest beyond capacity. No-op when K = 0.
  void insert(CacheEntry entry);

  Index capacity() const noexcept { return capacity_; }
  Index size() const noexcept { return static_cast<Index>(entries_.size()); }
  const std::deque<CacheEntry>& entries() const noexcept { return entries_; }
  std::int64_t resident_slots() const noexcept { return resident_slots_; }
  std::int64_t resident_tokens() const noexcept { return resident_tokens_; }

 private:
  const CacheEntry* find(std::int64_t insertion_index) const;

  Index capacity_;
  std::deque<CacheEntry> entries_;
  PrefixTrie trie_;
  std::int64_t next_index_ = 0;
  std::int64_t resident_slots_ = 0;
  std::int64_t resident_tokens_ = 0;
};

struct SimConfig {
  Index capacity = 50;
  PlannerConfig planner{Strategy::kDp, 1, 64, false, true};
  double decay = 0.99;
  /// Re-plan from a fresh histogram snapshot every this many hits.
  Index refresh_every = 10;
  StateCostModel cost_model{};
  /// Recorded in reports; the replay itself draws no random numbers.
  std::uint64_t seed = 0;
  /// Depth range tracked by the estimator; 0 uses the longest request.
  Index estimator_positions = 0;
};

struct RequestRecord {
  std::int64_t id = 0;
  std::string group;
  Index length = 0;
  Index overlap_depth = 0;
  Index reusable_depth = 0;
  Index recompute = 0;
  Index new_suffix = 0;
  bool hit = false;
  /// Checkpoints stored for this request's own cache entry.
  Index slots = 0;
};

struct SimSummary {
  std::int64_t requests = 0;
  std::int64_t hits = 0;
  double hit_rate = 0.0;
  std::int64_t total_overlap = 0;
  std::int64_t total_recompute = 0;
  std::int64_t total_new_tokens = 0;
  /// 1 - sum r / sum t over hits; misses are excluded from both sums.
  double savings = 0.0;
  /// sum t / sum r; +inf when every hit resumed exactly.
  double reduction = 1.0;
  std::int64_t inserted_entries = 0;
  std::int64_t inserted_slots = 0;
  double mean_slots_per_entry = 0.0;
  std::int64_t peak_resident_slots = 0;
  std::int64_t peak_resident_bytes = 0;
  std::int64_t clamped_depths = 0;
  std::int64_t refreshes = 0;
};

struct SimMetrics {
  std::vector<RequestRecord> records;
  SimSummary summary;
};

/// Stateful replay; serve() processes one request at a time.
class Simulator {
 public:
  Simulator(const SimConfig& config, Index estimator_positions);

  RequestRecord serve(const Request& request);

  const PrefixCache& cache() const noexcept { return cache_; }
  const DepthEstimator& estimator() const noexcept { return estimator_; }
  /// Histogram the planner currently uses; empty before the first hit.
  const std::optional<OverlapHistogram>& planning_snapshot() const noexcept {
    return snapshot_;
  }
  SimSummary summary() const;

 private:
  const CheckpointSet& schedule_for(Index length);

  SimConfig config_;
  PrefixCache cache_;
  DepthEstimator estimator_;
  std::optional<OverlapHistogram> snapshot_;
  std::map<Index, CheckpointSet> schedules_;
  Index hits_since_refresh_ = 0;
  SimSummary totals_;
};

/// Replays a trace sorted by arrival time. Deterministic in its inputs.
SimMetrics run_simulation(std::span<const Request> requests, const SimConfig& config);

}  // namespace sparsecache
