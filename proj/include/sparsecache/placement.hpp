// SPDX-License-Identifier: Apache-2.0
//
// Checkpoint placement along a cached prefix of N tokens.
//
// A checkpoint at position c stores the exact recurrent state after token c.
// A request that overlaps the prefix to depth t resumes from the deepest
// checkpoint at or below t and replays the remaining t - l tokens.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparsecache/distribution.hpp"

namespace sparsecache {

class CheckpointSet {
 public:
  CheckpointSet() = default;

  /// Validates that positions are strictly increasing within [1, n].
  CheckpointSet(Index n_positions, std::vector<Index> positions);

  static CheckpointSet empty(Index n_positions) { return {n_positions, {}}; }

  Index n_positions() const noexcept { return n_; }
  const std::vector<Index>& positions() const noexcept { return positions_; }
  Index size() const noexcept { return static_cast<Index>(positions_.size()); }
  bool is_empty() const noexcept { return positions_.empty(); }

  /// g_0..g_M with sentinels c_0 = 0 and c_{M+1} = N + 1; sums to N + 1.
  std::vector<Index> gaps() const;

  friend bool operator==(const CheckpointSet&, const CheckpointSet&) = default;

 private:
  Index n_ = 0;
  std::vector<Index> positions_;
};

struct PlacementCost {
  double expected_recompute = 0.0;
  Index worst_case_recompute = 0;
  double no_cache = 0.0;
  double savings = 0.0;
  double reduction_factor = 1.0;  // +inf when expected_recompute == 0
};

/// Deepest checkpoint at or below `depth`, or 0.
Index reusable_depth(const CheckpointSet& c, Index depth);

PlacementCost expected_cost(const OverlapHistogram& h, const CheckpointSet& c);

/// E[r] alone, in O(N + M).
double expected_recompute(const OverlapHistogram& h, const CheckpointSet& c);

// Closed-form schedules.
CheckpointSet balanced_placement(Index n_positions, Index budget);
double uniform_optimal_cost(Index n_positions, Index budget);
Index worst_case_optimal(Index n_positions, Index budget);
CheckpointSet block_placement(Index n_positions, Index block);
CheckpointSet sqrt_placement(Index n_positions);
CheckpointSet logarithmic_placement(Index n_positions, Index budget);

/// Distribution-aware optimum of E_h[r] over sets of at most `budget`
/// checkpoints, in O(N * budget) with a monotone convex-hull trick.
///
/// With `grid` = B, positions are restricted to multiples of B. Checkpoints
/// that would serve no probability mass are omitted, so the result can hold
/// fewer than `budget` positions.
CheckpointSet dp_optimal(const OverlapHistogram& h, Index budget,
                         std::optional<Index> grid = std::nullopt);

/// The same recurrence evaluated by direct minimization in O(N^2 * budget).
/// Kept as a reference for testing dp_optimal.
CheckpointSet dp_optimal_naive(const OverlapHistogram& h, Index budget);

/// Floors every position to a multiple of `block`, dropping zeros and
/// merging duplicates. Never moves a checkpoint deeper.
CheckpointSet clip_to_blocks(const CheckpointSet& c, Index block);

enum class Strategy { kBalanced, kBlock, kSqrt, kLogarithmic, kDp };

Strategy parse_strategy(const std::string& name);
std::string to_string(Strategy strategy);

struct PlannerConfig {
  Strategy strategy = Strategy::kDp;
  Index budget = 1;
  Index block = 128;
  /// Block-restricted DP instead of solving unconstrained and clipping.
  bool grid_mode = false;
  /// Clip the planned positions to block boundaries.
  bool clip = true;
};

/// Plans a schedule for a prefix of `n_positions` tokens. `h` is only
/// consulted by the dp strategy and must then cover exactly n_positions
/// depths; a null `h` is a cold start and falls back to balanced spacing.
CheckpointSet plan(const PlannerConfig& config, Index n_positions,
                   const OverlapHistogram* h);

}  // namespace sparsecache
