// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "sparsecache/simulator.hpp"

namespace sparsecache {

struct SweepRow {
  Strategy strategy = Strategy::kDp;
  Index budget = 0;
  /// Mean checkpoints stored per admitted entry.
  double slots = 0.0;
  /// Mean recomputed tokens per hit.
  double expected_recompute = 0.0;
  double savings = 0.0;
  double reduction = 1.0;
  std::int64_t bytes = 0;
  /// Not dominated in (fewer slots, higher savings) by any other row.
  bool pareto = false;
  SimSummary summary{};
};

/// One simulation per (strategy, budget) cell. Cells run on up to `threads`
/// workers (0 = hardware concurrency); rows come back sorted by strategy
/// name, then budget.
std::vector<SweepRow> sweep(std::span<const Request> requests,
                            const SimConfig& base_config,
                            std::span<const Index> budgets,
                            std::span<const Strategy> strategies,
                            unsigned threads = 0);

/// Marks non-dominated rows in place.
void mark_pareto(std::vector<SweepRow>& rows);

}  // namespace sparsecache
