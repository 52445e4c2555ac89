// SPDX-License-Identifier: Apache-2.0
#include "sparsecache/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace sparsecache {

void mark_pareto(std::vector<SweepRow>& rows) {
  for (auto& row : rows) {
    row.pareto = std::none_of(rows.begin(), rows.end(), [&](const SweepRow& other) {
      const bool no_worse = other.slots <= row.slots && other.savings >= row.savings;
      const bool better = other.slots < row.slots || other.savings > row.savings;
      return no_worse && better;
    });
  }
}

std::vector<SweepRow> sweep(std::span<const Request> requests,
                            const SimConfig& base_config,
                            std::span<const Index> budgets,
                            std::span<const Strategy> strategies,
                            unsigned threads) {
  if (budgets.empty() || strategies.empty()) {
    throw Error(ErrorKind::kBadParams, "sweep needs budgets and strategies");
  }
  std::vector<SweepRow> rows;
  for (Strategy s : strategies) {
    for (Index m : budgets) {
      SweepRow row;
      row.strategy = s;
      row.budget = m;
      rows.push_back(row);
    }
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      try {
        SimConfig config = base_config;
        config.planner.strategy = rows[i].strategy;
        config.planner.budget = rows[i].budget;
        const SimSummary s = run_simulation(requests, config).summary;
        SweepRow& row = rows[i];
        row.summary = s;
        row.slots = s.mean_slots_per_entry;
        row.expected_recompute =
            s.hits ? static_cast<double>(s.total_recompute) / s.hits : 0.0;
        row.savings = s.savings;
        row.reduction = s.reduction;
        row.bytes = s.peak_resident_bytes;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  unsigned n_threads = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(rows.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    const auto sa = to_string(a.strategy), sb = to_string(b.strategy);
    if (sa != sb) return sa < sb;
    return a.budget < b.budget;
  });
  mark_pareto(rows);
  return rows;
}

}  // namespace sparsecache
