// SPDX-License-Identifier: Apache-2.0
#include "sparsecache/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sparsecache {

CheckpointSet::CheckpointSet(Index n_positions, std::vector<Index> positions)
    : n_(n_positions), positions_(std::move(positions)) {
  if (n_ < 1) throw Error(ErrorKind::kBadLength, "prefix length must be >= 1");
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    const Index c = positions_[i];
    if (c < 1 || c > n_) {
      throw Error(ErrorKind::kBadParams, "checkpoint " + std::to_string(c) +
                                             " outside [1, " +
                                             std::to_string(n_) + "]");
    }
    if (i > 0 && positions_[i - 1] >= c) {
      throw Error(ErrorKind::kBadParams,
                  "checkpoint positions must be strictly increasing");
    }
  }
}

std::vector<Index> CheckpointSet::gaps() const {
  std::vector<Index> g;
  g.reserve(positions_.size() + 1);
  Index prev = 0;
  for (Index c : positions_) {
    g.push_back(c - prev);
    prev = c;
  }
  g.push_back(n_ + 1 - prev);
  return g;
}

Index reusable_depth(const CheckpointSet& c, Index depth) {
  if (depth < 1 || depth > c.n_positions()) {
    throw Error(ErrorKind::kDepthOutOfRange,
                "depth " + std::to_string(depth) + " outside [1, " +
                    std::to_string(c.n_positions()) + "]");
  }
  const auto& pos = c.positions();
  auto it = std::upper_bound(pos.begin(), pos.end(), depth);
  return it == pos.begin() ? 0 : *std::prev(it);
}

namespace {

void check_lengths(const OverlapHistogram& h, const CheckpointSet& c) {
  if (h.size() != c.n_positions()) {
    throw Error(ErrorKind::kLengthMismatch,
                "histogram covers " + std::to_string(h.size()) +
                    " depths but checkpoints span " +
                    std::to_string(c.n_positions()));
  }
}

void check_budget(Index n, Index budget) {
  if (budget < 0) throw Error(ErrorKind::kBadParams, "budget must be >= 0");
  if (budget > n) {
    throw Error(ErrorKind::kBudgetTooLarge,
                "budget " + std::to_string(budget) + " exceeds prefix length " +
                    std::to_string(n));
  }
}

// w(s, j) = sum_{t=s}^{j} p_t (t - s), the cost of serving depths s..j from
// a checkpoint at s (s = 0 means "no checkpoint").
double segment_cost(const OverlapHistogram& h, Index s, Index j) {
  const Index lo = std::max<Index>(s, 1);
  if (j < lo) return 0.0;
  const double moment = h.prefix_moment(j) - h.prefix_moment(lo - 1);
  const double mass = h.prefix_mass(j) - h.prefix_mass(lo - 1);
  return moment - static_cast<double>(s) * mass;
}

bool strictly_less(double a, double b) {
  return a < b - 1e-12 * (1.0 + std::abs(a) + std::abs(b));
}

// Drops checkpoints whose coverage interval [c_i, c_{i+1}) carries no mass;
// removing them leaves the expected cost unchanged.
std::vector<Index> drop_idle(const OverlapHistogram& h,
                             std::vector<Index> positions) {
  std::vector<Index> kept;
  kept.reserve(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const Index end =
        i + 1 < positions.size() ? positions[i + 1] - 1 : h.size();
    bool serves = false;
    for (Index t = positions[i]; t <= end && !serves; ++t) serves = h.p(t) > 0.0;
    if (serves) kept.push_back(positions[i]);
  }
  return kept;
}

std::vector<Index> backtrack(const std::vector<std::vector<Index>>& choice,
                             Index budget, Index n) {
  std::vector<Index> positions;
  Index j = n;
  for (Index m = budget; m >= 1 && j >= 1; --m) {
    const Index s = choice[m][j];
    if (s == 0) continue;
    positions.push_back(s);
    j = s - 1;
  }
  std::reverse(positions.begin(), positions.end());
  return positions;
}

// Lower envelope of lines y = slope * x + intercept with strictly decreasing
// slopes, queried at non-decreasing x.
class MonotoneHull {
 public:
  struct Line {
    double slope;
    double intercept;
    Index id;
    double at(double x) const { return slope * x + intercept; }
  };

  void reserve(std::size_t n) { lines_.reserve(n); }
  bool empty() const { return lines_.empty(); }

  void add(const Line& line) {
    while (lines_.size() >= 2 &&
           redundant(lines_[lines_.size() - 2], lines_.back(), line)) {
      lines_.pop_back();
    }
    if (!lines_.empty()) head_ = std::min(head_, lines_.size() - 1);
    lines_.push_back(line);
  }

  /// Minimum at x. Among lines tied within rounding, the earliest (smallest
  /// id) wins, because the pointer only advances on strict improvement.
  const Line& query(double x) {
    while (head_ + 1 < lines_.size() &&
           strictly_less(lines_[head_ + 1].at(x), lines_[head_].at(x))) {
      ++head_;
    }
    return lines_[head_];
  }

 private:
  // `mid` never lies strictly below the envelope of `lo` and `hi` when
  // hi overtakes lo no later than mid does.
  static bool redundant(const Line& lo, const Line& mid, const Line& hi) {
    const long double lhs =
        static_cast<long double>(hi.intercept - lo.intercept) *
        (lo.slope - mid.slope);
    const long double rhs =
        static_cast<long double>(mid.intercept - lo.intercept) *
        (lo.slope - hi.slope);
    return lhs < rhs;
  }

  std::vector<Line> lines_;
  std::size_t head_ = 0;
};

}  // namespace

double expected_recompute(const OverlapHistogram& h, const CheckpointSet& c) {
  check_lengths(h, c);
  double total = 0.0;
  Index anchor = 0;
  for (Index pos : c.positions()) {
    total += segment_cost(h, anchor, pos - 1);
    anchor = pos;
  }
  total += segment_cost(h, anchor, h.size());
  return std::max(0.0, total);
}

PlacementCost expected_cost(const OverlapHistogram& h, const CheckpointSet& c) {
  PlacementCost cost;
  cost.expected_recompute = expected_recompute(h, c);
  const auto gaps = c.gaps();
  cost.worst_case_recompute = *std::max_element(gaps.begin(), gaps.end()) - 1;
  cost.no_cache = no_cache_baseline(h);
  cost.expected_recompute = std::min(cost.expected_recompute, cost.no_cache);
  cost.savings = std::clamp(1.0 - cost.expected_recompute / cost.no_cache, 0.0, 1.0);
  cost.reduction_factor = cost.expected_recompute == 0.0
                              ? std::numeric_limits<double>::infinity()
                              : cost.no_cache / cost.expected_recompute;
  return cost;
}

CheckpointSet balanced_placement(Index n_positions, Index budget) {
  check_budget(n_positions, budget);
  std::vector<Index> pos;
  pos.reserve(static_cast<std::size_t>(budget));
  for (Index i = 1; i <= budget; ++i) {
    const Index c = i * (n_positions + 1) / (budget + 1);
    if (c >= 1) pos.push_back(c);
  }
  return {n_positions, std::move(pos)};
}

double uniform_optimal_cost(Index n_positions, Index budget) {
  check_budget(n_positions, budget);
  const std::int64_t k = budget + 1;
  const std::int64_t q = (n_positions + 1) / k;
  const std::int64_t rho = (n_positions + 1) % k;
  const std::int64_t twice_sum = (k - rho) * q * (q - 1) + rho * q * (q + 1);
  return static_cast<double>(twice_sum) / 2.0 / static_cast<double>(n_positions);
}

Index worst_case_optimal(Index n_positions, Index budget) {
  check_budget(n_positions, budget);
  return (n_positions + 1 + budget) / (budget + 1) - 1;
}

CheckpointSet block_placement(Index n_positions, Index block) {
  if (block < 1) throw Error(ErrorKind::kBadParams, "block size must be >= 1");
  std::vector<Index> pos;
  for (Index c = block; c <= n_positions; c += block) pos.push_back(c);
  return {n_positions, std::move(pos)};
}

CheckpointSet sqrt_placement(Index n_positions) {
  if (n_positions < 1) throw Error(ErrorKind::kBadLength, "N must be >= 1");
  auto step = static_cast<Index>(std::sqrt(static_cast<double>(n_positions)));
  while (step * step > n_positions) --step;
  while ((step + 1) * (step + 1) <= n_positions) ++step;
  return block_placement(n_positions, step);
}

CheckpointSet logarithmic_placement(Index n_positions, Index budget) {
  check_budget(n_positions, budget);
  std::vector<Index> pos;
  // Gaps double along the prefix: c_i = round(N (2^i - 1) / (2^M - 1)).
  // ldexp keeps the ratio exact in floating point up to M ~ 1000.
  const long double denom = std::ldexp(1.0L, static_cast<int>(budget)) - 1.0L;
  for (Index i = 1; i <= budget; ++i) {
    const long double ratio =
        (std::ldexp(1.0L, static_cast<int>(i)) - 1.0L) / denom;
    const auto c = std::clamp<Index>(
        static_cast<Index>(std::llround(ratio * n_positions)), 1, n_positions);
    if (pos.empty() || c > pos.back()) pos.push_back(c);
  }
  return {n_positions, std::move(pos)};
}

CheckpointSet dp_optimal(const OverlapHistogram& h, Index budget,
                         std::optional<Index> grid) {
  const Index n = h.size();
  check_budget(n, budget);
  if (grid && *grid < 1) throw Error(ErrorKind::kBadParams, "grid must be >= 1");
  const Index stride = grid.value_or(1);

  // dp[m][j] = min cost of depths 1..j with at most m checkpoints in 1..j.
  //   dp[0][j] = T_j
  //   dp[m][j] = T_j + min_s (-s * P_j + dp[m-1][s-1] - T_{s-1} + s P_{s-1})
  Eigen::VectorXd prev = h.prefix_moment();
  Eigen::VectorXd cur(n + 1);
  std::vector<std::vector<Index>> choice(
      static_cast<std::size_t>(budget) + 1);

  for (Index m = 1; m <= budget; ++m) {
    auto& arg = choice[m];
    arg.assign(static_cast<std::size_t>(n) + 1, 0);
    MonotoneHull hull;
    hull.reserve(static_cast<std::size_t>(n / stride) + 1);
    cur(0) = 0.0;
    for (Index j = 1; j <= n; ++j) {
      if (j % stride == 0) {
        const double s = static_cast<double>(j);
        hull.add({-s,
                  prev(j - 1) - h.prefix_moment(j - 1) + s * h.prefix_mass(j - 1),
                  j});
      }
      if (hull.empty()) {
        cur(j) = prev(j);
        continue;
      }
      const auto& best = hull.query(h.prefix_mass(j));
      cur(j) = h.prefix_moment(j) + best.at(h.prefix_mass(j));
      arg[j] = best.id;
    }
    std::swap(prev, cur);
  }
  return {n, drop_idle(h, backtrack(choice, budget, n))};
}

CheckpointSet dp_optimal_naive(const OverlapHistogram& h, Index budget) {
  const Index n = h.size();
  check_budget(n, budget);
  std::vector<double> prev(static_cast<std::size_t>(n) + 1);
  for (Index j = 0; j <= n; ++j) prev[j] = segment_cost(h, 0, j);
  std::vector<double> cur(prev.size());
  std::vector<std::vector<Index>> choice(static_cast<std::size_t>(budget) + 1);

  for (Index m = 1; m <= budget; ++m) {
    auto& arg = choice[m];
    arg.assign(static_cast<std::size_t>(n) + 1, 0);
    cur[0] = 0.0;
    for (Index j = 1; j <= n; ++j) {
      double best = std::numeric_limits<double>::infinity();
      for (Index s = 1; s <= j; ++s) {
        const double v = prev[s - 1] + segment_cost(h, s, j);
        if (s == 1 || strictly_less(v, best)) {
          best = v;
          arg[j] = s;
        }
      }
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  return {n, drop_idle(h, backtrack(choice, budget, n))};
}

CheckpointSet clip_to_blocks(const CheckpointSet& c, Index block) {
  if (block < 1) throw Error(ErrorKind::kBadParams, "block size must be >= 1");
  std::vector<Index> pos;
  pos.reserve(c.positions().size());
  for (Index p : c.positions()) {
    const Index floored = p / block * block;
    if (floored >= 1 && (pos.empty() || floored > pos.back())) {
      pos.push_back(floored);
    }
  }
  return {c.n_positions(), std::move(pos)};
}

Strategy parse_strategy(const std::string& name) {
  if (name == "balanced") return Strategy::kBalanced;
  if (name == "block") return Strategy::kBlock;
  if (name == "sqrt") return Strategy::kSqrt;
  if (name == "logarithmic" || name == "log") return Strategy::kLogarithmic;
  if (name == "dp") return Strategy::kDp;
  throw Error(ErrorKind::kBadParams, "unknown strategy '" + name + "'");
}

std::string to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::kBalanced: return "balanced";
    case Strategy::kBlock: return "block";
    case Strategy::kSqrt: return "sqrt";
    case Strategy::kLogarithmic: return "logarithmic";
    case Strategy::kDp: return "dp";
  }
  return "unknown";
}

CheckpointSet plan(const PlannerConfig& config, Index n_positions,
                   const OverlapHistogram* h) {
  if (config.block < 1) throw Error(ErrorKind::kBadParams, "block size must be >= 1");
  CheckpointSet raw;
  switch (config.strategy) {
    case Strategy::kBalanced:
      raw = balanced_placement(n_positions, config.budget);
      break;
    case Strategy::kBlock:
      return block_placement(n_positions, config.block);
    case Strategy::kSqrt:
      raw = sqrt_placement(n_positions);
      break;
    case Strategy::kLogarithmic:
      raw = logarithmic_placement(n_positions, config.budget);
      break;
    case Strategy::kDp:
      if (h == nullptr) {
        raw = balanced_placement(n_positions, config.budget);
        break;
      }
      if (h->size() != n_positions) {
        throw Error(ErrorKind::kLengthMismatch,
                    "planning histogram does not match prefix length");
      }
      if (config.grid_mode) return dp_optimal(*h, config.budget, config.block);
      raw = dp_optimal(*h, config.budget);
      break;
  }
  return config.clip ? clip_to_blocks(raw, config.block) : raw;
}

}  // namespace sparsecache
