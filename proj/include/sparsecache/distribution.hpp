// SPDX-License-Identifier: Apache-2.0
//
// Overlap-depth distributions over token depths 1..N.
//
// A histogram stores the probability mass p_t densely together with the two
// prefix sums the placement solvers need in O(1):
//
//   P_j = sum_{t <= j} p_t        T_j = sum_{t <= j} t * p_t
//
// Both prefix arrays carry a leading zero so that P_0 = T_0 = 0 and depth j
// lives at index j.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sparsecache/error.hpp"

namespace sparsecache {

using Index = Eigen::Index;

template <typename Scalar>
class BasicOverlapHistogram {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  /// Normalizes a non-negative count vector (entry i is depth i + 1).
  template <typename Derived>
  static BasicOverlapHistogram from_counts(
      const Eigen::MatrixBase<Derived>& counts) {
    if (counts.size() == 0) {
      throw Error(ErrorKind::kBadLength, "histogram needs at least one depth");
    }
    if ((counts.array() < Scalar(0)).any() || !counts.allFinite()) {
      throw Error(ErrorKind::kBadParams,
                  "histogram counts must be finite and non-negative");
    }
    const Scalar total = counts.sum();
    if (!(total > Scalar(0))) {
      throw Error(ErrorKind::kAllZero, "every count is zero");
    }
    BasicOverlapHistogram h;
    h.mass_ = counts.template cast<Scalar>() / total;
    h.rebuild_prefix_sums();
    return h;
  }

  Index size() const noexcept { return mass_.size(); }

  /// p_1..p_N stored at indices 0..N-1.
  const Vector& mass() const noexcept { return mass_; }
  /// P_0..P_N.
  const Vector& prefix_mass() const noexcept { return prefix_mass_; }
  /// T_0..T_N.
  const Vector& prefix_moment() const noexcept { return prefix_moment_; }

  Scalar p(Index depth) const { return mass_(depth - 1); }
  Scalar prefix_mass(Index j) const { return prefix_mass_(j); }
  Scalar prefix_moment(Index j) const { return prefix_moment_(j); }

  /// Restriction to depths 1..length, renormalized. Throws AllZero when the
  /// histogram has no mass there.
  BasicOverlapHistogram truncated(Index length) const {
    if (length < 1 || length > size()) {
      throw Error(ErrorKind::kBadLength, "truncation length out of range");
    }
    if (length == size()) return *this;
    return from_counts(mass_.head(length));
  }

 private:
  void rebuild_prefix_sums() {
    const Index n = mass_.size();
    prefix_mass_.resize(n + 1);
    prefix_moment_.resize(n + 1);
    prefix_mass_(0) = Scalar(0);
    prefix_moment_(0) = Scalar(0);
    long double mass_acc = 0.0L;
    long double moment_acc = 0.0L;
    for (Index t = 1; t <= n; ++t) {
      mass_acc += static_cast<long double>(mass_(t - 1));
      moment_acc += static_cast<long double>(t) * mass_(t - 1);
      prefix_mass_(t) = static_cast<Scalar>(mass_acc);
      prefix_moment_(t) = static_cast<Scalar>(moment_acc);
    }
  }

  Vector mass_;
  Vector prefix_mass_;
  Vector prefix_moment_;
};

using OverlapHistogram = BasicOverlapHistogram<double>;

template <typename Derived>
OverlapHistogram histogram_from_counts(const Eigen::MatrixBase<Derived>& counts) {
  return OverlapHistogram::from_counts(counts.template cast<double>());
}

inline OverlapHistogram histogram_from_counts(std::span<const double> counts) {
  return OverlapHistogram::from_counts(Eigen::Map<const Eigen::VectorXd>(
      counts.data(), static_cast<Index>(counts.size())));
}

/// R_nc = E[T], the recurrent work of a request when nothing is cached.
template <typename Scalar>
Scalar no_cache_baseline(const BasicOverlapHistogram<Scalar>& h) {
  return h.prefix_moment(h.size());
}

/// L1 norm ||p - q||_1 (twice the total-variation distance).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar l1_distance(const Eigen::MatrixBase<DerivedA>& p,
                                      const Eigen::MatrixBase<DerivedB>& q) {
  if (p.size() != q.size()) {
    throw Error(ErrorKind::kLengthMismatch, "distributions differ in length");
  }
  return (p - q).template lpNorm<1>();
}

/// Distance used by every misspecification bound: the L1 norm, not halved.
template <typename Scalar>
Scalar tv_distance(const BasicOverlapHistogram<Scalar>& p,
                   const BasicOverlapHistogram<Scalar>& q) {
  return l1_distance(p.mass(), q.mass());
}

/// High-probability bound on ||p_hat - p||_1 for an empirical histogram built
/// from n i.i.d. samples over N depths: sqrt(N/n) + sqrt(2 ln(1/delta) / n).
double plugin_bound(std::int64_t n_samples, Index n_positions, double delta);

enum class Shape { kUniform, kEndSpike, kMultimodal, kHeadHeavy };

Shape parse_shape(const std::string& name);
std::string to_string(Shape shape);

struct SynthParams {
  double spike_mass = 0.9;
  Index spike_width = 0;  // 0 selects max(1, N / 50)
  double head_mass = 0.8;
  Index head_width = 0;   // 0 selects max(1, N / 10)
  int n_modes = 3;
  double mode_width = 0.05;  // standard deviation as a fraction of N
};

/// Synthetic overlap shapes resembling the workloads that motivate sparse
/// checkpointing: a spike at full document length, a wide multimodal spread,
/// and mass concentrated at short prefixes. Deterministic in `seed`.
OverlapHistogram synth_distribution(Shape shape, Index n_positions,
                                    const SynthParams& params,
                                    std::uint64_t seed);

/// Draws a depth in 1..N by inverse-CDF lookup on a uniform variate u in [0,1).
Index sample_depth(const OverlapHistogram& h, double u);

}  // namespace sparsecache
