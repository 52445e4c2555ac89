// SPDX-License-Identifier: Apache-2.0
//
// Online estimation of the overlap-depth distribution.
//
// DepthEstimator keeps exponentially decayed per-depth weights: after t
// observations T_1..T_t the weight of sample s is gamma^(t-s), so the
// normalized snapshot is
//
//   p_hat = (1 - gamma) / (1 - gamma^t) * sum_s gamma^(t-s) e_{T_s}
//
// and gamma = 1 reduces to the plain empirical histogram.
#pragma once

#include <cstdint>
#include <span>

#include "sparsecache/distribution.hpp"

namespace sparsecache {

class DepthEstimator {
 public:
  DepthEstimator(Index n_positions, double decay);

  /// Restores a persisted state; `weights` are the decayed per-depth weights.
  static DepthEstimator from_weights(Index n_positions, double decay,
                                     const Eigen::VectorXd& weights,
                                     std::int64_t count);

  /// O(1) amortized: decay is folded into a global scale factor that is
  /// renormalized before it can underflow. Depths beyond N are clamped to N.
  void observe(Index depth);

  /// Normalized estimate. Throws NoSamples before the first observation.
  OverlapHistogram snapshot() const;

  Index n_positions() const noexcept { return n_; }
  double decay() const noexcept { return decay_; }
  std::int64_t sample_count() const noexcept { return count_; }
  std::int64_t clamped_count() const noexcept { return clamped_; }
  /// Sum of decayed weights: (1 - gamma^t) / (1 - gamma), or t for gamma = 1.
  double weight_total() const noexcept { return total_; }
  /// Decayed per-depth weights (unnormalized).
  Eigen::VectorXd weights() const { return raw_ * scale_; }

 private:
  void renormalize();

  Index n_;
  double decay_;
  Eigen::VectorXd raw_;
  double scale_ = 1.0;
  double total_ = 0.0;
  std::int64_t count_ = 0;
  std::int64_t clamped_ = 0;
};

/// Upper bound on the stochastic part of E||p_hat - p_bar||_1:
/// sqrt(N (1-gamma)/(1+gamma) (1+gamma^t)/(1-gamma^t)).
double variance_term(double decay, std::int64_t sample_count, Index n_positions);

/// Bias bound Delta * gamma / (1 - gamma) under per-step L1 drift <= Delta.
double bias_bound(double drift_per_step, double decay);

/// Exact weighted bias sum_s w_{t,s} ||p_s - p_t||_1 for a known path
/// p_1..p_t, with w_{t,s} = (1-gamma) gamma^(t-s) / (1-gamma^t).
double weighted_bias(std::span<const OverlapHistogram> path, double decay);

}  // namespace sparsecache
