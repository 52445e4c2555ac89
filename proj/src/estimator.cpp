// SPDX-License-Identifier: Apache-2.0
#include "sparsecache/estimator.hpp"

#include <cmath>

namespace sparsecache {

namespace {

// Rescale once the global factor leaves [kLow, 1]. 1/kLow stays far from the
// double overflow threshold even after adding a unit weight per observation.
constexpr double kLow = 1e-150;

void check_decay(double decay, bool allow_one) {
  const bool ok = allow_one ? (decay > 0.0 && decay <= 1.0)
                            : (decay > 0.0 && decay < 1.0);
  if (!ok) {
    throw Error(ErrorKind::kBadDecay,
                allow_one ? "decay must lie in (0, 1]" : "decay must lie in (0, 1)");
  }
}

}  // namespace

DepthEstimator::DepthEstimator(Index n_positions, double decay)
    : n_(n_positions), decay_(decay) {
  if (n_ < 1) throw Error(ErrorKind::kBadLength, "estimator needs N >= 1");
  check_decay(decay, true);
  raw_ = Eigen::VectorXd::Zero(n_);
}

DepthEstimator DepthEstimator::from_weights(Index n_positions, double decay,
                                            const Eigen::VectorXd& weights,
                                            std::int64_t count) {
  DepthEstimator est(n_positions, decay);
  if (weights.size() != n_positions) {
    throw Error(ErrorKind::kLengthMismatch, "weights do not cover N depths");
  }
  if ((weights.array() < 0.0).any() || !weights.allFinite() || count < 0) {
    throw Error(ErrorKind::kBadParams, "weights must be finite and non-negative");
  }
  est.raw_ = weights;
  est.total_ = weights.sum();
  est.count_ = count;
  return est;
}

void DepthEstimator::observe(Index depth) {
  if (depth < 1) {
    throw Error(ErrorKind::kDepthOutOfRange,
                "observed depth " + std::to_string(depth) + " < 1");
  }
  if (depth > n_) {
    depth = n_;
    ++clamped_;
  }
  scale_ *= decay_;
  if (scale_ < kLow) renormalize();
  raw_(depth - 1) += 1.0 / scale_;
  total_ = total_ * decay_ + 1.0;
  ++count_;
}

void DepthEstimator::renormalize() {
  raw_ *= scale_;
  scale_ = 1.0;
}

OverlapHistogram DepthEstimator::snapshot() const {
  if (count_ == 0) throw Error(ErrorKind::kNoSamples, "no observations yet");
  return OverlapHistogram::from_counts(raw_);
}

double variance_term(double decay, std::int64_t sample_count, Index n_positions) {
  check_decay(decay, false);
  if (sample_count < 1 || n_positions < 1) {
    throw Error(ErrorKind::kBadParams, "need t >= 1 and N >= 1");
  }
  const double gt = std::pow(decay, static_cast<double>(sample_count));
  const double sum_sq =
      (1.0 - decay) / (1.0 + decay) * (1.0 + gt) / (1.0 - gt);
  return std::sqrt(static_cast<double>(n_positions) * sum_sq);
}

double bias_bound(double drift_per_step, double decay) {
  check_decay(decay, false);
  if (!(drift_per_step >= 0.0)) {
    throw Error(ErrorKind::kBadParams, "drift must be >= 0");
  }
  return drift_per_step * decay / (1.0 - decay);
}

double weighted_bias(std::span<const OverlapHistogram> path, double decay) {
  check_decay(decay, false);
  if (path.empty()) throw Error(ErrorKind::kNoSamples, "empty distribution path");
  const auto t = static_cast<std::int64_t>(path.size());
  const OverlapHistogram& current = path.back();
  const double norm = (1.0 - decay) / (1.0 - std::pow(decay, static_cast<double>(t)));
  double bias = 0.0;
  double weight = norm;  // s = t
  for (std::int64_t s = t - 1; s >= 0; --s) {
    bias += weight * tv_distance(path[static_cast<std::size_t>(s)], current);
    weight *= decay;
  }
  return bias;
}

}  // namespace sparsecache
