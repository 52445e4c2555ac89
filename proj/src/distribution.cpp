// SPDX-License-Identifier: Apache-2.0
#include "sparsecache/distribution.hpp"

#include <algorithm>
#include <cmath>

#include "sparsecache/random.hpp"

namespace sparsecache {

double plugin_bound(std::int64_t n_samples, Index n_positions, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorKind::kBadDelta, "delta must lie in (0, 1)");
  }
  if (n_samples < 1 || n_positions < 1) {
    throw Error(ErrorKind::kBadParams, "need n_samples >= 1 and N >= 1");
  }
  const double n = static_cast<double>(n_samples);
  return std::sqrt(static_cast<double>(n_positions) / n) +
         std::sqrt(2.0 * std::log(1.0 / delta) / n);
}

Shape parse_shape(const std::string& name) {
  if (name == "uniform") return Shape::kUniform;
  if (name == "end_spike") return Shape::kEndSpike;
  if (name == "multimodal") return Shape::kMultimodal;
  if (name == "head_heavy") return Shape::kHeadHeavy;
  throw Error(ErrorKind::kBadParams, "unknown shape '" + name + "'");
}

std::string to_string(Shape shape) {
  switch (shape) {
    case Shape::kUniform: return "uniform";
    case Shape::kEndSpike: return "end_spike";
    case Shape::kMultimodal: return "multimodal";
    case Shape::kHeadHeavy: return "head_heavy";
  }
  return "unknown";
}

namespace {

void check_mass(double m, const char* what) {
  if (!(m > 0.0 && m <= 1.0)) {
    throw Error(ErrorKind::kBadParams, std::string(what) + " must lie in (0, 1]");
  }
}

Index resolve_width(Index requested, Index fallback, Index n, const char* what) {
  const Index w = requested == 0 ? fallback : requested;
  if (w < 1 || w > n) {
    throw Error(ErrorKind::kBadParams, std::string(what) + " must lie in [1, N]");
  }
  return w;
}

// Splits `total` over the first `head` entries of `w` and the rest; both
// segments are assumed to have positive weight when non-empty.
void scale_segments(Eigen::VectorXd& w, Index head, double head_total) {
  const Index n = w.size();
  const double head_sum = w.head(head).sum();
  w.head(head) *= head_total / head_sum;
  if (head < n) {
    const double tail_sum = w.tail(n - head).sum();
    w.tail(n - head) *= (1.0 - head_total) / tail_sum;
  }
}

}  // namespace

OverlapHistogram synth_distribution(Shape shape, Index n_positions,
                                    const SynthParams& params,
                                    std::uint64_t seed) {
  if (n_positions < 2) {
    throw Error(ErrorKind::kBadLength, "synthetic shapes need N >= 2");
  }
  const Index n = n_positions;
  Rng rng(seed);
  Eigen::VectorXd w(n);

  switch (shape) {
    case Shape::kUniform:
      w.setOnes();
      break;

    case Shape::kEndSpike: {
      check_mass(params.spike_mass, "spike_mass");
      const Index width =
          resolve_width(params.spike_width, std::max<Index>(1, n / 50), n,
                        "spike_width");
      // Background: noisy plateau. Spike: ramp rising toward depth N.
      for (Index i = 0; i < n; ++i) w(i) = 0.5 + uniform01(rng);
      Eigen::VectorXd reversed = w.reverse();
      for (Index i = 0; i < width; ++i) {
        reversed(i) = static_cast<double>(width - i) * (0.75 + 0.5 * uniform01(rng));
      }
      const double spike = width == n ? 1.0 : params.spike_mass;
      scale_segments(reversed, width, spike);
      w = reversed.reverse();
      break;
    }

    case Shape::kHeadHeavy: {
      check_mass(params.head_mass, "head_mass");
      const Index width = resolve_width(
          params.head_width, std::max<Index>(1, n / 10), n, "head_width");
      for (Index i = 0; i < n; ++i) {
        const double jitter = 0.5 + uniform01(rng);
        if (i < width) {
          w(i) = std::exp(-3.0 * static_cast<double>(i) / width) * jitter;
        } else {
          w(i) = jitter / static_cast<double>(i + 1);
        }
      }
      scale_segments(w, width, width == n ? 1.0 : params.head_mass);
      break;
    }

    case Shape::kMultimodal: {
      if (params.n_modes < 1 || !(params.mode_width > 0.0)) {
        throw Error(ErrorKind::kBadParams,
                    "multimodal needs n_modes >= 1 and mode_width > 0");
      }
      const double sigma =
          std::max(1.0, params.mode_width * static_cast<double>(n));
      w.setZero();
      for (int k = 0; k < params.n_modes; ++k) {
        const double center = 1.0 + (0.1 + 0.9 * uniform01(rng)) * (n - 1);
        const double weight = 0.5 + uniform01(rng);
        for (Index t = 1; t <= n; ++t) {
          const double z = (static_cast<double>(t) - center) / sigma;
          w(t - 1) += weight * std::exp(-0.5 * z * z);
        }
      }
      break;
    }
  }
  return OverlapHistogram::from_counts(w);
}

Index sample_depth(const OverlapHistogram& h, double u) {
  const auto& prefix = h.prefix_mass();
  const double* begin = prefix.data() + 1;
  const double* end = prefix.data() + prefix.size();
  const double* it = std::upper_bound(begin, end, u);
  if (it == end) {
    // u landed in the rounding slack above P_N; take the deepest supported depth.
    Index t = h.size();
    while (t > 1 && h.p(t) == 0.0) --t;
    return t;
  }
  return static_cast<Index>(it - begin) + 1;
}

}  // namespace sparsecache
