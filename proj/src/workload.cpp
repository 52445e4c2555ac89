// SPDX-License-Identifier: Apache-2.0
#include "sparsecache/workload.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sparsecache/random.hpp"

namespace sparsecache {

namespace {

void check_range(Index lo, Index hi, Index min_allowed, const char* what) {
  if (lo < min_allowed || hi < lo) {
    throw Error(ErrorKind::kBadRange, std::string(what) + " range [" +
                                          std::to_string(lo) + ", " +
                                          std::to_string(hi) + "] is invalid");
  }
}

// SplitMix64 finalizer, used to derive independent per-group seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

OverlapHistogram group_overlap_distribution(const GroupedTraceConfig& config,
                                            Index group, Index base_len) {
  return synth_distribution(config.overlap_shape, base_len, config.shape_params,
                            mix_seed(config.seed, static_cast<std::uint64_t>(group)));
}

std::vector<RequestGroup> gen_groups(const GroupedTraceConfig& config) {
  if (config.n_groups < 1 || config.requests_per_group < 1) {
    throw Error(ErrorKind::kBadRange, "need at least one group and one request");
  }
  check_range(config.base_len_min, config.base_len_max, 2, "base length");
  check_range(config.suffix_len_min, config.suffix_len_max, 0, "suffix length");
  if (config.vocab <= config.n_groups) {
    throw Error(ErrorKind::kBadRange, "vocab must exceed the number of groups");
  }

  Rng rng(config.seed);
  std::int64_t fresh = config.vocab;
  std::int64_t next_id = 0;
  std::vector<RequestGroup> groups;
  groups.reserve(static_cast<std::size_t>(config.n_groups));

  for (Index g = 0; g < config.n_groups; ++g) {
    const Index base_len = uniform_int(rng, config.base_len_min, config.base_len_max);
    // Leading token marks the group so unrelated groups share no prefix.
    std::vector<Token> base(static_cast<std::size_t>(base_len));
    base[0] = static_cast<Token>(g);
    for (Index i = 1; i < base_len; ++i) {
      base[i] = static_cast<Token>(uniform_int(rng, config.n_groups, config.vocab - 1));
    }
    const OverlapHistogram overlap = group_overlap_distribution(config, g, base_len);

    RequestGroup group;
    group.reserve(static_cast<std::size_t>(config.requests_per_group));
    for (Index r = 0; r < config.requests_per_group; ++r) {
      const Index shared = sample_depth(overlap, uniform01(rng));
      const Index suffix =
          uniform_int(rng, config.suffix_len_min, config.suffix_len_max);
      if (fresh + suffix > std::numeric_limits<Token>::max()) {
        throw Error(ErrorKind::kBadRange, "fresh token ids exhausted");
      }
      Request req;
      req.id = next_id++;
      req.group = "g" + std::to_string(g);
      req.tokens.assign(base.begin(), base.begin() + shared);
      for (Index i = 0; i < suffix; ++i) req.tokens.push_back(static_cast<Token>(fresh++));
      group.push_back(std::move(req));
    }
    groups.push_back(std::move(group));
  }
  return groups;
}

std::vector<Request> gen_grouped_trace(const GroupedTraceConfig& config,
                                       double rate_per_group) {
  const auto groups = gen_groups(config);
  return poisson_interleave(groups, rate_per_group, config.seed);
}

std::vector<Request> poisson_interleave(std::span<const RequestGroup> groups,
                                        double rate_per_group,
                                        std::uint64_t seed) {
  const std::vector<double> rates(groups.size(), rate_per_group);
  return poisson_interleave(groups, rates, seed);
}

std::vector<Request> poisson_interleave(std::span<const RequestGroup> groups,
                                        std::span<const double> rates,
                                        std::uint64_t seed) {
  if (rates.size() != groups.size()) {
    throw Error(ErrorKind::kLengthMismatch, "one rate per group required");
  }
  struct Keyed {
    double time;
    std::size_t group;
    std::int64_t id;
    const Request* request;
  };
  std::vector<Keyed> keyed;
  Rng rng(mix_seed(seed, 0xa11a));
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (!(rates[g] > 0.0)) {
      throw Error(ErrorKind::kBadParams, "arrival rate must be positive");
    }
    double clock = 0.0;
    for (const Request& r : groups[g]) {
      clock += exponential(rng, rates[g]);
      keyed.push_back({clock, g, r.id, &r});
    }
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.group != b.group) return a.group < b.group;
    return a.id < b.id;
  });
  std::vector<Request> merged;
  merged.reserve(keyed.size());
  for (const Keyed& k : keyed) {
    merged.push_back(*k.request);
    merged.back().arrival_time = k.time;
  }
  return merged;
}

DriftTrace drift_trace(Index n_requests, const OverlapHistogram& start,
                       const OverlapHistogram& end, double drift_per_step,
                       std::uint64_t seed) {
  if (n_requests < 1) throw Error(ErrorKind::kBadRange, "need n_requests >= 1");
  if (start.size() != end.size()) {
    throw Error(ErrorKind::kLengthMismatch, "start and end shapes differ in N");
  }
  if (!(drift_per_step >= 0.0) || !std::isfinite(drift_per_step)) {
    throw Error(ErrorKind::kBadDrift, "drift per step must be finite and >= 0");
  }
  const double distance = tv_distance(start, end);
  if (drift_per_step > 0.0 &&
      drift_per_step * static_cast<double>(n_requests - 1) < distance) {
    throw Error(ErrorKind::kBadDrift,
                "end shape is not reachable within the trace at this drift");
  }

  DriftTrace out;
  out.requests.reserve(static_cast<std::size_t>(n_requests));
  out.path.reserve(static_cast<std::size_t>(n_requests));
  Rng rng(seed);
  for (Index s = 0; s < n_requests; ++s) {
    const double alpha =
        drift_per_step == 0.0 || distance == 0.0
            ? 0.0
            : std::min(1.0, drift_per_step * static_cast<double>(s) / distance);
    if (alpha == 0.0) {
      out.path.push_back(start);
    } else if (alpha == 1.0) {
      out.path.push_back(end);
    } else {
      out.path.push_back(OverlapHistogram::from_counts(
          ((1.0 - alpha) * start.mass() + alpha * end.mass()).eval()));
    }
    Request r;
    r.id = s;
    r.group = "drift";
    r.overlap_depth = sample_depth(out.path.back(), uniform01(rng));
    r.declared_length = start.size();
    out.requests.push_back(std::move(r));
  }
  return out;
}

}  // namespace sparsecache
