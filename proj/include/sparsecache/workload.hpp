// SPDX-License-Identifier: Apache-2.0
//
// Synthetic request streams with controlled prefix overlap.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sparsecache/distribution.hpp"
#include "sparsecache/request.hpp"

namespace sparsecache {

struct GroupedTraceConfig {
  Index n_groups = 20;
  Index requests_per_group = 10;
  /// Each group's shared base sequence has a length drawn uniformly here.
  Index base_len_min = 1024;
  Index base_len_max = 1024;
  /// Fresh tokens appended after the shared prefix.
  Index suffix_len_min = 16;
  Index suffix_len_max = 64;
  Shape overlap_shape = Shape::kEndSpike;
  SynthParams shape_params{};
  /// Base-sequence ids are drawn below `vocab`; fresh suffix ids start at it.
  Token vocab = 32000;
  std::uint64_t seed = 0;
};

using RequestGroup = std::vector<Request>;

/// Per-group request lists in generation order. Within a group every request
/// copies a prefix of the group's base sequence, with the copied length
/// sampled from the overlap shape over 1..base length, then appends fresh
/// tokens that never occur anywhere else in the trace.
std::vector<RequestGroup> gen_groups(const GroupedTraceConfig& config);

/// Overlap law used for group `group` of a trace with base length `base_len`.
OverlapHistogram group_overlap_distribution(const GroupedTraceConfig& config,
                                            Index group, Index base_len);

/// gen_groups followed by poisson_interleave with the same seed.
std::vector<Request> gen_grouped_trace(const GroupedTraceConfig& config,
                                       double rate_per_group = 1.0);

/// Assigns cumulative exponential inter-arrival times to each group's
/// requests and merges all groups by arrival time. Ties are broken by group
/// position, then request id.
std::vector<Request> poisson_interleave(std::span<const RequestGroup> groups,
                                        double rate_per_group,
                                        std::uint64_t seed);

std::vector<Request> poisson_interleave(std::span<const RequestGroup> groups,
                                        std::span<const double> rates,
                                        std::uint64_t seed);

struct DriftTrace {
  /// Depth-mode requests, each declared with length N.
  std::vector<Request> requests;
  /// True law p_s of request s (same order as `requests`).
  std::vector<OverlapHistogram> path;
};

/// Depths sampled from the straight-line path start -> end, moving exactly
/// `drift_per_step` in L1 per request until `end` is reached. A zero drift
/// samples i.i.d. from `start`.
DriftTrace drift_trace(Index n_requests, const OverlapHistogram& start,
                       const OverlapHistogram& end, double drift_per_step,
                       std::uint64_t seed);

}  // namespace sparsecache
