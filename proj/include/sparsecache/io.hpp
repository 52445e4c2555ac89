// SPDX-License-Identifier: Apache-2.0
//
// File formats shared by the CLI and the test harnesses.
//
//   histogram    {"n": N, "mass": [p_1, ..., p_N]}
//   checkpoints  {"n": N, "positions": [c_1, ..., c_M]}
//   cost         {"expected_recompute", "worst_case_recompute", "no_cache",
//                 "savings", "reduction_factor"}  (an infinite reduction
//                 factor is written as null)
//   estimator    {"n": N, "gamma": g, "weights": [...], "count": t}
//   trace        JSON lines, token mode
//                  {"id": 1, "group": "g0", "tokens": [..], "arrival_time": 0.5}
//                or depth mode
//                  {"id": 1, "overlap_depth": 37, "length": 128}
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparsecache/estimator.hpp"
#include "sparsecache/placement.hpp"
#include "sparsecache/request.hpp"
#include "sparsecache/simulator.hpp"
#include "sparsecache/sweep.hpp"

namespace sparsecache::io {

using Json = nlohmann::json;

Json to_json(const OverlapHistogram& h);
Json to_json(const CheckpointSet& c);
Json to_json(const PlacementCost& cost);
Json to_json(const DepthEstimator& estimator);
Json to_json(const SimSummary& summary);

OverlapHistogram histogram_from_json(const Json& j);
CheckpointSet checkpoints_from_json(const Json& j);
DepthEstimator estimator_from_json(const Json& j);

/// Parses a whole document; malformed JSON surfaces as Error(kBadInput).
Json parse_json(std::istream& in, const std::string& source);
Json read_json_file(const std::string& path);

/// Reads a JSON-lines trace. Blank lines are skipped; any malformed line
/// raises Error(kBadInput) naming its 1-based line number.
std::vector<Request> read_trace(std::istream& in);
std::vector<Request> read_trace_file(const std::string& path);

void write_trace(std::ostream& out, const std::vector<Request>& requests);

/// Fixed-format number used in every CSV: up to 10 significant digits,
/// "inf" for infinity.
std::string format_number(double value);

/// Per-request CSV with a trailing "total" row of column sums.
void write_records_csv(std::ostream& out, const SimMetrics& metrics);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace sparsecache::io
