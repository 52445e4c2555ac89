// SPDX-License-Identifier: Apache-2.0
#include "sparsecache/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace sparsecache::io {

namespace {

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorKind::kBadInput, what);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) bad(where + ": expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) bad(where + ": missing \"" + key + "\"");
  return *it;
}

std::int64_t as_int(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) bad(what + " must be an integer");
  return j.get<std::int64_t>();
}

double as_number(const Json& j, const std::string& what) {
  if (!j.is_number()) bad(what + " must be a number");
  return j.get<double>();
}

}  // namespace

Json to_json(const OverlapHistogram& h) {
  Json mass = Json::array();
  for (Index i = 0; i < h.size(); ++i) mass.push_back(h.mass()(i));
  return {{"n", h.size()}, {"mass", std::move(mass)}};
}

Json to_json(const CheckpointSet& c) {
  return {{"n", c.n_positions()}, {"positions", c.positions()}};
}

Json to_json(const PlacementCost& cost) {
  Json j = {{"expected_recompute", cost.expected_recompute},
            {"worst_case_recompute", cost.worst_case_recompute},
            {"no_cache", cost.no_cache},
            {"savings", cost.savings}};
  if (std::isinf(cost.reduction_factor)) {
    j["reduction_factor"] = nullptr;
  } else {
    j["reduction_factor"] = cost.reduction_factor;
  }
  return j;
}

Json to_json(const DepthEstimator& estimator) {
  const Eigen::VectorXd w = estimator.weights();
  return {{"n", estimator.n_positions()},
          {"gamma", estimator.decay()},
          {"weights", std::vector<double>(w.data(), w.data() + w.size())},
          {"count", estimator.sample_count()}};
}

Json to_json(const SimSummary& s) {
  Json j = {{"requests", s.requests},
            {"hits", s.hits},
            {"hit_rate", s.hit_rate},
            {"total_overlap", s.total_overlap},
            {"total_recompute", s.total_recompute},
            {"total_new_tokens", s.total_new_tokens},
            {"savings", s.savings},
            {"inserted_entries", s.inserted_entries},
            {"inserted_slots", s.inserted_slots},
            {"mean_slots_per_entry", s.mean_slots_per_entry},
            {"peak_resident_slots", s.peak_resident_slots},
            {"peak_resident_bytes", s.peak_resident_bytes},
            {"clamped_depths", s.clamped_depths},
            {"refreshes", s.refreshes}};
  if (std::isinf(s.reduction)) {
    j["reduction"] = nullptr;
  } else {
    j["reduction"] = s.reduction;
  }
  return j;
}

OverlapHistogram histogram_from_json(const Json& j) {
  const std::int64_t n = as_int(field(j, "n", "histogram"), "histogram n");
  const Json& mass = field(j, "mass", "histogram");
  if (!mass.is_array()) bad("histogram mass must be an array");
  if (n < 1 || static_cast<std::int64_t>(mass.size()) != n) {
    bad("histogram mass must hold exactly n >= 1 entries");
  }
  Eigen::VectorXd counts(n);
  for (std::int64_t i = 0; i < n; ++i) counts(i) = as_number(mass[i], "mass entry");
  return OverlapHistogram::from_counts(counts);
}

CheckpointSet checkpoints_from_json(const Json& j) {
  const std::int64_t n = as_int(field(j, "n", "checkpoints"), "checkpoints n");
  const Json& pos = field(j, "positions", "checkpoints");
  if (!pos.is_array()) bad("checkpoint positions must be an array");
  std::vector<Index> positions;
  for (const Json& p : pos) positions.push_back(as_int(p, "checkpoint position"));
  return {n, std::move(positions)};
}

DepthEstimator estimator_from_json(const Json& j) {
  const std::int64_t n = as_int(field(j, "n", "estimator"), "estimator n");
  const double gamma = as_number(field(j, "gamma", "estimator"), "estimator gamma");
  const std::int64_t count = as_int(field(j, "count", "estimator"), "estimator count");
  const Json& weights = field(j, "weights", "estimator");
  if (!weights.is_array() || static_cast<std::int64_t>(weights.size()) != n) {
    bad("estimator weights must hold exactly n entries");
  }
  Eigen::VectorXd w(n);
  for (std::int64_t i = 0; i < n; ++i) w(i) = as_number(weights[i], "weight");
  return DepthEstimator::from_weights(n, gamma, w, count);
}

Json parse_json(std::istream& in, const std::string& source) {
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    bad(source + ": " + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  return parse_json(in, path);
}

std::vector<Request> read_trace(std::istream& in) {
  std::vector<Request> out;
  std::string line;
  std::int64_t line_no = 0;
  std::optional<bool> depth_mode;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no);
    try {
      const Json j = Json::parse(line);
      if (!j.is_object()) bad("expected a JSON object");
      Request r;
      r.id = as_int(field(j, "id", where), "id");
      const bool is_depth = j.contains("overlap_depth");
      if (depth_mode && *depth_mode != is_depth) {
        bad("trace mixes token-mode and depth-mode lines");
      }
      depth_mode = is_depth;
      if (auto g = j.find("group"); g != j.end()) {
        if (!g->is_string()) bad("group must be a string");
        r.group = g->get<std::string>();
      }
      if (auto a = j.find("arrival_time"); a != j.end()) {
        r.arrival_time = as_number(*a, "arrival_time");
        if (!(r.arrival_time >= 0.0)) bad("arrival_time must be >= 0");
      }
      if (is_depth) {
        r.overlap_depth = as_int(field(j, "overlap_depth", where), "overlap_depth");
        r.declared_length = as_int(field(j, "length", where), "length");
        if (r.declared_length < 1) bad("length must be >= 1");
        if (*r.overlap_depth < 0 || *r.overlap_depth > r.declared_length) {
          bad("overlap_depth must lie in [0, length]");
        }
      } else {
        const Json& tokens = field(j, "tokens", where);
        if (!tokens.is_array() || tokens.empty()) bad("tokens must be a non-empty array");
        r.tokens.reserve(tokens.size());
        for (const Json& t : tokens) {
          const std::int64_t v = as_int(t, "token");
          if (v < std::numeric_limits<Token>::min() || v > std::numeric_limits<Token>::max()) {
            bad("token id out of range");
          }
          r.tokens.push_back(static_cast<Token>(v));
        }
      }
      out.push_back(std::move(r));
    } catch (const Json::exception& e) {
      bad(where + ": " + e.what());
    } catch (const Error& e) {
      const std::string msg = e.what();
      if (msg.find(where) != std::string::npos) throw;
      bad(where + ": " + msg.substr(msg.find(": ") + 2));
    }
  }
  return out;
}

std::vector<Request> read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  return read_trace(in);
}

void write_trace(std::ostream& out, const std::vector<Request>& requests) {
  for (const Request& r : requests) {
    Json j;
    j["id"] = r.id;
    if (r.depth_mode()) {
      j["overlap_depth"] = *r.overlap_depth;
      j["length"] = r.declared_length;
    } else {
      j["group"] = r.group;
      j["tokens"] = r.tokens;
      j["arrival_time"] = r.arrival_time;
    }
    out << j.dump() << '\n';
  }
}

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

void write_records_csv(std::ostream& out, const SimMetrics& metrics) {
  out << "id,group,length,overlap_depth,reusable_depth,recompute,new_suffix,hit,slots\n";
  std::int64_t length = 0, overlap = 0, reusable = 0, recompute = 0, fresh = 0,
               hits = 0, slots = 0;
  for (const RequestRecord& r : metrics.records) {
    out << r.id << ',' << r.group << ',' << r.length << ',' << r.overlap_depth << ','
        << r.reusable_depth << ',' << r.recompute << ',' << r.new_suffix << ','
        << (r.hit ? 1 : 0) << ',' << r.slots << '\n';
    length += r.length;
    overlap += r.overlap_depth;
    reusable += r.reusable_depth;
    recompute += r.recompute;
    fresh += r.new_suffix;
    hits += r.hit ? 1 : 0;
    slots += r.slots;
  }
  out << "total,," << length << ',' << overlap << ',' << reusable << ','
      << recompute << ',' << fresh << ',' << hits << ',' << slots << '\n';
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "strategy,budget,slots,expected_recompute,savings,reduction,bytes,pareto\n";
  for (const SweepRow& r : rows) {
    out << to_string(r.strategy) << ',' << r.budget << ',' << format_number(r.slots)
        << ',' << format_number(r.expected_recompute) << ','
        << format_number(r.savings) << ',' << format_number(r.reduction) << ','
        << r.bytes << ',' << (r.pareto ? 1 : 0) << '\n';
  }
}

}  // namespace sparsecache::io
