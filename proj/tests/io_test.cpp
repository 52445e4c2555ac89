// SPDX-License-Identifier: Apache-2.0
#include <sstream>
#include <string>

#include <doctest.h>

#include "sparsecache/io.hpp"
#include "sparsecache/workload.hpp"

using namespace sparsecache;

namespace {

std::string error_of(const std::string& text) {
  std::istringstream in(text);
  try {
    io::read_trace(in);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kBadInput);
    return e.what();
  }
  FAIL("expected BadInput");
  return {};
}

}  // namespace

TEST_CASE("histogram JSON") {
  const auto h = histogram_from_counts(std::vector<double>{1, 3});
  const auto j = io::to_json(h);
  CHECK(j["n"] == 2);
  CHECK(j["mass"][1].get<double>() == doctest::Approx(0.75));
  CHECK(io::histogram_from_json(j).mass() == h.mass());
  CHECK_THROWS_AS(io::histogram_from_json(io::Json::parse(R"({"n": 3, "mass": [1, 2]})")), Error);
  CHECK_THROWS_AS(io::histogram_from_json(io::Json::parse(R"({"mass": [1]})")), Error);
  try {
    io::histogram_from_json(io::Json::parse(R"({"n": 2, "mass": [0, 0]})"));
    FAIL("expected AllZero");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kAllZero);
  }
}

TEST_CASE("checkpoint and cost JSON") {
  const CheckpointSet c(10, {3, 7});
  const auto j = io::to_json(c);
  CHECK(j.dump() == R"({"n":10,"positions":[3,7]})");
  CHECK(io::checkpoints_from_json(j) == c);
  CHECK_THROWS_AS(io::checkpoints_from_json(io::Json::parse(R"({"n":3,"positions":[4]})")), Error);

  const auto point = histogram_from_counts(std::vector<double>{0, 1});
  const auto cost = io::to_json(expected_cost(point, CheckpointSet(2, {2})));
  CHECK(cost["reduction_factor"].is_null());
  CHECK(cost["savings"] == 1.0);
  CHECK(cost.contains("worst_case_recompute"));
  CHECK(cost.contains("no_cache"));
  CHECK(cost.contains("expected_recompute"));
}

TEST_CASE("malformed documents") {
  std::istringstream in("{\"n\": 3,");
  CHECK_THROWS_AS(io::parse_json(in, "x.json"), Error);
  CHECK_THROWS_AS(io::read_json_file("/nonexistent/file.json"), Error);
}

TEST_CASE("token trace round trip") {
  GroupedTraceConfig g;
  g.n_groups = 3;
  g.requests_per_group = 4;
  g.base_len_min = 5;
  g.base_len_max = 9;
  g.seed = 6;
  const auto trace = gen_grouped_trace(g);
  std::stringstream buf;
  io::write_trace(buf, trace);
  const auto back = io::read_trace(buf);
  REQUIRE(back.size() == trace.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].id == trace[i].id);
    CHECK(back[i].group == trace[i].group);
    CHECK(back[i].tokens == trace[i].tokens);
    CHECK(back[i].arrival_time == trace[i].arrival_time);
  }
}

TEST_CASE("depth trace parsing") {
  std::istringstream in(
      "{\"id\": 1, \"overlap_depth\": 37, \"length\": 128}\n"
      "\n"
      "{\"id\": 2, \"overlap_depth\": 0, \"length\": 4}\n");
  const auto trace = io::read_trace(in);
  REQUIRE(trace.size() == 2);
  CHECK(trace[0].depth_mode());
  CHECK(*trace[0].overlap_depth == 37);
  CHECK(trace[0].length() == 128);
  CHECK(trace[1].length() == 4);
}

TEST_CASE("trace errors name the line") {
  CHECK(error_of("{\"id\": 1, \"tokens\": [1]}\n{\"id\": 2, \"tokens\": [1,\n").find("line 2") !=
        std::string::npos);
  CHECK(error_of("{\"id\": 1, \"tokens\": []}\n").find("line 1") != std::string::npos);
  CHECK(error_of("\n{\"tokens\": [1]}\n").find("line 2") != std::string::npos);
  CHECK(error_of("{\"id\": 1, \"overlap_depth\": 9, \"length\": 4}\n").find("line 1") !=
        std::string::npos);
  CHECK(error_of("{\"id\": 1, \"tokens\": [1]}\n{\"id\": 2, \"overlap_depth\": 1, \"length\": 4}\n")
            .find("line 2") != std::string::npos);
  CHECK(error_of("{\"id\": 1, \"tokens\": [1], \"arrival_time\": -1}\n").find("line 1") !=
        std::string::npos);
  CHECK(error_of("[1, 2]\n").find("line 1") != std::string::npos);
}

TEST_CASE("format_number") {
  CHECK(io::format_number(0.5) == "0.5");
  CHECK(io::format_number(1.0 / 3.0) == "0.3333333333");
  CHECK(io::format_number(2.0) == "2");
  CHECK(io::format_number(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("records CSV") {
  SimMetrics m;
  RequestRecord a;
  a.id = 0;
  a.group = "g0";
  a.length = 10;
  a.new_suffix = 10;
  a.slots = 2;
  RequestRecord b;
  b.id = 1;
  b.group = "g0";
  b.length = 12;
  b.overlap_depth = 9;
  b.reusable_depth = 8;
  b.recompute = 1;
  b.new_suffix = 3;
  b.hit = true;
  b.slots = 2;
  m.records = {a, b};
  std::ostringstream out;
  io::write_records_csv(out, m);
  CHECK(out.str() ==
        "id,group,length,overlap_depth,reusable_depth,recompute,new_suffix,hit,slots\n"
        "0,g0,10,0,0,0,10,0,2\n"
        "1,g0,12,9,8,1,3,1,2\n"
        "total,,22,9,8,1,13,1,4\n");
}

TEST_CASE("sweep CSV") {
  SweepRow row;
  row.strategy = Strategy::kBalanced;
  row.budget = 4;
  row.slots = 3.5;
  row.expected_recompute = 12.25;
  row.savings = 0.75;
  row.reduction = 4.0;
  row.bytes = 1024;
  row.pareto = true;
  std::ostringstream out;
  io::write_sweep_csv(out, {row});
  CHECK(out.str() ==
        "strategy,budget,slots,expected_recompute,savings,reduction,bytes,pareto\n"
        "balanced,4,3.5,12.25,0.75,4,1024,1\n");
}
