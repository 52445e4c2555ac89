// SPDX-License-Identifier: Apache-2.0
//
// sparsecache: plan, evaluate, and simulate sparse recurrent-state checkpoints
// for prefix caches.
//
// Exit codes: 0 ok, 2 input error, 3 constraint error, 64 usage.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sparsecache/distribution.hpp"
#include "sparsecache/estimator.hpp"
#include "sparsecache/io.hpp"
#include "sparsecache/placement.hpp"
#include "sparsecache/simulator.hpp"
#include "sparsecache/sweep.hpp"
#include "sparsecache/workload.hpp"

namespace sc = sparsecache;
using sc::io::Json;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitConstraint = 3;
constexpr int kExitUsage = 64;

const std::vector<std::string> kStrategyNames = {"balanced", "block", "sqrt",
                                                 "logarithmic", "dp"};
const std::vector<std::string> kShapeNames = {"uniform", "end_spike", "multimodal",
                                              "head_heavy"};

// Writes to `path`, or stdout when path is empty or "-".
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw sc::Error(sc::ErrorKind::kBadInput, "cannot write " + path);
  fn(out);
}

struct PlanArgs {
  std::string histogram;
  sc::Index budget = 1;
  std::string strategy = "dp";
  sc::Index block = 128;
  bool clip = false;
  bool grid = false;
};

struct EvalArgs {
  std::string histogram;
  std::string checkpoints;
};

struct SimArgs {
  std::string trace;
  sc::Index capacity = 50;
  sc::Index budget = 4;
  sc::Index block = 64;
  std::string strategy = "dp";
  double gamma = 0.99;
  sc::Index refresh = 10;
  std::uint64_t seed = 0;
  bool grid = false;
  bool no_clip = false;
  std::int64_t ckpt_bytes = 0;
  std::int64_t kv_bytes = 0;
  sc::Index tracked = 0;
  std::string out;
  std::vector<sc::Index> budgets{1, 2, 4, 8, 16};
  std::vector<std::string> strategies = kStrategyNames;
  unsigned threads = 0;
};

struct GenArgs {
  std::string kind = "trace";
  std::string shape = "end_spike";
  std::string end_shape = "head_heavy";
  sc::Index groups = 20;
  sc::Index per_group = 10;
  sc::Index n = 1024;
  sc::Index n_max = 0;
  sc::Index suffix_min = 16;
  sc::Index suffix_max = 64;
  sc::Index requests = 1000;
  double delta = 0.0;
  double rate = 1.0;
  double spike_mass = 0.9;
  double head_mass = 0.8;
  int modes = 3;
  std::uint64_t seed = 0;
  std::string out;
  std::string path_out;
};

struct EstimateArgs {
  std::string depths;
  double gamma = 0.99;
  sc::Index every = 10;
  sc::Index n = 0;
  std::string state_in;
  std::string state_out;
  std::string out;
};

sc::SimConfig sim_config(const SimArgs& a) {
  sc::SimConfig c;
  c.capacity = a.capacity;
  c.planner.strategy = sc::parse_strategy(a.strategy);
  c.planner.budget = a.budget;
  c.planner.block = a.block;
  c.planner.grid_mode = a.grid;
  c.planner.clip = !a.no_clip;
  c.decay = a.gamma;
  c.refresh_every = a.refresh;
  c.seed = a.seed;
  c.cost_model = {a.ckpt_bytes, a.kv_bytes};
  c.estimator_positions = a.tracked;
  return c;
}

int run_plan(const PlanArgs& a) {
  const sc::OverlapHistogram h = sc::io::histogram_from_json(sc::io::read_json_file(a.histogram));
  sc::PlannerConfig config;
  config.strategy = sc::parse_strategy(a.strategy);
  config.budget = a.budget;
  config.block = a.block;
  config.grid_mode = a.grid;
  config.clip = a.clip;
  const sc::CheckpointSet c = sc::plan(config, h.size(), &h);
  Json j = sc::io::to_json(c);
  j["cost"] = sc::io::to_json(sc::expected_cost(h, c));
  std::cout << j.dump() << '\n';
  return 0;
}

int run_eval(const EvalArgs& a) {
  const sc::OverlapHistogram h = sc::io::histogram_from_json(sc::io::read_json_file(a.histogram));
  const sc::CheckpointSet c = sc::io::checkpoints_from_json(sc::io::read_json_file(a.checkpoints));
  std::cout << sc::io::to_json(sc::expected_cost(h, c)).dump() << '\n';
  return 0;
}

int run_simulate(const SimArgs& a) {
  const auto trace = sc::io::read_trace_file(a.trace);
  const sc::SimConfig config = sim_config(a);
  const sc::SimMetrics m = sc::run_simulation(trace, config);
  if (!a.out.empty()) {
    with_output(a.out, [&](std::ostream& os) { sc::io::write_records_csv(os, m); });
  }
  Json j = sc::io::to_json(m.summary);
  j["strategy"] = a.strategy;
  j["budget"] = a.budget;
  j["capacity"] = a.capacity;
  j["block"] = a.block;
  j["seed"] = a.seed;
  std::cout << j.dump() << '\n';
  return 0;
}

int run_sweep(const SimArgs& a) {
  const auto trace = sc::io::read_trace_file(a.trace);
  const sc::SimConfig config = sim_config(a);
  std::vector<sc::Strategy> strategies;
  for (const auto& s : a.strategies) strategies.push_back(sc::parse_strategy(s));
  const auto rows = sc::sweep(trace, config, a.budgets, strategies, a.threads);
  with_output(a.out, [&](std::ostream& os) { sc::io::write_sweep_csv(os, rows); });
  return 0;
}

int run_gen(const GenArgs& a) {
  sc::SynthParams params;
  params.spike_mass = a.spike_mass;
  params.head_mass = a.head_mass;
  params.n_modes = a.modes;
  const sc::Shape shape = sc::parse_shape(a.shape);

  if (a.kind == "histogram") {
    const auto h = sc::synth_distribution(shape, a.n, params, a.seed);
    with_output(a.out, [&](std::ostream& os) { os << sc::io::to_json(h).dump() << '\n'; });
    return 0;
  }
  if (a.kind == "drift") {
    const auto start = sc::synth_distribution(shape, a.n, params, a.seed);
    const auto end = sc::synth_distribution(sc::parse_shape(a.end_shape), a.n, params,
                                            a.seed + 1);
    const auto drift = sc::drift_trace(a.requests, start, end, a.delta, a.seed);
    with_output(a.out, [&](std::ostream& os) { sc::io::write_trace(os, drift.requests); });
    if (!a.path_out.empty()) {
      Json path = Json::array();
      for (const auto& p : drift.path) path.push_back(sc::io::to_json(p)["mass"]);
      with_output(a.path_out, [&](std::ostream& os) { os << path.dump() << '\n'; });
    }
    return 0;
  }
  sc::GroupedTraceConfig g;
  g.n_groups = a.groups;
  g.requests_per_group = a.per_group;
  g.base_len_min = a.n;
  g.base_len_max = a.n_max > 0 ? a.n_max : a.n;
  g.suffix_len_min = a.suffix_min;
  g.suffix_len_max = a.suffix_max;
  g.overlap_shape = shape;
  g.shape_params = params;
  g.seed = a.seed;
  const auto trace = sc::gen_grouped_trace(g, a.rate);
  with_output(a.out, [&](std::ostream& os) { sc::io::write_trace(os, trace); });
  return 0;
}

std::vector<sc::Index> read_depths(std::istream& in) {
  std::vector<sc::Index> depths;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    try {
      if (line[first] == '{') {
        const Json j = Json::parse(line);
        const auto& d = j.at("overlap_depth");
        if (!d.is_number_integer()) throw std::invalid_argument("overlap_depth");
        depths.push_back(d.get<sc::Index>());
      } else {
        std::size_t used = 0;
        const long long v = std::stoll(line.substr(first), &used);
        if (line.find_first_not_of(" \t\r", first + used) != std::string::npos) {
          throw std::invalid_argument("trailing characters");
        }
        depths.push_back(v);
      }
    } catch (const std::exception&) {
      throw sc::Error(sc::ErrorKind::kBadInput,
                      "line " + std::to_string(line_no) + ": expected a depth");
    }
  }
  return depths;
}

int run_estimate(const EstimateArgs& a) {
  std::vector<sc::Index> depths;
  if (a.depths == "-") {
    depths = read_depths(std::cin);
  } else {
    std::ifstream in(a.depths);
    if (!in) throw sc::Error(sc::ErrorKind::kBadInput, "cannot open " + a.depths);
    depths = read_depths(in);
  }
  if (a.every < 1) throw sc::Error(sc::ErrorKind::kBadParams, "--every must be >= 1");

  std::optional<sc::DepthEstimator> est;
  if (!a.state_in.empty()) {
    est = sc::io::estimator_from_json(sc::io::read_json_file(a.state_in));
  } else {
    const sc::Index n =
        a.n > 0 ? a.n : (depths.empty() ? 0 : *std::max_element(depths.begin(), depths.end()));
    if (n < 1) throw sc::Error(sc::ErrorKind::kNoSamples, "no depths and no --n");
    est.emplace(n, a.gamma);
  }

  with_output(a.out, [&](std::ostream& os) {
    for (std::size_t i = 0; i < depths.size(); ++i) {
      est->observe(depths[i]);
      if (est->sample_count() % a.every == 0 || i + 1 == depths.size()) {
        Json j = sc::io::to_json(est->snapshot());
        j["count"] = est->sample_count();
        os << j.dump() << '\n';
      }
    }
  });
  if (!a.state_out.empty()) {
    with_output(a.state_out, [&](std::ostream& os) { os << sc::io::to_json(*est).dump() << '\n'; });
  }
  return 0;
}

void add_sim_options(CLI::App* cmd, SimArgs& a) {
  cmd->add_option("trace", a.trace, "JSON-lines trace")->required();
  cmd->add_option("--k", a.capacity, "cache capacity (entries)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--block", a.block, "block size for clipping")->check(CLI::PositiveNumber);
  cmd->add_option("--gamma", a.gamma, "estimator decay");
  cmd->add_option("--refresh", a.refresh, "hits between re-plans")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", a.seed, "recorded in the report");
  cmd->add_flag("--grid-mode", a.grid, "block-restricted DP instead of clipping");
  cmd->add_flag("--no-clip", a.no_clip, "disable block clipping");
  cmd->add_option("--ckpt-bytes", a.ckpt_bytes, "bytes per recurrent checkpoint");
  cmd->add_option("--kv-bytes", a.kv_bytes, "attention KV bytes per cached token");
  cmd->add_option("--tracked-depths", a.tracked, "estimator depth range (0 = longest request)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse recurrent-state checkpoint planning and prefix-cache simulation"};
  app.require_subcommand(1);

  PlanArgs plan_args;
  auto* plan = app.add_subcommand("plan", "plan checkpoints for a histogram");
  plan->add_option("histogram", plan_args.histogram, "histogram JSON")->required();
  plan->add_option("-m,--budget", plan_args.budget, "checkpoint budget M");
  plan->add_option("--strategy", plan_args.strategy)->check(CLI::IsMember(kStrategyNames));
  plan->add_option("--block", plan_args.block, "block size B")->check(CLI::PositiveNumber);
  plan->add_flag("--clip", plan_args.clip, "clip positions down to block boundaries");
  plan->add_flag("--grid-mode", plan_args.grid, "restrict DP to block boundaries");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint set");
  eval->add_option("histogram", eval_args.histogram, "histogram JSON")->required();
  eval->add_option("checkpoints", eval_args.checkpoints, "checkpoint-set JSON")->required();

  SimArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "replay a trace through a last-K cache");
  add_sim_options(simulate, sim_args);
  simulate->add_option("-m,--budget", sim_args.budget, "checkpoint budget M");
  simulate->add_option("--strategy", sim_args.strategy)->check(CLI::IsMember(kStrategyNames));
  simulate->add_option("--out", sim_args.out, "per-request CSV path");

  SimArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "simulate every (strategy, budget) cell");
  add_sim_options(sweep, sweep_args);
  sweep->add_option("--budgets", sweep_args.budgets, "comma-separated budgets")->delimiter(',');
  sweep->add_option("--strategies", sweep_args.strategies, "comma-separated strategies")
      ->delimiter(',')
      ->check(CLI::IsMember(kStrategyNames));
  sweep->add_option("--threads", sweep_args.threads, "worker threads (0 = all cores)");
  sweep->add_option("--out", sweep_args.out, "CSV path (default stdout)");

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "generate synthetic traces and histograms");
  gen->add_option("--kind", gen_args.kind, "output kind")->check(CLI::IsMember({"trace", "histogram", "drift"}));
  gen->add_option("--shape", gen_args.shape, "overlap shape (drift: start shape)")->check(CLI::IsMember(kShapeNames));
  gen->add_option("--end-shape", gen_args.end_shape, "drift: end shape")->check(CLI::IsMember(kShapeNames));
  gen->add_option("--groups", gen_args.groups, "request groups");
  gen->add_option("--per-group", gen_args.per_group, "requests per group");
  gen->add_option("--n", gen_args.n, "depth range / base document length");
  gen->add_option("--n-max", gen_args.n_max, "upper base length (uniform in [n, n-max])");
  gen->add_option("--suffix-min", gen_args.suffix_min, "shortest fresh suffix");
  gen->add_option("--suffix-max", gen_args.suffix_max, "longest fresh suffix");
  gen->add_option("--requests", gen_args.requests, "drift trace length");
  gen->add_option("--delta", gen_args.delta, "per-request L1 drift");
  gen->add_option("--rate", gen_args.rate, "Poisson arrival rate per group");
  gen->add_option("--spike-mass", gen_args.spike_mass, "end_spike: mass in the spike");
  gen->add_option("--head-mass", gen_args.head_mass, "head_heavy: mass in the head");
  gen->add_option("--modes", gen_args.modes, "multimodal: number of modes");
  gen->add_option("--seed", gen_args.seed, "generator seed");
  gen->add_option("--out", gen_args.out, "output path (default stdout)");
  gen->add_option("--path-out", gen_args.path_out, "drift: true-distribution sidecar");

  EstimateArgs est_args;
  auto* estimate = app.add_subcommand("estimate", "exponentially weighted depth histogram");
  estimate->add_option("depths", est_args.depths, "depth stream ('-' for stdin)")->required();
  estimate->add_option("--gamma", est_args.gamma, "decay in (0, 1]");
  estimate->add_option("--every", est_args.every, "emit a snapshot every k observations");
  estimate->add_option("--n", est_args.n, "tracked depths (default: deepest observed)");
  estimate->add_option("--state-in", est_args.state_in, "resume from saved estimator state");
  estimate->add_option("--state-out", est_args.state_out, "save estimator state");
  estimate->add_option("--out", est_args.out, "snapshot stream path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*plan) return run_plan(plan_args);
    if (*eval) return run_eval(eval_args);
    if (*simulate) return run_simulate(sim_args);
    if (*sweep) return run_sweep(sweep_args);
    if (*gen) return run_gen(gen_args);
    if (*estimate) return run_estimate(est_args);
  } catch (const sc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.is_constraint() ? kExitConstraint : kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitUsage;
}
