// SPDX-License-Identifier: Apache-2.0
//
// Writes the per-request CSV for a trace using the reference replay, with the
// configuration the CLI golden test passes to `sparsecache simulate`:
//
//   golden_oracle TRACE OUT_CSV
//   sparsecache simulate TRACE --k 3 -m 2 --block 4 --refresh 2 --strategy dp
#include <algorithm>
#include <fstream>
#include <iostream>

#include "oracles.hpp"
#include "sparsecache/io.hpp"

int main(int argc, char** argv) {
  using namespace sparsecache;
  if (argc != 3) {
    std::cerr << "usage: golden_oracle TRACE OUT_CSV\n";
    return 64;
  }
  try {
    const auto trace = io::read_trace_file(argv[1]);
    SimConfig config;
    config.capacity = 3;
    config.planner = {Strategy::kDp, 2, 4, false, true};
    config.refresh_every = 2;
    Index longest = 1;
    for (const auto& r : trace) longest = std::max(longest, r.length());

    oracle::ReferenceSimulator reference(config, longest);
    SimMetrics metrics;
    for (const auto& r : trace) metrics.records.push_back(reference.serve(r));
    std::ofstream out(argv[2], std::ios::binary);
    io::write_records_csv(out, metrics);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  return 0;
}
