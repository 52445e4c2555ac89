// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "sparsecache/distribution.hpp"
#include "sparsecache/placement.hpp"

using namespace sparsecache;

namespace {

OverlapHistogram hist(std::vector<double> counts) {
  return histogram_from_counts(std::span<const double>(counts));
}

OverlapHistogram random_hist(std::mt19937_64& rng, Index n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(static_cast<std::size_t>(n));
  for (auto& x : w) x = u(rng) < 0.3 ? 0.0 : u(rng);
  w[0] += 1e-3;
  return hist(w);
}

double direct_sum(const OverlapHistogram& h, Index j, bool moment) {
  double s = 0.0;
  for (Index t = 1; t <= j; ++t) s += (moment ? static_cast<double>(t) : 1.0) * h.p(t);
  return s;
}

}  // namespace

TEST_CASE("histogram_from_counts normalizes and builds prefix sums") {
  SUBCASE("uniform") {
    const auto h = hist({1, 1, 1, 1});
    for (Index t = 1; t <= 4; ++t) CHECK(h.p(t) == doctest::Approx(0.25));
    CHECK(h.prefix_mass(1) == doctest::Approx(0.25));
    CHECK(h.prefix_mass(2) == doctest::Approx(0.5));
    CHECK(h.prefix_mass(3) == doctest::Approx(0.75));
    CHECK(h.prefix_mass(4) == doctest::Approx(1.0));
  }
  SUBCASE("point mass") {
    const auto h = hist({0, 0, 0, 0, 7});
    CHECK(h.p(5) == 1.0);
    CHECK(h.prefix_moment(5) == 5.0);
  }
  SUBCASE("prefix moments match direct summation") {
    const auto h = hist({3, 1});
    CHECK(h.p(1) == doctest::Approx(0.75));
    CHECK(h.p(2) == doctest::Approx(0.25));
    CHECK(h.prefix_moment(1) == doctest::Approx(direct_sum(h, 1, true)));
    CHECK(h.prefix_moment(2) == doctest::Approx(direct_sum(h, 2, true)));
    CHECK(h.prefix_moment(1) == doctest::Approx(0.75));
    CHECK(h.prefix_moment(2) == doctest::Approx(1.25));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(hist({0, 0, 0}), Error);
    try {
      hist({0, 0});
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kAllZero);
    }
    try {
      hist({});
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kBadLength);
    }
    CHECK_THROWS_AS(hist({1, -1, 2}), Error);
  }
}

TEST_CASE("prefix arrays are monotone and end at one") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto h = random_hist(rng, 1 + trial % 97);
    CHECK(h.mass().sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(h.prefix_mass(h.size()) - 1.0) < 1e-12);
    for (Index j = 1; j <= h.size(); ++j) {
      CHECK(h.prefix_mass(j) >= h.prefix_mass(j - 1));
      CHECK(h.prefix_moment(j) >= h.prefix_moment(j - 1));
    }
    const Index j = h.size() / 2 + 1;
    CHECK(h.prefix_moment(j) == doctest::Approx(direct_sum(h, j, true)));
  }
}

TEST_CASE("truncated renormalizes the head") {
  const auto h = hist({1, 1, 2, 4});
  const auto t = h.truncated(2);
  CHECK(t.size() == 2);
  CHECK(t.p(1) == doctest::Approx(0.5));
  CHECK_THROWS_AS(hist({0, 0, 1}).truncated(2), Error);
}

TEST_CASE("no_cache_baseline") {
  CHECK(no_cache_baseline(hist({1, 1, 1, 1, 1})) == doctest::Approx(3.0));
  CHECK(no_cache_baseline(hist({0, 0, 0, 0, 1})) == doctest::Approx(5.0));
  CHECK(no_cache_baseline(hist({0.75, 0.25})) == doctest::Approx(1.25));

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto h = random_hist(rng, 1 + trial);
    CHECK(no_cache_baseline(h) ==
          doctest::Approx(expected_cost(h, CheckpointSet::empty(h.size())).expected_recompute));
  }
}

TEST_CASE("tv_distance is the L1 norm") {
  const auto u4 = hist({1, 1, 1, 1});
  CHECK(tv_distance(u4, u4) == 0.0);
  CHECK(tv_distance(hist({1, 0}), hist({0, 1})) == doctest::Approx(2.0));
  // |0.25-0.4| + |0.25-0.3| + |0.25-0.2| + |0.25-0.1|
  const double elementwise = 0.15 + 0.05 + 0.05 + 0.15;
  CHECK(tv_distance(u4, hist({0.4, 0.3, 0.2, 0.1})) == doctest::Approx(elementwise));
  CHECK(tv_distance(u4, hist({0.4, 0.3, 0.2, 0.1})) == doctest::Approx(0.4));

  try {
    tv_distance(u4, hist({1, 1}));
    FAIL("expected LengthMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kLengthMismatch);
  }
}

TEST_CASE("tv_distance metric properties") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const Index n = 1 + trial % 40;
    const auto p = random_hist(rng, n);
    const auto q = random_hist(rng, n);
    const auto r = random_hist(rng, n);
    CHECK(tv_distance(p, p) == 0.0);
    CHECK(tv_distance(p, q) == doctest::Approx(tv_distance(q, p)));
    CHECK(tv_distance(p, r) <= tv_distance(p, q) + tv_distance(q, r) + 1e-12);
    CHECK(tv_distance(p, q) <= 2.0 + 1e-12);
  }
}

TEST_CASE("plugin_bound") {
  const double expected = 0.1 + std::sqrt(2.0 * std::log(20.0) / 1e4);
  CHECK(plugin_bound(10000, 100, 0.05) == doctest::Approx(expected));
  CHECK(plugin_bound(10000, 100, 0.05) == doctest::Approx(0.1245).epsilon(1e-3));
  CHECK(plugin_bound(1, 1, 1.0 - 1e-12) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(plugin_bound(2000, 50, 0.1) / plugin_bound(1000, 50, 0.1) ==
        doctest::Approx(1.0 / std::sqrt(2.0)));

  CHECK(plugin_bound(200, 10, 0.1) < plugin_bound(100, 10, 0.1));
  CHECK(plugin_bound(100, 20, 0.1) > plugin_bound(100, 10, 0.1));
  CHECK(plugin_bound(100, 10, 0.01) > plugin_bound(100, 10, 0.1));

  for (double bad : {0.0, 1.0, -0.5, 2.0}) {
    try {
      plugin_bound(10, 10, bad);
      FAIL("expected BadDelta");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kBadDelta);
    }
  }
}

TEST_CASE("synth_distribution shapes") {
  SynthParams params;
  SUBCASE("uniform") {
    const auto h = synth_distribution(Shape::kUniform, 10, params, 1);
    for (Index t = 1; t <= 10; ++t) CHECK(h.p(t) == doctest::Approx(0.1));
  }
  SUBCASE("end spike holds its mass in the last window") {
    params.spike_mass = 0.9;
    params.spike_width = 5;
    const auto h = synth_distribution(Shape::kEndSpike, 100, params, 42);
    CHECK(1.0 - h.prefix_mass(95) >= 0.9 - 1e-12);
  }
  SUBCASE("head heavy holds its mass in the first window") {
    params.head_mass = 0.7;
    params.head_width = 20;
    const auto h = synth_distribution(Shape::kHeadHeavy, 400, params, 5);
    CHECK(h.prefix_mass(20) >= 0.7 - 1e-12);
  }
  SUBCASE("multimodal is deterministic in the seed") {
    params.n_modes = 3;
    const auto a = synth_distribution(Shape::kMultimodal, 1000, params, 9);
    const auto b = synth_distribution(Shape::kMultimodal, 1000, params, 9);
    const auto c = synth_distribution(Shape::kMultimodal, 1000, params, 10);
    CHECK(a.mass() == b.mass());
    CHECK(tv_distance(a, c) > 0.0);
  }
  SUBCASE("bad parameters") {
    params.spike_mass = 1.5;
    CHECK_THROWS_AS(synth_distribution(Shape::kEndSpike, 100, params, 1), Error);
    params.spike_mass = 0.5;
    params.spike_width = 101;
    CHECK_THROWS_AS(synth_distribution(Shape::kEndSpike, 100, params, 1), Error);
    params.head_mass = 0.0;
    CHECK_THROWS_AS(synth_distribution(Shape::kHeadHeavy, 100, params, 1), Error);
    CHECK_THROWS_AS(synth_distribution(Shape::kUniform, 1, SynthParams{}, 1), Error);
  }
  CHECK(parse_shape("end_spike") == Shape::kEndSpike);
  CHECK(to_string(Shape::kHeadHeavy) == "head_heavy");
  CHECK_THROWS_AS(parse_shape("zipf"), Error);
}

TEST_CASE("sample_depth follows the inverse CDF") {
  const auto h = hist({0, 1, 0, 3});
  CHECK(sample_depth(h, 0.0) == 2);
  CHECK(sample_depth(h, 0.2499) == 2);
  CHECK(sample_depth(h, 0.25) == 4);
  CHECK(sample_depth(h, 0.999999) == 4);
  CHECK(sample_depth(h, 1.0) == 4);
}
