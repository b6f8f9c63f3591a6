// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The eegssl Authors

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "eegssl/common/error.hpp"
#include "eegssl/graphs/graphs.hpp"
#include "eegssl/signal/signal.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace eegssl;
using namespace eegssl::testing;
using namespace eegssl::graphs;
using num::Tensor;

TEST_CASE("standard layout is valid and complete") {
  const auto l = standard_1020_layout();
  CHECK(l.size() == 19);
  CHECK(l.names == signal::standard_channel_names());
  CHECK_NOTHROW(l.validate());
  CHECK(l.index_of("CZ") == 9);
  CHECK(l.positions(l.index_of("CZ"), 2) == doctest::Approx(1.0));
  CHECK_THROWS_AS(l.index_of("XX"), ConfigError);
}

TEST_CASE("layout CSV round trip and validation") {
  testing::TempDir dir("layout");
  const auto l = standard_1020_layout();
  write_layout_csv(dir / "layout.csv", l);
  const auto r = read_layout_csv(dir / "layout.csv");
  CHECK(r.names == l.names);
  CHECK(r.positions == l.positions);
  auto bad = layout_of({{1, 0, 0}, {0, 2, 0}, {0, 0, 1}});
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(build_distance_graph(bad), ConfigError);
}

TEST_CASE("distance graph matches the scalar kernel oracle on random layouts") {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(3, 19));
    const auto l = random_layout(n, rng);
    const double kappa = rng.uniform(0.2, 2.0);
    for (auto mode : {ThresholdMode::distance, ThresholdMode::weight}) {
      const Graph g = build_distance_graph(l, kappa, mode);
      const Tensor want = distance_oracle(l, kappa, mode == ThresholdMode::weight);
      REQUIRE(num::max_abs_diff(g.weights(), want) <= 1e-12);
      REQUIRE(g.weights() == num::ops::transpose(g.weights()));
    }
  }
}

TEST_CASE("distance graph on a three-node layout") {
  const double s = std::sqrt(0.5);
  const auto l = layout_of({{1, 0, 0}, {s, s, 0}, {0, 0, 1}});
  const Graph g = build_distance_graph(l, 0.9);
  const Tensor want = distance_oracle(l, 0.9, false);
  CHECK(num::max_abs_diff(g.weights(), want) <= 1e-12);
  // Only the 45-degree pair lies within kappa.
  CHECK(g.weights()(0, 1) > 0.0);
  CHECK(g.weights()(0, 2) == 0.0);
  CHECK(g.weights()(1, 2) == 0.0);
  CHECK(g.weights()(0, 0) == 1.0);
}

TEST_CASE("coincident nodes get unit weight") {
  const auto l = layout_of({{1, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, -1}});
  const Graph g = build_distance_graph(l, 0.9);
  CHECK(g.weights()(0, 1) == 1.0);
  CHECK(g.weights()(1, 0) == 1.0);
}

TEST_CASE("equal pairwise distances give zero sigma and an error") {
  CHECK_THROWS_AS(build_distance_graph(layout_of({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}})), ConfigError);
  CHECK_THROWS_AS(build_distance_graph(layout_of({{1, 0, 0}, {1, 0, 0}, {1, 0, 0}})), ConfigError);
  CHECK_THROWS_AS(build_distance_graph(layout_of({{1, 0, 0}})), ConfigError);
}

TEST_CASE("pairs beyond the threshold have zero weight") {
  const auto l = standard_1020_layout();
  const Graph g = build_distance_graph(l, 0.9);
  for (std::size_t i = 0; i < l.size(); ++i)
    for (std::size_t j = 0; j < l.size(); ++j) {
      double d = 0.0;
      for (std::size_t k = 0; k < 3; ++k) d += std::pow(l.positions(i, k) - l.positions(j, k), 2);
      if (std::sqrt(d) > 0.9) CHECK(g.weights()(i, j) == 0.0);
      else CHECK(g.weights()(i, j) > 0.0);
    }
}

TEST_CASE("correlation of an exact copy is one and of sin/cos is zero") {
  const std::size_t n = 200;
  Tensor x({3, n});
  for (std::size_t t = 0; t < n; ++t) {
    const double ph = 2.0 * std::numbers::pi * 5.0 * static_cast<double>(t) / n;
    x(0, t) = std::sin(ph);
    x(1, t) = std::sin(ph);
    x(2, t) = std::cos(ph);
  }
  const Tensor w = correlation_weights(x);
  CHECK(w(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(w(0, 2)) < 1e-12);
  CHECK(w(0, 0) == 0.0);
}

TEST_CASE("correlation graph matches brute-force pairwise correlation and top-k") {
  Rng rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(3, 8));
    const auto k = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(n) - 1));
    Tensor x = testing::random_normal({n, 40}, rng);
    // Duplicate a channel to force ties.
    if (rng.bernoulli(0.5)) {
      for (std::size_t t = 0; t < 40; ++t) x(n - 1, t) = x(0, t);
    }
    Tensor raw({n, n});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) raw(i, j) = pearson_abs(x, std::min(i, j), std::max(i, j));
    REQUIRE(num::max_abs_diff(correlation_weights(x), raw) <= 1e-12);

    const Graph g = build_correlation_graph(x, k);
    const Tensor want = top_k_oracle(correlation_weights(x), k);
    REQUIRE(g.weights() == want);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t nonzero = 0;
      for (std::size_t j = 0; j < n; ++j) nonzero += g.weights()(i, j) != 0.0;
      CHECK(nonzero <= k);
      CHECK(g.weights()(i, i) == 0.0);
    }
  }
}

TEST_CASE("four-channel toy with k = 2") {
  const Tensor raw = Tensor::matrix(4, 4, {0.0, 0.9, 0.5, 0.5,
                                           0.9, 0.0, 0.1, 0.8,
                                           0.5, 0.1, 0.0, 0.3,
                                           0.5, 0.8, 0.3, 0.0});
  const Tensor want = Tensor::matrix(4, 4, {0.0, 0.9, 0.5, 0.0,
                                            0.9, 0.0, 0.0, 0.8,
                                            0.5, 0.0, 0.0, 0.3,
                                            0.5, 0.8, 0.0, 0.0});
  CHECK(prune_top_k(raw, 2) == want);
  CHECK(top_k_oracle(raw, 2) == want);
  CHECK_THROWS_AS(prune_top_k(raw, 4), ConfigError);
}

TEST_CASE("correlation weights are invariant under per-channel affine rescaling") {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    Tensor x = testing::random_normal({6, 80}, rng);
    Tensor y = x;
    for (std::size_t c = 0; c < 6; ++c) {
      const double a = rng.uniform(0.01, 100.0), b = rng.uniform(-50.0, 50.0);
      for (std::size_t t = 0; t < 80; ++t) y(c, t) = a * x(c, t) + b;
    }
    CHECK(num::max_abs_diff(correlation_weights(x), correlation_weights(y)) <= 1e-10);
  }
}

TEST_CASE("a constant channel is reported by name") {
  Tensor x({3, 10}, 1.0);
  for (std::size_t t = 0; t < 10; ++t) {
    x(0, t) = static_cast<double>(t);
    x(2, t) = std::sin(static_cast<double>(t));
  }
  try {
    correlation_weights(x, {"FP1", "FP2", "F7"});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("FP2") != std::string::npos);
  }
}

TEST_CASE("transitions match the dense oracle and are row-stochastic") {
  Rng rng(24);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(2, 8));
    const Tensor w = testing::random_weights(n, rng, 0.5);
    const Transitions t = transitions(w);
    REQUIRE(num::max_abs_diff(t.out, transition_oracle(w, false)) <= 1e-15);
    REQUIRE(num::max_abs_diff(t.in, transition_oracle(w, true)) <= 1e-15);
    for (const Tensor* m : {&t.out, &t.in}) {
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += (*m)(i, j);
        REQUIRE((s == 0.0 || std::abs(s - 1.0) <= 1e-12));
      }
    }
  }
}

TEST_CASE("isolated nodes keep zero transition rows") {
  Tensor w({3, 3});
  w(0, 1) = 2.0;
  w(1, 0) = 1.0;
  const Transitions t = transitions(w);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(t.out(2, j) == 0.0);
    CHECK(t.in(2, j) == 0.0);
  }
  CHECK(t.out(0, 1) == 1.0);
}

TEST_CASE("symmetric weights give equal in and out transitions") {
  const Graph g = build_distance_graph(standard_1020_layout(), 0.9);
  CHECK(g.out_transition() == g.in_transition());
}

TEST_CASE("graphs reject negative weights and parse modes") {
  CHECK_THROWS(Graph(Tensor::matrix(2, 2, {0, -1, 1, 0}), GraphMode::correlation));
  CHECK(parse_graph_mode("correlation") == GraphMode::correlation);
  CHECK(parse_threshold_mode("weight") == ThresholdMode::weight);
  CHECK(to_string(GraphMode::distance) == "distance");
  CHECK_THROWS_AS(parse_graph_mode("knn"), ConfigError);
}
