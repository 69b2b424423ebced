/*
 * Copyright (c) 2026 The lecopt Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <limits>
#include <random>

#include <doctest.h>

#include "lecopt/distribution.hpp"
#include "lecopt/error.hpp"

using namespace lecopt;

namespace {

Distribution random_distribution(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> value(1.0, 1000.0);
  std::uniform_real_distribution<double> weight(0.01, 1.0);
  std::vector<std::pair<double, double>> masses;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    masses.emplace_back(value(rng), weight(rng));
    total += masses.back().second;
  }
  for (auto& m : masses) {
    m.second /= total;
  }
  return discrete(std::move(masses));
}

} // namespace

TEST_SUITE("distribution") {

TEST_CASE("point mass") {
  const Distribution d = point(2000);
  REQUIRE(d.size() == 1);
  CHECK(d[0].rep == 2000);
  CHECK(d[0].lo == 2000);
  CHECK(d[0].hi > 2000);
  CHECK(d[0].prob == 1.0);
  CHECK(expectation(point(5)) == 5);
  CHECK_THROWS_AS(point(-1), DomainError);
  CHECK_THROWS_AS(point(std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("expectation") {
  CHECK(expectation(discrete({{700, 0.2}, {2000, 0.8}})) == 1740);
  CHECK(expectation(discrete({{1, 0.5}, {3, 0.5}})) == 2);
}

TEST_CASE("construction validates buckets") {
  CHECK_THROWS_AS(Distribution(std::vector<Bucket>{}), ValidationError);
  CHECK_THROWS_AS(Distribution({{0, 10, 11, 1.0}}), ValidationError);   // rep >= hi
  CHECK_THROWS_AS(Distribution({{0, 10, 5, 0.5}, {5, 20, 6, 0.5}}),
                  ValidationError);                                       // overlap
  CHECK_THROWS_AS(Distribution({{0, 10, 5, -0.1}, {10, 20, 15, 1.1}}),
                  ValidationError);
  CHECK_THROWS_AS(Distribution({{0, 10, 5, 0.5}, {10, 20, 15, 0.4}}),
                  ValidationError);

  // Within 1e-6 of one: renormalized.
  const Distribution d({{0, 10, 5, 0.5}, {10, 20, 15, 0.5000004}});
  CHECK(d[0].prob + d[1].prob == doctest::Approx(1.0).epsilon(1e-15));

  const Distribution open({{0, 1000, 700, 0.2},
                           {1000, std::numeric_limits<double>::infinity(), 2000, 0.8}});
  CHECK(open.max_rep() == 2000);
}

TEST_CASE("discrete merges equal values") {
  const Distribution d = discrete({{2, 0.25}, {1, 0.25}, {2, 0.5}});
  REQUIRE(d.size() == 2);
  CHECK(d[0].rep == 1);
  CHECK(d[1].rep == 2);
  CHECK(d[1].prob == 0.75);
}

TEST_CASE("prefix tables") {
  const Distribution d = discrete({{700, 0.2}, {2000, 0.8}});
  const std::vector<double> t = {1000};
  const PrefixTables p = prefix_tables(d, t);
  CHECK(p.geq_at(700) == 1.0);
  CHECK(p.geq_at(2000) == 0.8);
  CHECK(p.leq_at[p.threshold_index(1000)] == 0.2);
  REQUIRE(p.cond_mean_leq[0].has_value());
  CHECK(*p.cond_mean_leq[0] == 700);
  CHECK(*p.cond_mean_geq[0] == 2000);

  const std::vector<double> below = {100};
  const PrefixTables q = prefix_tables(d, below);
  CHECK(q.leq_at[0] == 0.0);
  CHECK_FALSE(q.cond_mean_leq[0].has_value());
  CHECK(*q.cond_mean_geq[0] == 1740);

  const std::vector<double> unsorted = {5, 1};
  CHECK_THROWS_AS(prefix_tables(d, unsorted), UsageError);
  CHECK_THROWS_AS(p.geq_at(701), UsageError);
}

TEST_CASE("prefix tables on random distributions") {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 50; ++iter) {
    const Distribution d = random_distribution(rng, 1 + iter % 20);
    std::vector<double> t = {0, 100, 250, 500, 750, 2000};
    const PrefixTables p = prefix_tables(d, t);
    CHECK(p.geq.front() == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 1; i < p.geq.size(); ++i) {
      CHECK(p.geq[i] <= p.geq[i - 1]);
    }
    for (std::size_t i = 1; i < p.leq_at.size(); ++i) {
      CHECK(p.leq_at[i] >= p.leq_at[i - 1]);
    }
    CHECK(p.visits <= 2 * (d.size() + t.size()) + d.size());
  }
}

TEST_CASE("advance") {
  const TransitionModel t({1, 2}, {{0.5, 0.5}, {0, 1}});
  const Distribution d = discrete({{1, 1.0}, {2, 0.0}});
  const Distribution next = advance(d, t);
  CHECK(next[0].prob == 0.5);
  CHECK(next[1].prob == 0.5);

  const Distribution e = discrete({{1, 0.3}, {2, 0.7}});
  CHECK(advance(e, TransitionModel::identity({1, 2})) == e);

  // Stationary vector of [[0.9, 0.1], [0.3, 0.7]] is (0.75, 0.25).
  const TransitionModel chain({1, 2}, {{0.9, 0.1}, {0.3, 0.7}});
  const Distribution pi = discrete({{1, 0.75}, {2, 0.25}});
  const Distribution moved = advance(pi, chain);
  CHECK(moved[0].prob == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(moved[1].prob == doctest::Approx(0.25).epsilon(1e-15));

  CHECK_THROWS_AS(advance(discrete({{1, 0.5}, {3, 0.5}}), chain), UsageError);
}

TEST_CASE("advance converges to the stationary mean") {
  const TransitionModel chain({100, 400}, {{0.6, 0.4}, {0.2, 0.8}});
  // pi = (1/3, 2/3), mean 300.
  const Distribution d = advance(discrete({{100, 1.0}, {400, 0.0}}), chain, 200);
  CHECK(std::abs(expectation(d) - 300.0) <= 1e-6);
  double total = 0.0;
  for (const Bucket& b : d.buckets()) {
    total += b.prob;
  }
  CHECK(std::abs(total - 1.0) <= 1e-12);
}

TEST_CASE("transition model validation") {
  CHECK_THROWS_AS(TransitionModel({2, 1}, {{1, 0}, {0, 1}}), ValidationError);
  CHECK_THROWS_AS(TransitionModel({1, 2}, {{1, 0}}), ValidationError);
  CHECK_THROWS_AS(TransitionModel({1, 2}, {{0.5, 0.4}, {0, 1}}), ValidationError);
  CHECK_THROWS_AS(TransitionModel({1, 2}, {{1.5, -0.5}, {0, 1}}), ValidationError);
}

TEST_CASE("product distribution") {
  const Distribution r = product_distribution(discrete({{10, 0.5}, {20, 0.5}}),
                                              point(3), point(0.1));
  REQUIRE(r.size() == 2);
  CHECK(r[0].rep == 3);
  CHECK(r[1].rep == 6);
  CHECK(r[0].prob == 0.5);

  CHECK(product_distribution(point(4), point(5), point(0.5)) == point(10));

  const Distribution u = discrete({{1, 0.5}, {2, 0.5}});
  const Distribution s = product_distribution(u, u, point(1));
  REQUIRE(s.size() == 3);
  CHECK(s[0].rep == 1);
  CHECK(s[0].prob == 0.25);
  CHECK(s[1].rep == 2);
  CHECK(s[1].prob == 0.5);
  CHECK(s[2].rep == 4);
  CHECK(s[2].prob == 0.25);
}

TEST_CASE("product mean is the product of means") {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 50; ++iter) {
    const Distribution a = random_distribution(rng, 1 + iter % 7);
    const Distribution b = random_distribution(rng, 1 + iter % 5);
    const Distribution s = discrete({{0.01, 0.5}, {0.02, 0.5}});
    const double want = expectation(a) * expectation(b) * expectation(s);
    CHECK(std::abs(expectation(product_distribution(a, b, s)) - want) <=
          1e-9 * want);
  }
}

TEST_CASE("snap_integral") {
  CHECK(snap_integral(2999.9999999999995) == 3000);
  CHECK(snap_integral(3.0000000000000004) == 3);
  CHECK(snap_integral(2.5) == 2.5);
  CHECK(snap_integral(1e-12) == 1e-12);
  CHECK(snap_integral(0.0) == 0.0);
}

TEST_CASE("rebucket") {
  const Distribution d = discrete({{1, 0.25}, {2, 0.25}, {3, 0.25}, {4, 0.25}});
  const Distribution r = rebucket(d, 2);
  REQUIRE(r.size() == 2);
  CHECK(r[0].rep == 1.5);
  CHECK(r[0].prob == 0.5);
  CHECK(r[1].rep == 3.5);
  CHECK(r[1].prob == 0.5);
  CHECK(rebucket(d, 4) == d);
  CHECK(rebucket(d, 9) == d);
  CHECK_THROWS_AS(rebucket(d, 0), UsageError);
}

TEST_CASE("rebucket keeps mass and mean and is idempotent") {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 100; ++iter) {
    const Distribution d = random_distribution(rng, 1 + iter % 40);
    const std::size_t k = 1 + static_cast<std::size_t>(iter % 9);
    const Distribution r = rebucket(d, k);
    CHECK(r.size() <= k);
    CHECK(std::abs(expectation(r) - expectation(d)) <= 1e-9 * expectation(d));
    double total = 0.0;
    for (const Bucket& b : r.buckets()) {
      total += b.prob;
    }
    CHECK(std::abs(total - 1.0) <= 1e-9);
    CHECK(rebucket(r, k) == r);
  }
}

} // TEST_SUITE
