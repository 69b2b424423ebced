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

#include <algorithm>
#include <random>
#include <string>

#include <doctest.h>

#include "lecopt/error.hpp"
#include "lecopt/optimizer.hpp"
#include "lecopt/oracle.hpp"
#include "support/instances.hpp"

using namespace lecopt;

namespace {

const std::string kFixtures = LECOPT_FIXTURES;

struct Example1 {
  Catalog catalog = load_catalog(kFixtures + "/example1/catalog.json");
  QuerySpec query = load_query(kFixtures + "/example1/query.json", catalog);
  Environment env = load_environment(kFixtures + "/example1/env.json");
};

bool is_plan1(const Plan& p) {
  return p.methods == std::vector<JoinMethod>{JoinMethod::SortMerge} && !p.final_sort;
}

bool is_plan2(const Plan& p) {
  return p.methods == std::vector<JoinMethod>{JoinMethod::GraceHash} && p.final_sort;
}

Catalog sized(std::initializer_list<std::pair<const char*, double>> pages) {
  std::vector<Relation> rels;
  for (const auto& [name, n] : pages) {
    rels.push_back(Relation{name, point(n)});
  }
  return Catalog(std::move(rels));
}

} // namespace

TEST_SUITE("optimizer") {

TEST_CASE("lsc on example 1") {
  const Example1 ex;
  for (double m : {2000.0, 1740.0}) {
    const Plan p = optimize_lsc(ex.catalog, ex.query, m);
    CHECK(is_plan1(p));
    CHECK(p.expected_cost == 2800000);
  }
  const Plan low = optimize_lsc(ex.catalog, ex.query, 700);
  CHECK(is_plan2(low));
  CHECK(low.expected_cost == 2812000);
  CHECK(low.per_phase_costs == std::vector<double>{2800000, 12000});
}

TEST_CASE("expected costs of the example 1 plans") {
  const Example1 ex;
  const Plan plan1 = make_plan(ex.query, {"A", "B"}, {JoinMethod::SortMerge});
  const Plan plan2 = make_plan(ex.query, {"A", "B"}, {JoinMethod::GraceHash});
  CHECK(expected_plan_cost(plan1, ex.catalog, ex.query, ex.env).total == 3360000);
  CHECK(expected_plan_cost(plan2, ex.catalog, ex.query, ex.env).total == 2812000);
}

TEST_CASE("lec algorithms on example 1") {
  const Example1 ex;
  OptimizerStats stats;
  const Plan a = optimize_lec_a(ex.catalog, ex.query, ex.env, {}, &stats);
  CHECK(is_plan2(a));
  CHECK(a.expected_cost == 2812000);
  CHECK(stats.fixed_point_runs == 3);  // 700, 2000 and the mean 1740
  CHECK(stats.candidates == 2);

  OptimizerOptions reps_only;
  reps_only.include_mean_candidate = false;
  stats = {};
  CHECK(is_plan2(optimize_lec_a(ex.catalog, ex.query, ex.env, reps_only, &stats)));
  CHECK(stats.fixed_point_runs == 2);

  for (std::size_t c : {1u, 2u, 3u}) {
    const Plan b = optimize_lec_b(ex.catalog, ex.query, ex.env, c);
    CHECK(is_plan2(b));
    CHECK(b.expected_cost == 2812000);
  }
  const Plan c = optimize_lec_c(ex.catalog, ex.query, ex.env);
  CHECK(is_plan2(c));
  CHECK(c.expected_cost == 2812000);
  CHECK(c.per_phase_costs == std::vector<double>{2800000, 12000});

  const Plan d = optimize_lec_d(ex.catalog, ex.query, ex.env);
  CHECK(is_plan2(d));
  CHECK(d.expected_cost == 2812000);
}

TEST_CASE("top-c at a fixed point") {
  const Example1 ex;
  const std::vector<Plan> top = optimize_top_c(ex.catalog, ex.query, 2000, 3);
  REQUIRE(top.size() == 3);
  // Sort-merge from either side, then grace hash plus the sort.
  CHECK(is_plan1(top[0]));
  CHECK(top[0].order == std::vector<std::string>{"A", "B"});
  CHECK(top[0].expected_cost == 2800000);
  CHECK(is_plan1(top[1]));
  CHECK(top[1].order == std::vector<std::string>{"B", "A"});
  CHECK(top[1].expected_cost == 2800000);
  CHECK(is_plan2(top[2]));
  CHECK(top[2].order == std::vector<std::string>{"A", "B"});
  CHECK(top[2].expected_cost == 2812000);
}

TEST_CASE("single relation") {
  const Catalog c = sized({{"A", 42}});
  QuerySpec q;
  q.relations = {"A"};
  const Environment env(discrete({{10, 0.5}, {100, 0.5}}));
  const Plan p = optimize_lsc(c, q, 10);
  CHECK(p.order == std::vector<std::string>{"A"});
  CHECK(p.methods.empty());
  CHECK(p.expected_cost == 42);
  CHECK(optimize_lec_a(c, q, env).expected_cost == 42);
  CHECK(optimize_lec_b(c, q, env, 2).expected_cost == 42);
  CHECK(optimize_lec_c(c, q, env).expected_cost == 42);
  CHECK(optimize_lec_d(c, q, env).expected_cost == 42);
  q.sorted_result = true;
  // 42 pages: 2r at m >= 42, 4r at sqrt(42) < m < 42.
  CHECK(optimize_lec_c(c, q, env).expected_cost == 42 + 0.5 * 168 + 0.5 * 84);
}

TEST_CASE("usage errors") {
  const Catalog c = sized({{"A", 42}});
  const QuerySpec empty;
  CHECK_THROWS_AS(optimize_lsc(c, empty, 10), UsageError);
  const Environment env(point(10));
  CHECK_THROWS_AS(optimize_lec_c(c, empty, env), UsageError);
  QuerySpec q;
  q.relations = {"A"};
  CHECK_THROWS_AS(optimize_lec_b(c, q, env, 0), UsageError);
  CHECK_THROWS_AS(optimize_lec_c_dynamic(c, q, env), UsageError);
  const Environment dynamic(discrete({{10, 0.5}, {20, 0.5}}),
                            TransitionModel::identity({10, 20}));
  CHECK_THROWS_AS(optimize_lec_a(c, q, dynamic), UsageError);
  CHECK_THROWS_AS(optimize_lec_c(c, q, dynamic), UsageError);
  CHECK_THROWS_AS(optimize_lec_d(c, q, dynamic), UsageError);
  CHECK_THROWS_AS(optimize_lsc(c, q, 0), DomainError);
  q.relations = {"Z"};
  CHECK_THROWS_AS(optimize_lsc(c, q, 10), ReferenceError);
}

TEST_CASE("top_c_merge") {
  const std::vector<double> s = {1, 2, 3};
  const std::vector<double> a = {10, 20, 30};
  const TopCResult r = top_c_merge(s, a, 3);
  REQUIRE(r.items.size() == 3);
  CHECK(r.items[0].sum == 11);
  CHECK(r.items[1].sum == 12);
  CHECK(r.items[2].sum == 13);
  CHECK(r.examined == 5);

  const TopCResult one = top_c_merge(s, a, 1);
  REQUIRE(one.items.size() == 1);
  CHECK(one.items[0].sum == 11);
  CHECK(one.examined == 1);

  CHECK_THROWS_AS(top_c_merge(s, a, 0), UsageError);
  const std::vector<double> unsorted = {3, 1};
  CHECK_THROWS_AS(top_c_merge(unsorted, a, 2), UsageError);
  CHECK(top_c_merge({}, a, 2).items.empty());
}

TEST_CASE("top_c_merge matches brute force on random lists") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> value(0, 50);
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<double> s(8), a(8);
    for (double& x : s) x = value(rng);
    for (double& x : a) x = value(rng);
    std::sort(s.begin(), s.end());
    std::sort(a.begin(), a.end());
    std::vector<double> all;
    for (double x : s) {
      for (double y : a) {
        all.push_back(x + y);
      }
    }
    std::sort(all.begin(), all.end());
    const TopCResult r = top_c_merge(s, a, 8);
    REQUIRE(r.items.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(r.items[i].sum == all[i]);
      CHECK(r.items[i].sum == s[r.items[i].left] + a[r.items[i].right]);
    }
  }
}

TEST_CASE("B is never worse than A") {
  std::mt19937_64 rng(41);
  for (int seed = 0; seed < 50; ++seed) {
    testing::InstanceShape shape;
    shape.relations = 4;
    shape.memory_buckets = 2 + static_cast<std::size_t>(seed % 3);
    const testing::Instance in = testing::random_instance(rng, shape);
    const Plan a = optimize_lec_a(in.catalog, in.query, in.env);
    const Plan b = optimize_lec_b(in.catalog, in.query, in.env, 3);
    CHECK(b.expected_cost <= a.expected_cost);
    const Plan b1 = optimize_lec_b(in.catalog, in.query, in.env, 1);
    CHECK(b1.expected_cost == a.expected_cost);
  }
}

TEST_CASE("point-mass environment reduces C to LSC") {
  std::mt19937_64 rng(13);
  for (int seed = 0; seed < 20; ++seed) {
    testing::InstanceShape shape;
    shape.relations = 2 + static_cast<std::size_t>(seed % 4);
    shape.memory_buckets = 1;
    const testing::Instance in = testing::random_instance(rng, shape);
    const double m = in.env.memory().min_rep();
    const Plan lsc = optimize_lsc(in.catalog, in.query, m);
    const Plan c = optimize_lec_c(in.catalog, in.query, in.env);
    CHECK(same_shape(lsc, c));
    CHECK(lsc.expected_cost == c.expected_cost);
  }
}

TEST_CASE("dynamic: identity transition equals static") {
  std::mt19937_64 rng(21);
  for (int seed = 0; seed < 20; ++seed) {
    testing::InstanceShape shape;
    shape.relations = 2 + static_cast<std::size_t>(seed % 4);
    shape.memory_buckets = 2 + static_cast<std::size_t>(seed % 3);
    const testing::Instance in = testing::random_instance(rng, shape);
    const Environment frozen(in.env.memory(),
                             TransitionModel::identity(in.env.memory().reps()));
    const Plan s = optimize_lec_c(in.catalog, in.query, in.env);
    const Plan d = optimize_lec_c_dynamic(in.catalog, in.query, frozen);
    CHECK(same_shape(s, d));
    CHECK(s.expected_cost == d.expected_cost);
  }
}

TEST_CASE("dynamic: hand-built chain matches the sequence sum") {
  const Catalog c = sized({{"A", 64}, {"B", 16}, {"C", 256}});
  QuerySpec q;
  q.relations = {"A", "B", "C"};
  q.predicates = {Predicate{"A", "B", point(0.0625)}, Predicate{"B", "C", point(0.125)}};
  const Environment env(discrete({{6, 0.25}, {40, 0.75}}),
                        TransitionModel({6, 40}, {{0.5, 0.5}, {0.25, 0.75}}));
  const Plan p = optimize_lec_c_dynamic(c, q, env);
  const Plan best = oracle_best(c, q, env);
  CHECK(p.expected_cost == best.expected_cost);
  CHECK(exact_expected_cost(p, c, q, env).total == p.expected_cost);
  CHECK(expected_plan_cost(p, c, q, env).total == p.expected_cost);
}

TEST_CASE("dynamic: absorbing low memory changes the later method") {
  const Catalog c = sized({{"A", 64}, {"B", 64}, {"C", 64}});
  QuerySpec q;
  q.relations = {"A", "B", "C"};
  q.predicates = {Predicate{"A", "B", point(1.0 / 64)}, Predicate{"B", "C", point(1.0 / 64)}};
  const Environment high(point(1000));
  const Plan s = optimize_lec_c(c, q, high);
  CHECK(s.methods == std::vector<JoinMethod>{JoinMethod::PageNestedLoop,
                                             JoinMethod::PageNestedLoop});
  // Starts at 1000 pages and drops to 8 for good after the first phase.
  const Environment dropping(discrete({{8, 0.0}, {1000, 1.0}}),
                             TransitionModel({8, 1000}, {{1, 0}, {1, 0}}));
  const Plan d = optimize_lec_c_dynamic(c, q, dropping);
  CHECK(d.methods == std::vector<JoinMethod>{JoinMethod::PageNestedLoop,
                                             JoinMethod::SortMerge});
  CHECK(d.expected_cost == 128 + 512);
  CHECK(d.expected_cost == oracle_best(c, q, dropping).expected_cost);
}

TEST_CASE("D with point masses equals C") {
  std::mt19937_64 rng(77);
  for (int seed = 0; seed < 20; ++seed) {
    testing::InstanceShape shape;
    shape.relations = 2 + static_cast<std::size_t>(seed % 5);
    shape.memory_buckets = 1 + static_cast<std::size_t>(seed % 4);
    const testing::Instance in = testing::random_instance(rng, shape);
    const Plan c = optimize_lec_c(in.catalog, in.query, in.env);
    const Plan d = optimize_lec_d(in.catalog, in.query, in.env);
    CHECK(same_shape(c, d));
    CHECK(c.expected_cost == d.expected_cost);
  }
}

TEST_CASE("D with exact propagation matches the joint sum") {
  const Catalog c({Relation{"A", discrete({{64, 0.5}, {512, 0.5}})},
                   Relation{"B", point(8)}});
  QuerySpec q;
  q.relations = {"A", "B"};
  q.predicates = {Predicate{"A", "B", point(1.0 / 64)}};
  q.sorted_result = true;
  const Environment env(discrete({{3, 0.25}, {30, 0.75}}));
  OptimizerOptions exact;
  exact.size_buckets = std::nullopt;
  const Plan d = optimize_lec_d(c, q, env, exact);
  const Plan best = oracle_best(c, q, env);
  CHECK(same_shape(d, best));
  CHECK(d.expected_cost == best.expected_cost);
  // Grace hash 2 * E(a + b) = 592; sort of 8 or 64 pages: 0.5 * 20 + 0.5 * 288.
  CHECK(d.expected_cost == 746);
  CHECK(d.final_sort);

  // Budget 1 replaces the result size by its mean (36 pages): the sort
  // term becomes 162 and the plan stays.
  OptimizerOptions coarse;
  coarse.size_buckets = 1;
  const Plan r = optimize_lec_d(c, q, env, coarse);
  CHECK(same_shape(r, d));
  CHECK(r.expected_cost == 754);
}

TEST_CASE("D options") {
  std::mt19937_64 rng(99);
  for (int seed = 0; seed < 10; ++seed) {
    testing::InstanceShape shape;
    shape.relations = 3 + static_cast<std::size_t>(seed % 3);
    shape.size_buckets = 3;
    shape.selectivity_buckets = 2;
    shape.memory_buckets = 3;
    const testing::Instance in = testing::random_instance(rng, shape);
    OptimizerOptions cube;
    cube.size_buckets = 8;
    cube.cube_root_rebucket = true;
    OptimizerOptions autob;
    autob.auto_memory_buckets = true;
    OptimizerOptions plain;
    const Plan p = optimize_lec_d(in.catalog, in.query, in.env, plain);
    const Plan q = optimize_lec_d(in.catalog, in.query, in.env, autob);
    CHECK(same_shape(p, q));
    CHECK(p.expected_cost == doctest::Approx(q.expected_cost).epsilon(1e-12));
    const Plan r = optimize_lec_d(in.catalog, in.query, in.env, cube);
    CHECK(r.expected_cost > 0);
  }
}

TEST_CASE("auto memory buckets keep C's answer") {
  std::mt19937_64 rng(5);
  for (int seed = 0; seed < 20; ++seed) {
    testing::InstanceShape shape;
    shape.relations = 2 + static_cast<std::size_t>(seed % 4);
    shape.memory_buckets = 4;
    const testing::Instance in = testing::random_instance(rng, shape);
    OptimizerOptions autob;
    autob.auto_memory_buckets = true;
    const Plan p = optimize_lec_c(in.catalog, in.query, in.env);
    const Plan q = optimize_lec_c(in.catalog, in.query, in.env, autob);
    CHECK(same_shape(p, q));
    CHECK(p.expected_cost == q.expected_cost);
  }
}

TEST_CASE("determinism") {
  std::mt19937_64 rng(3);
  testing::InstanceShape shape;
  shape.relations = 5;
  shape.memory_buckets = 3;
  const testing::Instance in = testing::random_instance(rng, shape);
  const Plan first = optimize_lec_c(in.catalog, in.query, in.env);
  for (int i = 0; i < 3; ++i) {
    const Plan again = optimize_lec_c(in.catalog, in.query, in.env);
    CHECK(same_shape(first, again));
    CHECK(first.expected_cost == again.expected_cost);
    CHECK(first.per_phase_costs == again.per_phase_costs);
  }
}

} // TEST_SUITE
