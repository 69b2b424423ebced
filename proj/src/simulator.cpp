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

#include "lecopt/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>

#include "lecopt/error.hpp"
#include "lecopt/io.hpp"

namespace lecopt {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  SplitMix64(std::uint64_t seed, std::uint64_t trial)
      : state_(mix(seed) + trial * kGolden) {}

  std::uint64_t next() {
    state_ += kGolden;
    return mix(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

std::size_t draw(std::span<const double> cumulative, double u) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                               cumulative.size() - 1);
}

std::vector<double> cumulative_of(const Distribution& d) {
  std::vector<double> c;
  double acc = 0.0;
  for (const Bucket& b : d.buckets()) {
    acc += b.prob;
    c.push_back(acc);
  }
  return c;
}

double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) {
    return std::accumulate(x.begin(), x.end(), 0.0);
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

struct Moments {
  double mean = 0.0;
  double std_error = 0.0;
};

Moments moments(std::span<const double> x) {
  Moments m;
  m.mean = pairwise_sum(x) / static_cast<double>(x.size());
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) {
    m.mean = x.front();
    return m;
  }
  if (x.size() > 1) {
    std::vector<double> sq(x.size());
    std::transform(x.begin(), x.end(), sq.begin(), [&](double v) {
      return (v - m.mean) * (v - m.mean);
    });
    const double var = pairwise_sum(sq) / static_cast<double>(x.size() - 1);
    m.std_error = std::sqrt(var / static_cast<double>(x.size()));
  }
  return m;
}

// Draws the memory trajectory from an existing stream.
void fill_trajectory(const Environment& env,
                     const std::vector<double>& initial_cumulative,
                     const std::vector<std::vector<double>>& row_cumulative,
                     SplitMix64& rng, std::vector<double>& out) {
  const auto states = env.memory().buckets();
  std::size_t s = draw(initial_cumulative, rng.uniform());
  out[0] = states[s].rep;
  for (std::size_t k = 1; k < out.size(); ++k) {
    if (env.transition()) {
      s = draw(row_cumulative[s], rng.uniform());
    }
    out[k] = states[s].rep;
  }
}

std::vector<std::vector<double>> row_cumulatives(const Environment& env) {
  std::vector<std::vector<double>> rows;
  if (env.transition()) {
    for (const auto& row : env.transition()->matrix()) {
      std::vector<double> c(row.size());
      std::partial_sum(row.begin(), row.end(), c.begin());
      rows.push_back(std::move(c));
    }
  }
  return rows;
}

} // namespace

std::vector<double> sample_trajectory(const Environment& env, std::size_t phases,
                                      std::uint64_t seed) {
  if (phases == 0) {
    throw UsageError("trajectory needs at least one phase");
  }
  SplitMix64 rng(seed, 0);
  std::vector<double> out(phases);
  fill_trajectory(env, cumulative_of(env.memory()), row_cumulatives(env), rng, out);
  return out;
}

SimReport compare(const std::vector<Plan>& plans, const Catalog& catalog,
                  const QuerySpec& query, const Environment& env,
                  std::size_t trials, std::uint64_t seed) {
  if (plans.empty()) {
    throw UsageError("compare needs at least one plan");
  }
  if (trials == 0) {
    throw UsageError("simulation needs at least one trial");
  }
  validate(query, catalog);
  std::size_t phases = 1;
  for (const Plan& p : plans) {
    validate(p, query);
    phases = std::max(phases, memory_phases(p));
  }

  std::vector<std::vector<double>> size_cum;
  for (const std::string& name : query.relations) {
    size_cum.push_back(cumulative_of(catalog.at(name).pages));
  }
  std::vector<std::vector<double>> sel_cum;
  for (const Predicate& p : query.predicates) {
    sel_cum.push_back(cumulative_of(p.selectivity));
  }
  const std::vector<double> mem_cum = cumulative_of(env.memory());
  const auto rows = row_cumulatives(env);

  std::vector<std::vector<double>> costs(plans.size(), std::vector<double>(trials));
  Realization v;
  v.selectivities.resize(query.predicates.size());
  v.memory.resize(phases);
  for (std::size_t t = 0; t < trials; ++t) {
    SplitMix64 rng(seed, t);
    for (std::size_t i = 0; i < query.relations.size(); ++i) {
      const auto& buckets = catalog.at(query.relations[i]).pages.buckets();
      v.pages.insert_or_assign(query.relations[i],
                               buckets[draw(size_cum[i], rng.uniform())].rep);
    }
    for (std::size_t i = 0; i < query.predicates.size(); ++i) {
      const auto& buckets = query.predicates[i].selectivity.buckets();
      v.selectivities[i] = buckets[draw(sel_cum[i], rng.uniform())].rep;
    }
    fill_trajectory(env, mem_cum, rows, rng, v.memory);
    for (std::size_t p = 0; p < plans.size(); ++p) {
      costs[p][t] = plan_cost(plans[p], query, v).total;
    }
  }

  SimReport report;
  report.trials = trials;
  report.seed = seed;
  std::vector<double> diff(trials);
  for (std::size_t p = 0; p < plans.size(); ++p) {
    SimPlanResult r;
    r.plan = plans[p];
    const Moments m = moments(costs[p]);
    r.mean = m.mean;
    r.std_error = m.std_error;
    for (std::size_t t = 0; t < trials; ++t) {
      diff[t] = costs[p][t] - costs[0][t];
    }
    const Moments d = moments(diff);
    r.mean_diff = d.mean;
    r.diff_std_error = d.std_error;
    report.plans.push_back(std::move(r));
  }
  report.mean = report.plans.front().mean;
  report.std_error = report.plans.front().std_error;
  std::stable_sort(report.plans.begin(), report.plans.end(),
                   [](const SimPlanResult& a, const SimPlanResult& b) {
                     return a.mean < b.mean;
                   });
  return report;
}

SimReport simulate(const Plan& plan, const Catalog& catalog,
                   const QuerySpec& query, const Environment& env,
                   std::size_t trials, std::uint64_t seed) {
  return compare({plan}, catalog, query, env, trials, seed);
}

nlohmann::json to_json(const SimReport& r) {
  nlohmann::json plans = nlohmann::json::array();
  for (const SimPlanResult& p : r.plans) {
    plans.push_back({{"plan", to_json(p.plan)},
                     {"mean", p.mean},
                     {"std_error", p.std_error},
                     {"mean_diff", p.mean_diff},
                     {"diff_std_error", p.diff_std_error}});
  }
  return {{"trials", r.trials}, {"seed", r.seed},       {"rng", r.rng},
          {"mean", r.mean},     {"std_error", r.std_error}, {"plans", plans}};
}

} // namespace lecopt
