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

#include "lecopt/oracle.hpp"

#include <algorithm>
#include <cassert>
#include <string>

#include "lecopt/error.hpp"

namespace lecopt {
namespace {

// One random axis of the joint space: values with their probabilities.
struct Axis {
  std::vector<double> values;
  std::vector<double> probs;
};

Axis axis_of(const Distribution& d, bool collapse) {
  if (collapse) {
    return Axis{{expectation(d)}, {1.0}};
  }
  Axis a;
  for (const Bucket& b : d.buckets()) {
    a.values.push_back(b.rep);
    a.probs.push_back(b.prob);
  }
  return a;
}

void check_space(std::size_t& space, std::size_t factor, std::size_t limit) {
  if (factor != 0 && space > limit / factor) {
    throw RefusalError("joint parameter space exceeds the oracle limit of " +
                       std::to_string(limit) + " points");
  }
  space *= factor;
}

} // namespace

std::vector<Plan> enumerate_left_deep(const QuerySpec& query,
                                      const OracleOptions& options) {
  validate(query);
  const std::size_t n = query.relations.size();
  if (n == 0) {
    throw UsageError("query joins no relations");
  }
  if (n > options.max_relations) {
    throw RefusalError("oracle enumeration refused: " + std::to_string(n) +
                       " relations exceed the limit of " +
                       std::to_string(options.max_relations));
  }
  std::vector<std::string> order = query.relations;
  std::sort(order.begin(), order.end());
  const std::size_t joins = n - 1;
  std::size_t method_combos = 1;
  for (std::size_t i = 0; i < joins; ++i) {
    method_combos *= kAllJoinMethods.size();
  }

  std::vector<Plan> plans;
  do {
    for (std::size_t code = 0; code < method_combos; ++code) {
      std::vector<JoinMethod> methods(joins);
      std::size_t rest = code;
      for (std::size_t k = joins; k-- > 0;) {
        methods[k] = kAllJoinMethods[rest % kAllJoinMethods.size()];
        rest /= kAllJoinMethods.size();
      }
      plans.push_back(make_plan(query, order, std::move(methods)));
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return plans;
}

CostBreakdown exact_expected_cost(const Plan& plan, const Catalog& catalog,
                                  const QuerySpec& query, const Environment& env,
                                  const OracleOptions& options) {
  validate(query, catalog);
  validate(plan, query);

  std::vector<Axis> axes;
  for (const std::string& name : query.relations) {
    axes.push_back(axis_of(catalog.at(name).pages, options.collapse_sizes));
  }
  for (const Predicate& p : query.predicates) {
    axes.push_back(axis_of(p.selectivity, options.collapse_sizes));
  }
  const std::size_t fixed_axes = axes.size();
  const std::size_t phases = std::max<std::size_t>(memory_phases(plan), 1);
  const Axis memory = axis_of(env.memory(), false);
  const std::size_t memory_axes = env.transition() ? phases : 1;
  for (std::size_t k = 0; k < memory_axes; ++k) {
    axes.push_back(memory);
  }

  std::size_t space = 1;
  for (const Axis& a : axes) {
    check_space(space, a.values.size(), options.max_space);
  }

  Realization v;
  v.selectivities.assign(query.predicates.size(), 0.0);
  v.memory.assign(phases, 0.0);
  std::vector<std::size_t> idx(axes.size(), 0);
  CostBreakdown out;

  for (std::size_t point = 0; point < space; ++point) {
    double prob = 1.0;
    for (std::size_t a = 0; a < fixed_axes; ++a) {
      prob *= axes[a].probs[idx[a]];
    }
    for (std::size_t i = 0; i < query.relations.size(); ++i) {
      v.pages.insert_or_assign(query.relations[i], axes[i].values[idx[i]]);
    }
    for (std::size_t i = 0; i < query.predicates.size(); ++i) {
      const std::size_t a = query.relations.size() + i;
      v.selectivities[i] = axes[a].values[idx[a]];
    }
    if (env.transition()) {
      const TransitionModel& t = *env.transition();
      std::size_t prev = 0;
      for (std::size_t k = 0; k < phases; ++k) {
        const std::size_t s = idx[fixed_axes + k];
        prob *= k == 0 ? memory.probs[s] : t(prev, s);
        v.memory[k] = memory.values[s];
        prev = s;
      }
    } else {
      const std::size_t s = idx[fixed_axes];
      prob *= memory.probs[s];
      std::fill(v.memory.begin(), v.memory.end(), memory.values[s]);
    }

    if (prob != 0.0) {
      const CostBreakdown c = plan_cost(plan, query, v);
      out.per_phase.resize(c.per_phase.size(), 0.0);
      for (std::size_t k = 0; k < c.per_phase.size(); ++k) {
        out.per_phase[k] += prob * c.per_phase[k];
      }
    }

    for (std::size_t a = axes.size(); a-- > 0;) {
      if (++idx[a] < axes[a].values.size()) {
        break;
      }
      idx[a] = 0;
    }
  }
  for (double c : out.per_phase) {
    out.total += c;
  }
  return out;
}

std::vector<Plan> oracle_ranking(const Catalog& catalog, const QuerySpec& query,
                                 const Environment& env,
                                 const OracleOptions& options) {
  std::vector<Plan> plans = enumerate_left_deep(query, options);
  for (Plan& p : plans) {
    const CostBreakdown c = exact_expected_cost(p, catalog, query, env, options);
    p.expected_cost = c.total;
    p.per_phase_costs = c.per_phase;
  }
  std::stable_sort(plans.begin(), plans.end(), [](const Plan& a, const Plan& b) {
    if (a.expected_cost != b.expected_cost) {
      return a.expected_cost < b.expected_cost;
    }
    return shape_less(a, b);
  });
  assert(std::all_of(plans.begin(), plans.end(), [&](const Plan& p) {
    return plans.front().expected_cost <= p.expected_cost;
  }));
  return plans;
}

Plan oracle_best(const Catalog& catalog, const QuerySpec& query,
                 const Environment& env, const OracleOptions& options) {
  return oracle_ranking(catalog, query, env, options).front();
}

} // namespace lecopt
