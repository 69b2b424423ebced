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

#include "lecopt/plan.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "lecopt/error.hpp"

namespace lecopt {

bool requires_final_sort(const QuerySpec& query,
                         std::span<const std::string> order,
                         std::span<const JoinMethod> methods) {
  if (!query.sorted_result) {
    return false;
  }
  if (methods.empty()) {
    return true;
  }
  return !(emits_sorted(methods.back()) &&
           sort_merge_satisfies_order(query, order.back()));
}

Plan make_plan(const QuerySpec& query, std::vector<std::string> order,
               std::vector<JoinMethod> methods) {
  Plan p;
  p.final_sort = requires_final_sort(query, order, methods);
  p.order = std::move(order);
  p.methods = std::move(methods);
  return p;
}

void validate(const Plan& plan, const QuerySpec& query) {
  std::vector<std::string> a = plan.order, b = query.relations;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) {
    throw ValidationError("plan order is not a permutation of the query's relations",
                          "/order");
  }
  if (plan.methods.size() + 1 != plan.order.size()) {
    throw ValidationError("plan needs exactly one method per join", "/methods");
  }
  if (plan.final_sort != requires_final_sort(query, plan.order, plan.methods)) {
    throw ValidationError("final_sort does not match the query's ordering rule",
                          "/final_sort");
  }
}

bool same_shape(const Plan& a, const Plan& b) {
  return a.order == b.order && a.methods == b.methods &&
         a.final_sort == b.final_sort;
}

bool shape_less(const Plan& a, const Plan& b) {
  if (a.order != b.order) {
    return a.order < b.order;
  }
  if (a.methods != b.methods) {
    return a.methods < b.methods;
  }
  return a.final_sort < b.final_sort;
}

std::size_t memory_phases(const Plan& plan) {
  return plan.join_count() + (plan.final_sort ? 1 : 0);
}

CostBreakdown plan_cost(const Plan& plan, const QuerySpec& query,
                        const Realization& v) {
  if (v.selectivities.size() != query.predicates.size()) {
    throw UsageError("realization needs one selectivity per predicate");
  }
  if (v.memory.size() < memory_phases(plan)) {
    throw UsageError("realization needs one memory value per phase");
  }
  auto pages_of = [&](const std::string& name) {
    auto it = v.pages.find(name);
    if (it == v.pages.end()) {
      throw UsageError("realization has no page count for '" + name + "'");
    }
    return it->second;
  };

  CostBreakdown out;
  double size = pages_of(plan.order.front());
  std::set<std::string> joined = {plan.order.front()};
  if (plan.methods.empty()) {
    out.per_phase.push_back(size);
  }
  for (std::size_t k = 0; k < plan.methods.size(); ++k) {
    const std::string& next = plan.order[k + 1];
    const double right = pages_of(next);
    out.per_phase.push_back(join_cost(plan.methods[k], size, right, v.memory[k]));

    double sigma = 1.0;
    for (std::size_t i = 0; i < query.predicates.size(); ++i) {
      const Predicate& p = query.predicates[i];
      if ((p.left == next && joined.contains(p.right)) ||
          (p.right == next && joined.contains(p.left))) {
        sigma = snap_integral(sigma * v.selectivities[i]);
      }
    }
    size = join_result_pages(size, right, sigma);
    joined.insert(next);
  }
  if (plan.final_sort) {
    out.per_phase.push_back(cost_external_sort(size, v.memory[plan.join_count()]));
  }
  for (double c : out.per_phase) {
    out.total += c;
  }
  return out;
}

namespace {

void render(const Plan& plan, std::size_t joins, const std::string& prefix,
            const std::string& branch, std::ostringstream& os) {
  if (joins == 0) {
    os << prefix << branch << "Scan " << plan.order.front() << '\n';
    return;
  }
  os << prefix << branch << to_string(plan.methods[joins - 1]) << '\n';
  std::string child = prefix;
  if (!branch.empty()) {
    child += branch == "|-- " ? "|   " : "    ";
  }
  render(plan, joins - 1, child, "|-- ", os);
  os << child << "`-- Scan " << plan.order[joins] << '\n';
}

} // namespace

std::string to_text(const Plan& plan) {
  std::ostringstream os;
  std::string prefix;
  std::string branch;
  if (plan.final_sort) {
    os << "Sort\n";
    branch = "`-- ";
  }
  render(plan, plan.join_count(), prefix, branch, os);
  return os.str();
}

} // namespace lecopt
