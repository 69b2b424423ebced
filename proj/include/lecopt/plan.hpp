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

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "lecopt/catalog.hpp"
#include "lecopt/cost_model.hpp"

namespace lecopt {

/// Left-deep join plan ((order[0] JOIN order[1]) JOIN order[2]) ... with one
/// method per join and an optional trailing sort. Access paths are full
/// scans whose I/O is already inside the join formulas; a lone relation is
/// charged one scan.
struct Plan {
  std::vector<std::string> order;
  std::vector<JoinMethod> methods;
  bool final_sort = false;

  // Annotations filled in by whoever produced the plan.
  double expected_cost = 0.0;
  std::vector<double> per_phase_costs;

  std::size_t join_count() const noexcept { return methods.size(); }
};

/// Whether a plan with this shape must end with an explicit sort.
bool requires_final_sort(const QuerySpec& query,
                         std::span<const std::string> order,
                         std::span<const JoinMethod> methods);

/// Plan with `final_sort` set by the query's ordering rule and no
/// annotations.
Plan make_plan(const QuerySpec& query, std::vector<std::string> order,
               std::vector<JoinMethod> methods);

/// Throws ValidationError when `plan` is not a left-deep plan for `query`.
void validate(const Plan& plan, const QuerySpec& query);

/// Equal order, methods and sort flag; annotations are ignored.
bool same_shape(const Plan& a, const Plan& b);

/// Deterministic tie-break between equal-cost plans: lexicographically
/// smaller join order, then methods in declaration order of JoinMethod.
bool shape_less(const Plan& a, const Plan& b);

/// Number of phases that consume memory: one per join plus the final sort.
/// The sort always runs in phase join_count().
std::size_t memory_phases(const Plan& plan);

/// One point of the parameter space.
struct Realization {
  std::map<std::string, double, std::less<>> pages;
  std::vector<double> selectivities;  // one per query predicate
  std::vector<double> memory;         // one per memory phase
};

/// C(P, v): deterministic cost of `plan` under `v`, split into phases (the
/// joins in order, then the sort; a single scan for a one-relation plan).
CostBreakdown plan_cost(const Plan& plan, const QuerySpec& query,
                        const Realization& v);

/// Human-readable tree, root first.
std::string to_text(const Plan& plan);

} // namespace lecopt
