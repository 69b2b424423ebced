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

#include <cstddef>
#include <vector>

#include "lecopt/catalog.hpp"
#include "lecopt/plan.hpp"

namespace lecopt {

/// Limits of the brute-force oracle. Exceeding either raises RefusalError.
struct OracleOptions {
  std::size_t max_relations = 7;
  /// Largest number of parameter-space points summed for one plan.
  std::size_t max_space = 1u << 22;
  /// Hold sizes and selectivities at their means, leaving memory as the
  /// only random parameter.
  bool collapse_sizes = false;
};

/// Every left-deep plan for `query`: join orders in lexicographic order,
/// methods varying fastest, the final sort set by the ordering rule.
/// Annotations are zero.
std::vector<Plan> enumerate_left_deep(const QuerySpec& query,
                                      const OracleOptions& options = {});

/// Exact expectation of the plan's cost over the joint space of relation
/// sizes, selectivities and memory. Static memory is a single draw shared
/// by all phases; dynamic memory ranges over every state sequence of the
/// chain. `per_phase` holds each phase's expectation.
CostBreakdown exact_expected_cost(const Plan& plan, const Catalog& catalog,
                                  const QuerySpec& query, const Environment& env,
                                  const OracleOptions& options = {});

/// All enumerated plans annotated with their exact expected cost, cheapest
/// first; equal costs are ordered by shape_less.
std::vector<Plan> oracle_ranking(const Catalog& catalog, const QuerySpec& query,
                                 const Environment& env,
                                 const OracleOptions& options = {});

/// First entry of oracle_ranking().
Plan oracle_best(const Catalog& catalog, const QuerySpec& query,
                 const Environment& env, const OracleOptions& options = {});

} // namespace lecopt
