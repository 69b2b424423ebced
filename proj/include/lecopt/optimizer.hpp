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
#include <optional>
#include <span>
#include <vector>

#include "lecopt/catalog.hpp"
#include "lecopt/plan.hpp"

namespace lecopt {

struct OptimizerOptions {
  /// Plans kept per dag node by optimize_lec_b().
  std::size_t top_c = 3;
  /// Algorithms A and B also run the fixed-point optimizer at the mean
  /// memory value, so their pick is never worse than the plan a
  /// mean-value optimizer would choose.
  bool include_mean_candidate = true;
  /// Coalesce the memory distribution per node and per join method at the
  /// method's formula breakpoints before summing (same result, fewer terms).
  bool auto_memory_buckets = false;
  /// Algorithm D: bucket budget for result-size distributions; nullopt keeps
  /// the exact product distributions.
  std::optional<std::size_t> size_buckets = 16;
  /// Algorithm D: rebucket each product input to cbrt(budget) buckets before
  /// multiplying instead of rebucketing the product afterwards.
  bool cube_root_rebucket = false;
  /// Largest query the subset dynamic programs accept.
  std::size_t max_relations = 16;
};

/// Work counters reported by the optimizers.
struct OptimizerStats {
  std::size_t fixed_point_runs = 0;   // System R invocations (A, B)
  std::size_t candidates = 0;         // distinct plans costed under the env
  std::size_t join_evaluations = 0;   // expected-cost evaluations of a join
};

struct TopCItem {
  double sum = 0.0;
  std::size_t left = 0;   // 0-based index into the left list
  std::size_t right = 0;  // 0-based index into the right list
};

struct TopCResult {
  std::vector<TopCItem> items;  // ascending by (sum, left, right)
  std::size_t examined = 0;
};

/// The c smallest pairwise sums left[i] + right[k] of two ascending lists.
/// Only pairs with (i+1)(k+1) <= c are examined: any other pair is beaten
/// by at least c pairs that dominate it, so at most c(1 + ln c) sums are
/// formed. Throws UsageError for c == 0 or unsorted input.
TopCResult top_c_merge(std::span<const double> left,
                       std::span<const double> right, std::size_t c);

/// System R: least-cost left-deep plan at a fixed memory value with sizes
/// and selectivities at their means. `expected_cost` holds the cost at that
/// point.
Plan optimize_lsc(const Catalog& catalog, const QuerySpec& query,
                  double memory, const OptimizerOptions& options = {});

/// The `c` cheapest plans at a fixed memory value, ascending by
/// (cost, tie-break order).
std::vector<Plan> optimize_top_c(const Catalog& catalog, const QuerySpec& query,
                                 double memory, std::size_t c,
                                 const OptimizerOptions& options = {});

/// Algorithm A: one fixed-point run per memory representative; returns the
/// candidate of least expected cost. Static environments only.
Plan optimize_lec_a(const Catalog& catalog, const QuerySpec& query,
                    const Environment& env, const OptimizerOptions& options = {},
                    OptimizerStats* stats = nullptr);

/// Algorithm B: as A, but each run keeps the top `c` plans per dag node.
Plan optimize_lec_b(const Catalog& catalog, const QuerySpec& query,
                    const Environment& env, std::size_t c,
                    const OptimizerOptions& options = {},
                    OptimizerStats* stats = nullptr);

/// Algorithm C: subset dynamic program keeping the least-expected-cost plan
/// per node. Memory is the only random parameter; sizes and selectivities
/// are at their means. Static environments only.
Plan optimize_lec_c(const Catalog& catalog, const QuerySpec& query,
                    const Environment& env, const OptimizerOptions& options = {},
                    OptimizerStats* stats = nullptr);

/// Algorithm C for memory that evolves between phases: the join at a node
/// of k relations runs in phase k-1 and is costed under the initial
/// distribution advanced k-2 times; the final sort runs one phase later.
Plan optimize_lec_c_dynamic(const Catalog& catalog, const QuerySpec& query,
                            const Environment& env,
                            const OptimizerOptions& options = {},
                            OptimizerStats* stats = nullptr);

/// Algorithm D: sizes and selectivities carried as distributions. Each
/// node keeps a result-size distribution (product of the left size, the
/// accessed relation's size and the combined selectivity, rebucketed to
/// `options.size_buckets`); join expectations use the linear-time
/// evaluators where available. Static environments only.
Plan optimize_lec_d(const Catalog& catalog, const QuerySpec& query,
                    const Environment& env, const OptimizerOptions& options = {},
                    OptimizerStats* stats = nullptr);

/// Expected cost of `plan` with memory drawn from `env` (static or
/// dynamic) and sizes/selectivities at their means.
CostBreakdown expected_plan_cost(const Plan& plan, const Catalog& catalog,
                                 const QuerySpec& query, const Environment& env);

} // namespace lecopt
