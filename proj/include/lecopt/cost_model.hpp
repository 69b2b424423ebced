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

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "lecopt/distribution.hpp"

namespace lecopt {

/// Binary join algorithms. The declaration order is the tie-break order
/// used by every optimizer.
enum class JoinMethod { SortMerge, GraceHash, PageNestedLoop };

inline constexpr std::array<JoinMethod, 3> kAllJoinMethods = {
    JoinMethod::SortMerge, JoinMethod::GraceHash, JoinMethod::PageNestedLoop};

std::string_view to_string(JoinMethod m);
/// Throws ValidationError for an unknown name.
JoinMethod join_method_from_string(std::string_view name);

/// Only sort-merge leaves its output ordered on the join column.
constexpr bool emits_sorted(JoinMethod m) {
  return m == JoinMethod::SortMerge;
}

/// Cost of a plan under one parameter setting, in page I/Os.
struct CostBreakdown {
  double total = 0.0;
  std::vector<double> per_phase;
};

// Deterministic cost formulas. Sizes and memory are in pages; `a` is the
// left (outer) input, `b` the right. All throw DomainError on non-positive
// arguments.

/// 2(a+b) if m > sqrt(L), 4(a+b) if cbrt(L) < m <= sqrt(L), 6(a+b) otherwise;
/// L = max(a, b).
double cost_sort_merge(double a, double b, double m);

/// a+b if m >= S+2, a + a*b otherwise; S = min(a, b).
double cost_nested_loop(double a, double b, double m);

/// Sort-merge's three cases keyed to S = min(a, b): partitioning the smaller
/// input is what the hash join's pass count depends on.
double cost_grace_hash(double a, double b, double m);

/// External sort of r pages: 0 for an empty input, 2r if it fits in memory,
/// 4r if sqrt(r) < m < r, 6r if m <= sqrt(r).
double cost_external_sort(double r, double m);

double join_cost(JoinMethod method, double a, double b, double m);

/// Pages produced by joining inputs of `left` and `right` pages whose
/// predicates have combined selectivity `sigma`.
double join_result_pages(double left, double right, double sigma);

/// Naive expectation: sum over every (m, a, b) triple of representatives.
/// `visits`, when given, accumulates the number of formula evaluations.
double expected_cost_generic(JoinMethod method, const Distribution& mem,
                             const Distribution& a, const Distribution& b,
                             std::size_t* visits = nullptr);

/// Expected sort-merge cost in time linear in the total bucket count: the
/// expectation is split on |A| <= |B| (ties go here) and |A| > |B|, and each
/// half is one sweep over the larger input's buckets with prefix sums of
/// the other input and monotone memory thresholds.
double expected_cost_sort_merge_fast(const Distribution& mem,
                                     const Distribution& a,
                                     const Distribution& b,
                                     std::size_t* visits = nullptr);

/// Nested-loop counterpart of expected_cost_sort_merge_fast(); thresholds
/// are min(a,b)+2 and the tail moments of the larger input.
double expected_cost_nested_loop_fast(const Distribution& mem,
                                      const Distribution& a,
                                      const Distribution& b,
                                      std::size_t* visits = nullptr);

/// Linear-time evaluator where one exists, generic otherwise.
double expected_join_cost(JoinMethod method, const Distribution& mem,
                          const Distribution& a, const Distribution& b);

/// Expected external-sort cost of a result-size distribution.
double expected_sort_cost(const Distribution& mem, const Distribution& r);

/// Memory values at which `method`'s cost changes for some pair of size
/// representatives: {cbrt(L), sqrt(L)} for sort-merge, {S+2} for nested
/// loop, {cbrt(S), sqrt(S)} for Grace hash. Sorted, duplicates removed.
std::vector<double> derive_memory_buckets(JoinMethod method,
                                          const Distribution& a,
                                          const Distribution& b);

/// Coalesces `mem` so that each bucket is one branch of `method`'s formula
/// for every size pair behind `breakpoints`. Expected costs computed with
/// the result equal those computed with `mem`.
Distribution coalesce_memory(JoinMethod method, const Distribution& mem,
                             const std::vector<double>& breakpoints);

} // namespace lecopt
