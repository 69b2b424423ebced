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

#include "lecopt/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lecopt/error.hpp"

namespace lecopt {
namespace {

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError(std::string(what) + " must be positive and finite, got " +
                      std::to_string(x));
  }
}

void require_positive(const Distribution& d, const char* what) {
  require_positive(d.min_rep(), what);
  require_positive(d.max_rep(), what);
}

// Multiplier for the three-case formulas keyed to `key` pages.
double pass_factor(double key, double m) {
  if (m > std::sqrt(key)) {
    return 2.0;
  }
  if (m > std::cbrt(key)) {
    return 4.0;
  }
  return 6.0;
}

} // namespace

std::string_view to_string(JoinMethod m) {
  switch (m) {
    case JoinMethod::SortMerge:
      return "SortMerge";
    case JoinMethod::GraceHash:
      return "GraceHash";
    case JoinMethod::PageNestedLoop:
      return "PageNestedLoop";
  }
  return "unknown";
}

JoinMethod join_method_from_string(std::string_view name) {
  for (JoinMethod m : kAllJoinMethods) {
    if (to_string(m) == name) {
      return m;
    }
  }
  throw ValidationError("unknown join method '" + std::string(name) + "'");
}

double cost_sort_merge(double a, double b, double m) {
  require_positive(a, "left input size");
  require_positive(b, "right input size");
  require_positive(m, "memory");
  return pass_factor(std::max(a, b), m) * (a + b);
}

double cost_nested_loop(double a, double b, double m) {
  require_positive(a, "left input size");
  require_positive(b, "right input size");
  require_positive(m, "memory");
  return m >= std::min(a, b) + 2.0 ? a + b : a + a * b;
}

double cost_grace_hash(double a, double b, double m) {
  require_positive(a, "left input size");
  require_positive(b, "right input size");
  require_positive(m, "memory");
  return pass_factor(std::min(a, b), m) * (a + b);
}

double cost_external_sort(double r, double m) {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw DomainError("sort input size must be non-negative, got " +
                      std::to_string(r));
  }
  require_positive(m, "memory");
  if (r == 0.0) {
    return 0.0;
  }
  if (m >= r) {
    return 2.0 * r;
  }
  if (m > std::sqrt(r)) {
    return 4.0 * r;
  }
  return 6.0 * r;
}

double join_cost(JoinMethod method, double a, double b, double m) {
  switch (method) {
    case JoinMethod::SortMerge:
      return cost_sort_merge(a, b, m);
    case JoinMethod::GraceHash:
      return cost_grace_hash(a, b, m);
    case JoinMethod::PageNestedLoop:
      return cost_nested_loop(a, b, m);
  }
  throw UsageError("unknown join method");
}

double join_result_pages(double left, double right, double sigma) {
  return snap_integral(left * right * sigma);
}

double expected_cost_generic(JoinMethod method, const Distribution& mem,
                             const Distribution& a, const Distribution& b,
                             std::size_t* visits) {
  double total = 0.0;
  for (const Bucket& m : mem.buckets()) {
    for (const Bucket& x : a.buckets()) {
      for (const Bucket& y : b.buckets()) {
        total += m.prob * x.prob * y.prob * join_cost(method, x.rep, y.rep, m.rep);
      }
    }
  }
  if (visits != nullptr) {
    *visits += mem.size() * a.size() * b.size();
  }
  return total;
}

double expected_cost_sort_merge_fast(const Distribution& mem,
                                     const Distribution& a,
                                     const Distribution& b,
                                     std::size_t* visits) {
  require_positive(a, "left input size");
  require_positive(b, "right input size");
  require_positive(mem, "memory");
  const Cumulative cm(mem), ca(a), cb(b);
  if (visits != nullptr) {
    *visits += cm.size() + ca.size() + cb.size();
  }

  // Expected cost of `sizes` page I/Os per pass when the larger input has
  // `key` pages; both cursors see non-decreasing thresholds because keys
  // arrive ascending.
  auto passes = [&](Cumulative::Cursor& at_sqrt, Cumulative::Cursor& at_cbrt,
                    double key, double sizes) {
    const std::size_t le_sqrt = at_sqrt.seek(std::sqrt(key));
    const std::size_t le_cbrt = at_cbrt.seek(std::cbrt(key));
    const double above = cm.mass_from(le_sqrt);
    const double middle = cm.mass_below(le_sqrt) - cm.mass_below(le_cbrt);
    const double below = cm.mass_below(le_cbrt);
    return 2.0 * sizes * above + 4.0 * sizes * middle + 6.0 * sizes * below;
  };

  double total = 0.0;

  // |A| <= |B|: L = b, and the size sum is E(A; A <= b) + b Pr(A <= b).
  {
    auto m_sqrt = cm.cursor_le(visits);
    auto m_cbrt = cm.cursor_le(visits);
    auto a_le = ca.cursor_le(visits);
    for (std::size_t i = 0; i < cb.size(); ++i) {
      const double bv = cb.reps()[i];
      const std::size_t k = a_le.seek(bv);
      const double sizes = ca.moment_below(k) + bv * ca.mass_below(k);
      total += cb.probs()[i] * passes(m_sqrt, m_cbrt, bv, sizes);
    }
  }
  // |A| > |B|: L = a.
  {
    auto m_sqrt = cm.cursor_le(visits);
    auto m_cbrt = cm.cursor_le(visits);
    auto b_lt = cb.cursor_lt(visits);
    for (std::size_t i = 0; i < ca.size(); ++i) {
      const double av = ca.reps()[i];
      const std::size_t k = b_lt.seek(av);
      const double sizes = cb.moment_below(k) + av * cb.mass_below(k);
      total += ca.probs()[i] * passes(m_sqrt, m_cbrt, av, sizes);
    }
  }
  return total;
}

double expected_cost_nested_loop_fast(const Distribution& mem,
                                      const Distribution& a,
                                      const Distribution& b,
                                      std::size_t* visits) {
  require_positive(a, "left input size");
  require_positive(b, "right input size");
  require_positive(mem, "memory");
  const Cumulative cm(mem), ca(a), cb(b);
  if (visits != nullptr) {
    *visits += cm.size() + ca.size() + cb.size();
  }

  double total = 0.0;

  // |A| <= |B|: S = a. With G = E(B; B >= a) and P = Pr(B >= a) the two
  // branches contribute a P + G and a P + a G.
  {
    auto m_lt = cm.cursor_lt(visits);
    auto b_lt = cb.cursor_lt(visits);
    for (std::size_t i = 0; i < ca.size(); ++i) {
      const double av = ca.reps()[i];
      const std::size_t k = b_lt.seek(av);
      const double p = cb.mass_from(k);
      const double g = cb.moment_from(k);
      const std::size_t j = m_lt.seek(av + 2.0);
      const double fits = cm.mass_from(j);
      const double spills = cm.mass_below(j);
      total += ca.probs()[i] *
               (fits * (av * p + g) + spills * (av * p + av * g));
    }
  }
  // |A| > |B|: S = b. With H = E(A; A > b): H + b Pr(A > b) and H + b H.
  {
    auto m_lt = cm.cursor_lt(visits);
    auto a_le = ca.cursor_le(visits);
    for (std::size_t i = 0; i < cb.size(); ++i) {
      const double bv = cb.reps()[i];
      const std::size_t k = a_le.seek(bv);
      const double p = ca.mass_from(k);
      const double h = ca.moment_from(k);
      const std::size_t j = m_lt.seek(bv + 2.0);
      const double fits = cm.mass_from(j);
      const double spills = cm.mass_below(j);
      total += cb.probs()[i] * (fits * (h + bv * p) + spills * (h + bv * h));
    }
  }
  return total;
}

double expected_join_cost(JoinMethod method, const Distribution& mem,
                          const Distribution& a, const Distribution& b) {
  switch (method) {
    case JoinMethod::SortMerge:
      return expected_cost_sort_merge_fast(mem, a, b);
    case JoinMethod::PageNestedLoop:
      return expected_cost_nested_loop_fast(mem, a, b);
    case JoinMethod::GraceHash:
      return expected_cost_generic(method, mem, a, b);
  }
  throw UsageError("unknown join method");
}

double expected_sort_cost(const Distribution& mem, const Distribution& r) {
  double total = 0.0;
  for (const Bucket& m : mem.buckets()) {
    for (const Bucket& x : r.buckets()) {
      total += m.prob * x.prob * cost_external_sort(x.rep, m.rep);
    }
  }
  return total;
}

std::vector<double> derive_memory_buckets(JoinMethod method,
                                          const Distribution& a,
                                          const Distribution& b) {
  std::vector<double> out;
  for (const Bucket& x : a.buckets()) {
    for (const Bucket& y : b.buckets()) {
      const double large = std::max(x.rep, y.rep);
      const double small = std::min(x.rep, y.rep);
      switch (method) {
        case JoinMethod::SortMerge:
          out.push_back(std::cbrt(large));
          out.push_back(std::sqrt(large));
          break;
        case JoinMethod::GraceHash:
          out.push_back(std::cbrt(small));
          out.push_back(std::sqrt(small));
          break;
        case JoinMethod::PageNestedLoop:
          out.push_back(small + 2.0);
          break;
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Distribution coalesce_memory(JoinMethod method, const Distribution& mem,
                             const std::vector<double>& breakpoints) {
  // Nested loop switches at m >= S+2; the pass-count formulas at m > x.
  const bool closed = method == JoinMethod::PageNestedLoop;
  std::vector<Bucket> out;
  std::size_t last_group = breakpoints.size() + 1;
  for (const Bucket& m : mem.buckets()) {
    const auto it = closed ? std::upper_bound(breakpoints.begin(),
                                              breakpoints.end(), m.rep)
                           : std::lower_bound(breakpoints.begin(),
                                              breakpoints.end(), m.rep);
    const auto group = static_cast<std::size_t>(it - breakpoints.begin());
    if (group == last_group) {
      out.back().hi = m.hi;
      out.back().prob += m.prob;
    } else {
      out.push_back(m);
      last_group = group;
    }
  }
  return Distribution(std::move(out));
}

} // namespace lecopt
