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

#include "lecopt/optimizer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>

#include "lecopt/error.hpp"

namespace lecopt {
namespace {

using Mask = std::uint32_t;

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
constexpr double kInf = std::numeric_limits<double>::infinity();

bool contains(Mask m, std::size_t i) {
  return (m >> i) & 1u;
}

Mask bit(std::size_t i) {
  return Mask{1} << i;
}

/// Query bound to catalog data, relations indexed in ascending name order
/// so that index order is the tie-break order.
struct Bound {
  struct Pred {
    std::size_t left;
    std::size_t right;
    const Distribution* selectivity;
    double mean;
  };

  const QuerySpec* query = nullptr;
  std::vector<std::string> names;
  std::vector<const Distribution*> pages;
  std::vector<double> mean_pages;
  std::vector<Pred> preds;  // declaration order

  std::size_t n() const { return names.size(); }
  Mask full() const { return static_cast<Mask>((std::uint64_t{1} << n()) - 1); }

  std::size_t index_of(const std::string& name) const {
    auto it = std::lower_bound(names.begin(), names.end(), name);
    if (it == names.end() || *it != name) {
      throw ValidationError("plan references relation '" + name +
                            "' which the query does not join");
    }
    return static_cast<std::size_t>(it - names.begin());
  }

  // Combined mean selectivity between relation j and the set `others`.
  double mean_sigma(std::size_t j, Mask others) const {
    double sigma = 1.0;
    for (const Pred& p : preds) {
      if ((p.left == j && contains(others, p.right)) ||
          (p.right == j && contains(others, p.left))) {
        sigma = snap_integral(sigma * p.mean);
      }
    }
    return sigma;
  }

  std::set<std::string> names_of(Mask m) const {
    std::set<std::string> out;
    for (std::size_t i = 0; i < n(); ++i) {
      if (contains(m, i)) {
        out.insert(names[i]);
      }
    }
    return out;
  }

  bool sort_after(std::size_t last, JoinMethod method) const {
    return query->sorted_result &&
           !(emits_sorted(method) &&
             sort_merge_satisfies_order(*query, names[last]));
  }

  std::vector<std::string> to_names(const std::vector<std::size_t>& order) const {
    std::vector<std::string> out;
    out.reserve(order.size());
    for (std::size_t i : order) {
      out.push_back(names[i]);
    }
    return out;
  }
};

Bound bind(const Catalog& catalog, const QuerySpec& query,
           const OptimizerOptions& options) {
  if (query.relations.empty()) {
    throw UsageError("query joins no relations");
  }
  validate(query, catalog);
  if (query.relations.size() > options.max_relations ||
      query.relations.size() > 31) {
    throw UsageError("query joins " + std::to_string(query.relations.size()) +
                     " relations; the optimizer accepts at most " +
                     std::to_string(std::min<std::size_t>(options.max_relations, 31)));
  }
  Bound b;
  b.query = &query;
  b.names = query.relations;
  std::sort(b.names.begin(), b.names.end());
  for (const std::string& name : b.names) {
    const Relation& r = catalog.at(name);
    b.pages.push_back(&r.pages);
    b.mean_pages.push_back(expectation(r.pages));
  }
  for (const Predicate& p : query.predicates) {
    b.preds.push_back(Bound::Pred{b.index_of(p.left), b.index_of(p.right),
                                  &p.selectivity, expectation(p.selectivity)});
  }
  return b;
}

void require_static(const Environment& env, const char* algorithm) {
  if (env.mode() != MemoryMode::Static) {
    throw UsageError(std::string(algorithm) +
                     " requires a static environment; use the dynamic "
                     "variant of algorithm C for a transition model");
  }
}

// Memory distribution of each phase 0..n-1 (joins, then the sort).
std::vector<Distribution> phase_memory(const Environment& env, std::size_t n) {
  std::vector<Distribution> out;
  out.push_back(env.memory());
  for (std::size_t k = 1; k < std::max<std::size_t>(n, 1); ++k) {
    out.push_back(env.transition() ? advance(out.back(), *env.transition())
                                   : env.memory());
  }
  return out;
}

double expected_join(JoinMethod method, double left, double right,
                     const Distribution& mem, bool auto_buckets) {
  const Distribution* use = &mem;
  std::optional<Distribution> coalesced;
  if (auto_buckets) {
    coalesced = coalesce_memory(
        method, mem,
        derive_memory_buckets(method, point(left), point(right)));
    use = &*coalesced;
  }
  double total = 0.0;
  for (const Bucket& m : use->buckets()) {
    total += m.prob * join_cost(method, left, right, m.rep);
  }
  return total;
}

double expected_sort(double size, const Distribution& mem) {
  double total = 0.0;
  for (const Bucket& m : mem.buckets()) {
    total += m.prob * cost_external_sort(size, m.rep);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Fixed-point dynamic program keeping the top c plans per node.

struct Partial {
  double cost = 0.0;
  double size = 0.0;
  std::vector<std::size_t> order;
  std::vector<JoinMethod> methods;
};

bool partial_less(const Partial& a, const Partial& b) {
  if (a.cost != b.cost) {
    return a.cost < b.cost;
  }
  if (a.order != b.order) {
    return a.order < b.order;
  }
  return a.methods < b.methods;
}

std::vector<Partial> top_c_dp(const Bound& b, double memory, std::size_t c) {
  if (c == 0) {
    throw UsageError("top-c requires c >= 1");
  }
  if (!(memory > 0.0) || !std::isfinite(memory)) {
    throw DomainError("memory must be positive, got " + std::to_string(memory));
  }
  const std::size_t n = b.n();
  if (n == 1) {
    Partial p{b.mean_pages[0], b.mean_pages[0], {0}, {}};
    if (b.query->sorted_result) {
      p.cost += cost_external_sort(p.size, memory);
    }
    return {p};
  }

  const Mask full = b.full();
  std::vector<std::vector<Partial>> lists(std::size_t{full} + 1);
  for (std::size_t j = 0; j < n; ++j) {
    lists[bit(j)] = {Partial{0.0, b.mean_pages[j], {j}, {}}};
  }
  const std::vector<double> access = {0.0};  // one access path: a full scan
  std::vector<double> costs;
  for (Mask mask = 1; mask <= full; ++mask) {
    if (std::popcount(mask) < 2) {
      continue;
    }
    std::vector<Partial> candidates;
    for (std::size_t j = 0; j < n; ++j) {
      if (!contains(mask, j)) {
        continue;
      }
      const Mask rest = mask ^ bit(j);
      const std::vector<Partial>& left = lists[rest];
      costs.clear();
      for (const Partial& p : left) {
        costs.push_back(p.cost);
      }
      const double sigma = b.mean_sigma(j, rest);
      const double right = b.mean_pages[j];
      for (JoinMethod method : kAllJoinMethods) {
        for (const TopCItem& item : top_c_merge(costs, access, c).items) {
          const Partial& sub = left[item.left];
          Partial next;
          next.cost = item.sum + join_cost(method, sub.size, right, memory);
          next.size = join_result_pages(sub.size, right, sigma);
          if (mask == full && b.sort_after(j, method)) {
            next.cost += cost_external_sort(next.size, memory);
          }
          next.order = sub.order;
          next.order.push_back(j);
          next.methods = sub.methods;
          next.methods.push_back(method);
          candidates.push_back(std::move(next));
        }
      }
    }
    std::sort(candidates.begin(), candidates.end(), partial_less);
    if (candidates.size() > c) {
      candidates.resize(c);
    }
    lists[mask] = std::move(candidates);
  }
  return std::move(lists[full]);
}

Realization mean_realization(const Bound& b, const QuerySpec& query,
                             std::size_t phases, double memory) {
  Realization v;
  for (std::size_t i = 0; i < b.n(); ++i) {
    v.pages.emplace(b.names[i], b.mean_pages[i]);
  }
  for (const Predicate& p : query.predicates) {
    v.selectivities.push_back(expectation(p.selectivity));
  }
  v.memory.assign(std::max<std::size_t>(phases, 1), memory);
  return v;
}

Plan to_plan(const Bound& b, const QuerySpec& query, const Partial& p,
             double memory) {
  Plan plan = make_plan(query, b.to_names(p.order), p.methods);
  plan.expected_cost = p.cost;
  plan.per_phase_costs =
      plan_cost(plan, query, mean_realization(b, query, memory_phases(plan), memory))
          .per_phase;
  return plan;
}

// Expected cost of a plan given per-phase memory distributions, sizes at
// their means. Accumulates phase by phase in plan order.
CostBreakdown expected_cost_by_phase(const Bound& b, const Plan& plan,
                                     const std::vector<Distribution>& mem) {
  CostBreakdown out;
  std::size_t first = b.index_of(plan.order.front());
  double size = b.mean_pages[first];
  Mask joined = bit(first);
  if (plan.methods.empty()) {
    out.per_phase.push_back(size);
  }
  for (std::size_t k = 0; k < plan.methods.size(); ++k) {
    const std::size_t j = b.index_of(plan.order[k + 1]);
    const double right = b.mean_pages[j];
    out.per_phase.push_back(
        expected_join(plan.methods[k], size, right, mem[k], false));
    size = join_result_pages(size, right, b.mean_sigma(j, joined));
    joined |= bit(j);
  }
  if (plan.final_sort) {
    out.per_phase.push_back(expected_sort(size, mem[plan.join_count()]));
  }
  for (double c : out.per_phase) {
    out.total += c;
  }
  return out;
}

// Picks the plan of least expected cost among fixed-point candidates.
Plan choose_candidate(const Bound& b, const Environment& env,
                      std::vector<Plan> pool, OptimizerStats* stats) {
  std::vector<Plan> distinct;
  for (Plan& p : pool) {
    const bool seen = std::any_of(distinct.begin(), distinct.end(),
                                  [&](const Plan& q) { return same_shape(p, q); });
    if (!seen) {
      distinct.push_back(std::move(p));
    }
  }
  const auto mem = phase_memory(env, b.n());
  for (Plan& p : distinct) {
    const CostBreakdown cost = expected_cost_by_phase(b, p, mem);
    p.expected_cost = cost.total;
    p.per_phase_costs = cost.per_phase;
  }
  if (stats != nullptr) {
    stats->candidates += distinct.size();
  }
  return *std::min_element(distinct.begin(), distinct.end(),
                           [](const Plan& x, const Plan& y) {
                             if (x.expected_cost != y.expected_cost) {
                               return x.expected_cost < y.expected_cost;
                             }
                             return shape_less(x, y);
                           });
}

std::vector<double> candidate_points(const Environment& env,
                                     const OptimizerOptions& options) {
  std::vector<double> points = env.memory().reps();
  if (options.include_mean_candidate) {
    const double mean = expectation(env.memory());
    if (std::find(points.begin(), points.end(), mean) == points.end()) {
      points.push_back(mean);
    }
  }
  return points;
}

// ---------------------------------------------------------------------------
// Expected-cost dynamic programs (C and D) keep one plan per node.

struct Node {
  double cost = kInf;
  std::size_t last = kNone;
  JoinMethod method = JoinMethod::SortMerge;
  double phase_cost = 0.0;  // expected cost of the join that built the node
  double sort_cost = 0.0;   // root only
  double size = 0.0;        // deterministic size (algorithm C)
};

struct Chain {
  std::vector<std::size_t> order;
  std::vector<JoinMethod> methods;
};

Chain chain_of(const std::vector<Node>& nodes, Mask mask) {
  Chain c;
  while (std::popcount(mask) > 1) {
    const Node& node = nodes[mask];
    c.order.push_back(node.last);
    c.methods.push_back(node.method);
    mask ^= bit(node.last);
  }
  c.order.push_back(static_cast<std::size_t>(std::countr_zero(mask)));
  std::reverse(c.order.begin(), c.order.end());
  std::reverse(c.methods.begin(), c.methods.end());
  return c;
}

// Whether (cost, rest + j, method) beats the node's current best.
bool improves(const std::vector<Node>& nodes, Mask mask, double cost,
              Mask rest, std::size_t j, JoinMethod method) {
  const Node& best = nodes[mask];
  if (cost != best.cost) {
    return cost < best.cost;
  }
  Chain mine = chain_of(nodes, rest);
  mine.order.push_back(j);
  mine.methods.push_back(method);
  const Chain theirs = chain_of(nodes, mask);
  if (mine.order != theirs.order) {
    return mine.order < theirs.order;
  }
  return mine.methods < theirs.methods;
}

Plan node_plan(const Bound& b, const QuerySpec& query,
               const std::vector<Node>& nodes) {
  const Mask full = b.full();
  Chain chain = chain_of(nodes, full);
  Plan plan = make_plan(query, b.to_names(chain.order), chain.methods);
  Mask mask = 0;
  for (std::size_t k = 0; k < chain.order.size(); ++k) {
    mask |= bit(chain.order[k]);
    if (k > 0) {
      plan.per_phase_costs.push_back(nodes[mask].phase_cost);
    }
  }
  if (plan.final_sort) {
    plan.per_phase_costs.push_back(nodes[full].sort_cost);
  }
  plan.expected_cost = nodes[full].cost;
  return plan;
}

Plan lec_c_impl(const Bound& b, const QuerySpec& query,
                const std::vector<Distribution>& mem,
                const OptimizerOptions& options, OptimizerStats* stats) {
  const std::size_t n = b.n();
  if (n == 1) {
    Plan plan = make_plan(query, {b.names[0]}, {});
    plan.per_phase_costs.push_back(b.mean_pages[0]);
    if (plan.final_sort) {
      plan.per_phase_costs.push_back(expected_sort(b.mean_pages[0], mem[0]));
    }
    for (double c : plan.per_phase_costs) {
      plan.expected_cost += c;
    }
    return plan;
  }
  const Mask full = b.full();
  std::vector<Node> nodes(std::size_t{full} + 1);
  for (std::size_t j = 0; j < n; ++j) {
    nodes[bit(j)].cost = 0.0;
    nodes[bit(j)].size = b.mean_pages[j];
  }
  for (Mask mask = 1; mask <= full; ++mask) {
    const int k = std::popcount(mask);
    if (k < 2) {
      continue;
    }
    const Distribution& phase = mem[static_cast<std::size_t>(k) - 2];
    for (std::size_t j = 0; j < n; ++j) {
      if (!contains(mask, j)) {
        continue;
      }
      const Mask rest = mask ^ bit(j);
      const Node& sub = nodes[rest];
      const double right = b.mean_pages[j];
      const double size = join_result_pages(sub.size, right, b.mean_sigma(j, rest));
      for (JoinMethod method : kAllJoinMethods) {
        const double join =
            expected_join(method, sub.size, right, phase, options.auto_memory_buckets);
        if (stats != nullptr) {
          ++stats->join_evaluations;
        }
        double cost = sub.cost + join;
        double sort = 0.0;
        if (mask == full && b.sort_after(j, method)) {
          sort = expected_sort(size, mem[n - 1]);
          cost += sort;
        }
        if (improves(nodes, mask, cost, rest, j, method)) {
          nodes[mask] = Node{cost, j, method, join, sort, size};
        }
      }
    }
  }
  return node_plan(b, query, nodes);
}

} // namespace

TopCResult top_c_merge(std::span<const double> left,
                       std::span<const double> right, std::size_t c) {
  if (c == 0) {
    throw UsageError("top_c_merge requires c >= 1");
  }
  if (!std::is_sorted(left.begin(), left.end()) ||
      !std::is_sorted(right.begin(), right.end())) {
    throw UsageError("top_c_merge requires both lists sorted ascending");
  }
  TopCResult out;
  for (std::size_t k = 1; k <= std::min(c, right.size()); ++k) {
    const std::size_t rows = std::min(c / k, left.size());
    for (std::size_t i = 1; i <= rows; ++i) {
      out.items.push_back(TopCItem{left[i - 1] + right[k - 1], i - 1, k - 1});
      ++out.examined;
    }
  }
  std::sort(out.items.begin(), out.items.end(),
            [](const TopCItem& x, const TopCItem& y) {
              if (x.sum != y.sum) {
                return x.sum < y.sum;
              }
              if (x.left != y.left) {
                return x.left < y.left;
              }
              return x.right < y.right;
            });
  if (out.items.size() > c) {
    out.items.resize(c);
  }
  return out;
}

Plan optimize_lsc(const Catalog& catalog, const QuerySpec& query,
                  double memory, const OptimizerOptions& options) {
  const Bound b = bind(catalog, query, options);
  return to_plan(b, query, top_c_dp(b, memory, 1).front(), memory);
}

std::vector<Plan> optimize_top_c(const Catalog& catalog, const QuerySpec& query,
                                 double memory, std::size_t c,
                                 const OptimizerOptions& options) {
  const Bound b = bind(catalog, query, options);
  std::vector<Plan> out;
  for (const Partial& p : top_c_dp(b, memory, c)) {
    out.push_back(to_plan(b, query, p, memory));
  }
  return out;
}

Plan optimize_lec_a(const Catalog& catalog, const QuerySpec& query,
                    const Environment& env, const OptimizerOptions& options,
                    OptimizerStats* stats) {
  require_static(env, "algorithm A");
  const Bound b = bind(catalog, query, options);
  std::vector<Plan> pool;
  for (double m : candidate_points(env, options)) {
    pool.push_back(to_plan(b, query, top_c_dp(b, m, 1).front(), m));
    if (stats != nullptr) {
      ++stats->fixed_point_runs;
    }
  }
  return choose_candidate(b, env, std::move(pool), stats);
}

Plan optimize_lec_b(const Catalog& catalog, const QuerySpec& query,
                    const Environment& env, std::size_t c,
                    const OptimizerOptions& options, OptimizerStats* stats) {
  require_static(env, "algorithm B");
  if (c == 0) {
    throw UsageError("algorithm B requires c >= 1");
  }
  const Bound b = bind(catalog, query, options);
  std::vector<Plan> pool;
  for (double m : candidate_points(env, options)) {
    for (const Partial& p : top_c_dp(b, m, c)) {
      pool.push_back(to_plan(b, query, p, m));
    }
    // Also A's candidate: a rounded tie can drop it from the top-c list.
    if (c > 1) {
      pool.push_back(to_plan(b, query, top_c_dp(b, m, 1).front(), m));
    }
    if (stats != nullptr) {
      ++stats->fixed_point_runs;
    }
  }
  return choose_candidate(b, env, std::move(pool), stats);
}

Plan optimize_lec_c(const Catalog& catalog, const QuerySpec& query,
                    const Environment& env, const OptimizerOptions& options,
                    OptimizerStats* stats) {
  require_static(env, "algorithm C");
  const Bound b = bind(catalog, query, options);
  return lec_c_impl(b, query, phase_memory(env, b.n()), options, stats);
}

Plan optimize_lec_c_dynamic(const Catalog& catalog, const QuerySpec& query,
                            const Environment& env,
                            const OptimizerOptions& options,
                            OptimizerStats* stats) {
  if (env.mode() != MemoryMode::Dynamic) {
    throw UsageError("dynamic optimization requires a transition model");
  }
  const Bound b = bind(catalog, query, options);
  return lec_c_impl(b, query, phase_memory(env, b.n()), options, stats);
}

Plan optimize_lec_d(const Catalog& catalog, const QuerySpec& query,
                    const Environment& env, const OptimizerOptions& options,
                    OptimizerStats* stats) {
  require_static(env, "algorithm D");
  const Bound b = bind(catalog, query, options);
  const Distribution& mem = env.memory();
  const std::size_t n = b.n();

  if (n == 1) {
    Plan plan = make_plan(query, {b.names[0]}, {});
    plan.per_phase_costs.push_back(b.mean_pages[0]);
    if (plan.final_sort) {
      plan.per_phase_costs.push_back(expected_sort_cost(mem, *b.pages[0]));
    }
    for (double c : plan.per_phase_costs) {
      plan.expected_cost += c;
    }
    return plan;
  }

  std::optional<std::size_t> input_budget;
  if (options.size_buckets && options.cube_root_rebucket) {
    input_budget = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::floor(std::cbrt(static_cast<double>(*options.size_buckets)) + 1e-9)));
  }
  auto trim_input = [&](const Distribution& d) {
    return input_budget ? rebucket(d, *input_budget) : d;
  };

  const Mask full = b.full();
  std::vector<Node> nodes(std::size_t{full} + 1);
  std::vector<std::optional<Distribution>> sizes(std::size_t{full} + 1);
  for (std::size_t j = 0; j < n; ++j) {
    nodes[bit(j)].cost = 0.0;
    sizes[bit(j)] = *b.pages[j];
  }
  for (Mask mask = 1; mask <= full; ++mask) {
    if (std::popcount(mask) < 2) {
      continue;
    }
    // Result-size distribution, computed once per node from the j with the
    // fewest input buckets.
    std::size_t pick = kNone;
    std::size_t fewest = std::numeric_limits<std::size_t>::max();
    for (std::size_t j = 0; j < n; ++j) {
      if (contains(mask, j)) {
        const std::size_t work = sizes[mask ^ bit(j)]->size() * b.pages[j]->size();
        if (work < fewest) {
          fewest = work;
          pick = j;
        }
      }
    }
    {
      const Mask rest = mask ^ bit(pick);
      Distribution sigma =
          selectivity_between(query, b.names[pick], b.names_of(rest));
      Distribution product = product_distribution(
          trim_input(*sizes[rest]), trim_input(*b.pages[pick]), trim_input(sigma));
      if (options.size_buckets) {
        product = rebucket(product, *options.size_buckets);
      }
      sizes[mask] = std::move(product);
    }

    for (std::size_t j = 0; j < n; ++j) {
      if (!contains(mask, j)) {
        continue;
      }
      const Mask rest = mask ^ bit(j);
      const Distribution& left = *sizes[rest];
      const Distribution& right = *b.pages[j];
      for (JoinMethod method : kAllJoinMethods) {
        double join = 0.0;
        if (method == JoinMethod::GraceHash && options.auto_memory_buckets) {
          join = expected_cost_generic(
              method,
              coalesce_memory(method, mem, derive_memory_buckets(method, left, right)),
              left, right);
        } else {
          join = expected_join_cost(method, mem, left, right);
        }
        if (stats != nullptr) {
          ++stats->join_evaluations;
        }
        double cost = nodes[rest].cost + join;
        double sort = 0.0;
        if (mask == full && b.sort_after(j, method)) {
          sort = expected_sort_cost(mem, *sizes[full]);
          cost += sort;
        }
        if (improves(nodes, mask, cost, rest, j, method)) {
          nodes[mask] = Node{cost, j, method, join, sort, 0.0};
        }
      }
    }
  }
  return node_plan(b, query, nodes);
}

CostBreakdown expected_plan_cost(const Plan& plan, const Catalog& catalog,
                                 const QuerySpec& query, const Environment& env) {
  validate(plan, query);
  const Bound b = bind(catalog, query, OptimizerOptions{});
  return expected_cost_by_phase(b, plan, phase_memory(env, b.n()));
}

} // namespace lecopt
