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

#include "lecopt/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "lecopt/error.hpp"

namespace lecopt {

using nlohmann::json;

namespace {

// Re-raises validation errors from value constructors under `location`.
template <typename F>
auto located(const std::string& location, F&& make) -> decltype(make()) {
  try {
    return make();
  } catch (const ReferenceError& e) {
    throw ReferenceError(e.what(), location);
  } catch (const ValidationError& e) {
    throw ValidationError(e.what(), location);
  } catch (const DomainError& e) {
    throw ValidationError(e.what(), location);
  }
}

const json& member(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) {
    throw ValidationError("expected an object", where);
  }
  auto it = j.find(key);
  if (it == j.end()) {
    throw ValidationError(std::string("missing field '") + key + "'", where);
  }
  return *it;
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) {
    throw ValidationError("expected a number", where);
  }
  return j.get<double>();
}

double bound(const json& j, const std::string& where) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") {
      return std::numeric_limits<double>::infinity();
    }
    throw ValidationError("expected a number or \"inf\"", where);
  }
  return number(j, where);
}

std::string text(const json& j, const std::string& where) {
  if (!j.is_string()) {
    throw ValidationError("expected a string", where);
  }
  return j.get<std::string>();
}

const json& array(const json& j, const std::string& where) {
  if (!j.is_array()) {
    throw ValidationError("expected an array", where);
  }
  return j;
}

std::string bare_message(const ValidationError& e) {
  std::string message = e.what();
  if (!e.location().empty()) {
    message = message.substr(e.location().size() + 2);
  }
  return message;
}

// Re-raises a module error whose location is relative (e.g. "/relations/1")
// under the caller's prefix.
template <typename F>
auto prefixed(const std::string& where, F&& make) -> decltype(make()) {
  try {
    return make();
  } catch (const ReferenceError& e) {
    throw ReferenceError(bare_message(e), where + e.location());
  } catch (const ValidationError& e) {
    throw ValidationError(bare_message(e), where + e.location());
  }
}

} // namespace

json to_json(const Distribution& d) {
  json out = json::array();
  for (const Bucket& b : d.buckets()) {
    json hi = std::isinf(b.hi) ? json("inf") : json(b.hi);
    out.push_back({{"lo", b.lo}, {"hi", hi}, {"rep", b.rep}, {"prob", b.prob}});
  }
  return out;
}

Distribution distribution_from_json(const json& j, const std::string& where) {
  array(j, where);
  std::vector<Bucket> buckets;
  bool all_points = true;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "/" + std::to_string(i);
    const json& e = j[i];
    Bucket b;
    b.rep = number(member(e, "rep", w), w + "/rep");
    b.prob = number(member(e, "prob", w), w + "/prob");
    const bool has_lo = e.contains("lo");
    const bool has_hi = e.contains("hi");
    if (has_lo != has_hi) {
      throw ValidationError("lo and hi must be given together", w);
    }
    if (has_lo) {
      all_points = false;
      b.lo = number(e["lo"], w + "/lo");
      b.hi = bound(e["hi"], w + "/hi");
    } else {
      b.lo = b.rep;
      b.hi = std::nextafter(b.rep, std::numeric_limits<double>::infinity());
    }
    buckets.push_back(b);
  }
  if (all_points) {
    std::vector<std::pair<double, double>> masses;
    for (const Bucket& b : buckets) {
      masses.emplace_back(b.rep, b.prob);
    }
    return located(where, [&] { return discrete(std::move(masses)); });
  }
  return located(where, [&] { return Distribution(std::move(buckets)); });
}

json to_json(const TransitionModel& t) {
  return {{"states", t.states()}, {"matrix", t.matrix()}};
}

TransitionModel transition_from_json(const json& j, const std::string& where) {
  std::vector<double> states;
  const std::string ws = where + "/states";
  const json& js = array(member(j, "states", where), ws);
  for (std::size_t i = 0; i < js.size(); ++i) {
    states.push_back(number(js[i], ws + "/" + std::to_string(i)));
  }
  std::vector<std::vector<double>> matrix;
  const std::string wm = where + "/matrix";
  const json& jm = array(member(j, "matrix", where), wm);
  for (std::size_t r = 0; r < jm.size(); ++r) {
    const std::string wr = wm + "/" + std::to_string(r);
    const json& row = array(jm[r], wr);
    std::vector<double> values;
    for (std::size_t c = 0; c < row.size(); ++c) {
      values.push_back(number(row[c], wr + "/" + std::to_string(c)));
    }
    matrix.push_back(std::move(values));
  }
  return located(where, [&] {
    return TransitionModel(std::move(states), std::move(matrix));
  });
}

json to_json(const Catalog& c) {
  json rels = json::array();
  for (const Relation& r : c.relations()) {
    rels.push_back({{"name", r.name}, {"pages", to_json(r.pages)}});
  }
  return {{"relations", rels}};
}

Catalog catalog_from_json(const json& j, const std::string& where) {
  const std::string wr = where + "/relations";
  const json& jr = array(member(j, "relations", where), wr);
  std::vector<Relation> relations;
  for (std::size_t i = 0; i < jr.size(); ++i) {
    const std::string w = wr + "/" + std::to_string(i);
    relations.push_back(Relation{
        text(member(jr[i], "name", w), w + "/name"),
        distribution_from_json(member(jr[i], "pages", w), w + "/pages")});
  }
  return prefixed(where, [&] { return Catalog(std::move(relations)); });
}

json to_json(const QuerySpec& q) {
  json preds = json::array();
  for (const Predicate& p : q.predicates) {
    preds.push_back({{"left", p.left},
                     {"right", p.right},
                     {"selectivity", to_json(p.selectivity)}});
  }
  json out = {{"relations", q.relations},
              {"predicates", preds},
              {"sorted_result", q.sorted_result}};
  if (q.order_owner) {
    out["order_owner"] = *q.order_owner;
  }
  return out;
}

QuerySpec query_from_json(const json& j, const std::string& where) {
  QuerySpec q;
  const std::string wr = where + "/relations";
  const json& jr = array(member(j, "relations", where), wr);
  for (std::size_t i = 0; i < jr.size(); ++i) {
    q.relations.push_back(text(jr[i], wr + "/" + std::to_string(i)));
  }
  if (j.contains("predicates")) {
    const std::string wp = where + "/predicates";
    const json& jp = array(j["predicates"], wp);
    for (std::size_t i = 0; i < jp.size(); ++i) {
      const std::string w = wp + "/" + std::to_string(i);
      q.predicates.push_back(Predicate{
          text(member(jp[i], "left", w), w + "/left"),
          text(member(jp[i], "right", w), w + "/right"),
          distribution_from_json(member(jp[i], "selectivity", w),
                                 w + "/selectivity")});
    }
  }
  if (j.contains("sorted_result")) {
    if (!j["sorted_result"].is_boolean()) {
      throw ValidationError("expected a boolean", where + "/sorted_result");
    }
    q.sorted_result = j["sorted_result"].get<bool>();
  }
  if (j.contains("order_owner") && !j["order_owner"].is_null()) {
    q.order_owner = text(j["order_owner"], where + "/order_owner");
  }
  prefixed(where, [&] {
    validate(q);
    return 0;
  });
  return q;
}

json to_json(const Environment& e) {
  json out = {{"memory", to_json(e.memory())}};
  if (e.transition()) {
    out["transition"] = to_json(*e.transition());
  }
  return out;
}

Environment environment_from_json(const json& j, const std::string& where) {
  Distribution memory =
      distribution_from_json(member(j, "memory", where), where + "/memory");
  std::optional<TransitionModel> transition;
  if (j.contains("transition") && !j["transition"].is_null()) {
    transition = transition_from_json(j["transition"], where + "/transition");
  }
  return prefixed(where, [&] {
    return Environment(std::move(memory), std::move(transition));
  });
}

json to_json(const Plan& p) {
  json methods = json::array();
  for (JoinMethod m : p.methods) {
    methods.push_back(std::string(to_string(m)));
  }
  return {{"order", p.order},
          {"methods", methods},
          {"final_sort", p.final_sort},
          {"expected_cost", p.expected_cost},
          {"per_phase_costs", p.per_phase_costs}};
}

Plan plan_from_json(const json& j, const std::string& where) {
  Plan p;
  const std::string wo = where + "/order";
  const json& jo = array(member(j, "order", where), wo);
  for (std::size_t i = 0; i < jo.size(); ++i) {
    p.order.push_back(text(jo[i], wo + "/" + std::to_string(i)));
  }
  const std::string wm = where + "/methods";
  const json& jm = array(member(j, "methods", where), wm);
  for (std::size_t i = 0; i < jm.size(); ++i) {
    const std::string w = wm + "/" + std::to_string(i);
    p.methods.push_back(
        located(w, [&] { return join_method_from_string(text(jm[i], w)); }));
  }
  if (j.contains("final_sort")) {
    if (!j["final_sort"].is_boolean()) {
      throw ValidationError("expected a boolean", where + "/final_sort");
    }
    p.final_sort = j["final_sort"].get<bool>();
  }
  if (j.contains("expected_cost")) {
    p.expected_cost = number(j["expected_cost"], where + "/expected_cost");
  }
  if (j.contains("per_phase_costs")) {
    const std::string wc = where + "/per_phase_costs";
    const json& jc = array(j["per_phase_costs"], wc);
    for (std::size_t i = 0; i < jc.size(); ++i) {
      p.per_phase_costs.push_back(number(jc[i], wc + "/" + std::to_string(i)));
    }
  }
  return p;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open file", path);
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("JSON parse error at byte ") +
                              std::to_string(e.byte) + ": " + e.what(),
                          path);
  }
}

Catalog load_catalog(const std::string& path) {
  return catalog_from_json(read_json_file(path), path + ": ");
}

QuerySpec load_query(const std::string& path) {
  return query_from_json(read_json_file(path), path + ": ");
}

QuerySpec load_query(const std::string& path, const Catalog& catalog) {
  QuerySpec q = load_query(path);
  prefixed(path + ": ", [&] {
    validate(q, catalog);
    return 0;
  });
  return q;
}

Environment load_environment(const std::string& path) {
  return environment_from_json(read_json_file(path), path + ": ");
}

Plan load_plan(const std::string& path) {
  return plan_from_json(read_json_file(path), path + ": ");
}

} // namespace lecopt
