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

#include "lecopt/catalog.hpp"

#include <algorithm>
#include <string>

#include "lecopt/error.hpp"

namespace lecopt {

Catalog::Catalog(std::vector<Relation> relations)
    : relations_(std::move(relations)) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < relations_.size(); ++i) {
    const Relation& r = relations_[i];
    const std::string where = "/relations/" + std::to_string(i);
    if (r.name.empty()) {
      throw ValidationError("relation name must not be empty", where);
    }
    if (!seen.insert(r.name).second) {
      throw ValidationError("duplicate relation '" + r.name + "'", where);
    }
    if (!(r.pages.min_rep() > 0.0)) {
      throw ValidationError("page counts of '" + r.name + "' must be positive",
                            where + "/pages");
    }
  }
}

const Relation* Catalog::find(std::string_view name) const {
  for (const Relation& r : relations_) {
    if (r.name == name) {
      return &r;
    }
  }
  return nullptr;
}

const Relation& Catalog::at(std::string_view name) const {
  if (const Relation* r = find(name)) {
    return *r;
  }
  throw ReferenceError("unknown relation '" + std::string(name) + "'");
}

void validate(const QuerySpec& query) {
  if (query.relations.empty()) {
    throw ValidationError("query joins no relations", "/relations");
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < query.relations.size(); ++i) {
    const std::string& name = query.relations[i];
    const std::string where = "/relations/" + std::to_string(i);
    if (name.empty()) {
      throw ValidationError("relation name must not be empty", where);
    }
    if (!names.insert(name).second) {
      throw ValidationError("relation '" + name + "' listed twice", where);
    }
  }
  for (std::size_t i = 0; i < query.predicates.size(); ++i) {
    const Predicate& p = query.predicates[i];
    const std::string where = "/predicates/" + std::to_string(i);
    if (!names.contains(p.left)) {
      throw ReferenceError("predicate references relation '" + p.left +
                               "' which the query does not join",
                           where + "/left");
    }
    if (!names.contains(p.right)) {
      throw ReferenceError("predicate references relation '" + p.right +
                               "' which the query does not join",
                           where + "/right");
    }
    if (p.left == p.right) {
      throw ValidationError("predicate joins '" + p.left + "' with itself",
                            where);
    }
    if (p.selectivity.min_rep() < 0.0 || p.selectivity.max_rep() > 1.0) {
      throw ValidationError("selectivity must lie in [0, 1]",
                            where + "/selectivity");
    }
  }
  if (query.order_owner && !names.contains(*query.order_owner)) {
    throw ReferenceError("order_owner '" + *query.order_owner +
                             "' is not joined by the query",
                         "/order_owner");
  }
}

void validate(const QuerySpec& query, const Catalog& catalog) {
  validate(query);
  for (std::size_t i = 0; i < query.relations.size(); ++i) {
    if (catalog.find(query.relations[i]) == nullptr) {
      throw ReferenceError("relation '" + query.relations[i] +
                               "' is not declared in the catalog",
                           "/relations/" + std::to_string(i));
    }
  }
}

Environment::Environment(Distribution memory,
                         std::optional<TransitionModel> transition)
    : memory_(std::move(memory)), transition_(std::move(transition)) {
  if (!(memory_.min_rep() > 0.0)) {
    throw ValidationError("memory representatives must be positive", "/memory");
  }
  if (transition_ && transition_->states() != memory_.reps()) {
    throw ValidationError(
        "transition states must equal the memory representatives",
        "/transition/states");
  }
}

Distribution Environment::memory_at_phase(std::size_t phase) const {
  if (!transition_) {
    return memory_;
  }
  return advance(memory_, *transition_, phase);
}

Distribution selectivity_between(const QuerySpec& query,
                                 std::string_view relation,
                                 const std::set<std::string>& others,
                                 std::optional<std::size_t> budget) {
  const Distribution one = point(1.0);
  Distribution acc = one;
  for (const Predicate& p : query.predicates) {
    const bool joins = (p.left == relation && others.contains(p.right)) ||
                       (p.right == relation && others.contains(p.left));
    if (!joins) {
      continue;
    }
    acc = product_distribution(acc, p.selectivity, one);
  }
  if (budget) {
    acc = rebucket(acc, *budget);
  }
  return acc;
}

bool sort_merge_satisfies_order(const QuerySpec& query, std::string_view last) {
  if (!query.order_owner || *query.order_owner == last) {
    return true;
  }
  const std::string& owner = *query.order_owner;
  return std::any_of(query.predicates.begin(), query.predicates.end(),
                     [&](const Predicate& p) {
                       return (p.left == last && p.right == owner) ||
                              (p.right == last && p.left == owner);
                     });
}

} // namespace lecopt
