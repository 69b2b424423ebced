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
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lecopt/distribution.hpp"

namespace lecopt {

struct Relation {
  std::string name;
  Distribution pages;  // representatives > 0

  bool operator==(const Relation&) const = default;
};

/// Join predicate between two relations. Result size of a join is
/// |left| * |right| * selectivity pages.
struct Predicate {
  std::string left;
  std::string right;
  Distribution selectivity;  // representatives in [0, 1]

  bool operator==(const Predicate&) const = default;
};

class Catalog {
 public:
  /// Throws ValidationError on duplicate or empty names and non-positive
  /// page counts.
  explicit Catalog(std::vector<Relation> relations);

  const std::vector<Relation>& relations() const noexcept { return relations_; }
  const Relation* find(std::string_view name) const;
  /// Throws ReferenceError for an unknown name.
  const Relation& at(std::string_view name) const;

  bool operator==(const Catalog&) const = default;

 private:
  std::vector<Relation> relations_;
};

/// The join to optimize. The ordering requirement is a single flag: a plan
/// satisfies it when its last join is a sort-merge on a column of
/// `order_owner` (any column when no owner is given); otherwise the result
/// is sorted at the end.
struct QuerySpec {
  std::vector<std::string> relations;
  std::vector<Predicate> predicates;
  bool sorted_result = false;
  std::optional<std::string> order_owner;

  bool operator==(const QuerySpec&) const = default;
};

/// Checks that relations are unique and non-empty, predicate endpoints are
/// distinct members of `relations`, and selectivities lie in [0, 1].
/// Throws ValidationError / ReferenceError.
void validate(const QuerySpec& query);

/// validate(query) plus: every relation is declared in `catalog`.
void validate(const QuerySpec& query, const Catalog& catalog);

enum class MemoryMode { Static, Dynamic };

/// Run-time environment: a memory distribution and, for dynamic memory, a
/// Markov chain over its representatives.
class Environment {
 public:
  /// Throws ValidationError when memory representatives are not positive or
  /// do not match the chain's states.
  explicit Environment(Distribution memory,
                       std::optional<TransitionModel> transition = std::nullopt);

  const Distribution& memory() const noexcept { return memory_; }
  const std::optional<TransitionModel>& transition() const noexcept {
    return transition_;
  }
  MemoryMode mode() const noexcept {
    return transition_ ? MemoryMode::Dynamic : MemoryMode::Static;
  }

  /// Memory distribution during phase `phase` (0-based): the initial
  /// distribution advanced `phase` times; always the initial one when static.
  Distribution memory_at_phase(std::size_t phase) const;

  bool operator==(const Environment&) const = default;

 private:
  Distribution memory_;
  std::optional<TransitionModel> transition_;
};

/// Combined selectivity of the predicates joining `relation` to members of
/// `others`: the product of their distributions in declaration order, or
/// point(1) when none apply. Rebucketed to `budget` when given.
Distribution selectivity_between(const QuerySpec& query,
                                 std::string_view relation,
                                 const std::set<std::string>& others,
                                 std::optional<std::size_t> budget = std::nullopt);

/// Whether a final sort-merge join adding `last` leaves the result ordered
/// as the query requires.
bool sort_merge_satisfies_order(const QuerySpec& query, std::string_view last);

// File ingestion. Errors carry "<path>: <json pointer>" locations.
Catalog load_catalog(const std::string& path);
QuerySpec load_query(const std::string& path);
QuerySpec load_query(const std::string& path, const Catalog& catalog);
Environment load_environment(const std::string& path);

} // namespace lecopt
