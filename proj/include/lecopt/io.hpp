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

#include <string>

#include <nlohmann/json.hpp>

#include "lecopt/catalog.hpp"
#include "lecopt/distribution.hpp"
#include "lecopt/plan.hpp"

namespace lecopt {

// JSON forms. Distributions are arrays of {lo, hi, rep, prob} with hi
// possibly "inf"; lo/hi may be omitted on input for a point mass at rep.
// Every *_from_json throws ValidationError whose location is
// `where` followed by the JSON pointer of the offending value.

nlohmann::json to_json(const Distribution& d);
Distribution distribution_from_json(const nlohmann::json& j,
                                    const std::string& where = {});

nlohmann::json to_json(const TransitionModel& t);
TransitionModel transition_from_json(const nlohmann::json& j,
                                     const std::string& where = {});

nlohmann::json to_json(const Catalog& c);
Catalog catalog_from_json(const nlohmann::json& j, const std::string& where = {});

nlohmann::json to_json(const QuerySpec& q);
QuerySpec query_from_json(const nlohmann::json& j, const std::string& where = {});

nlohmann::json to_json(const Environment& e);
Environment environment_from_json(const nlohmann::json& j,
                                  const std::string& where = {});

nlohmann::json to_json(const Plan& p);
Plan plan_from_json(const nlohmann::json& j, const std::string& where = {});

/// Reads and parses a JSON file; parse errors report the byte offset.
nlohmann::json read_json_file(const std::string& path);

Plan load_plan(const std::string& path);

} // namespace lecopt
