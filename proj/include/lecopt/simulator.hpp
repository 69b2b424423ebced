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
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lecopt/catalog.hpp"
#include "lecopt/plan.hpp"

namespace lecopt {

/// Identifier of the generator behind every simulated draw: trial t of seed
/// s reads a SplitMix64 stream started at mix(s) + t * 0x9e3779b97f4a7c15.
inline constexpr const char* kRngAlgorithm = "splitmix64-trial-keyed";

struct SimPlanResult {
  Plan plan;
  double mean = 0.0;
  double std_error = 0.0;
  /// Paired difference against the first plan of the comparison.
  double mean_diff = 0.0;
  double diff_std_error = 0.0;
};

struct SimReport {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::string rng = kRngAlgorithm;
  /// Statistics of the first (or only) plan.
  double mean = 0.0;
  double std_error = 0.0;
  /// Ranked by realized mean, ties in input order.
  std::vector<SimPlanResult> plans;
};

/// Memory values for `phases` consecutive phases: the first drawn from the
/// initial distribution, each later one from the transition row of its
/// predecessor. A static environment yields a constant trajectory.
std::vector<double> sample_trajectory(const Environment& env, std::size_t phases,
                                      std::uint64_t seed);

/// Monte Carlo estimate of the plan's expected cost. Each trial samples
/// bucket representatives for sizes, selectivities and memory.
SimReport simulate(const Plan& plan, const Catalog& catalog,
                   const QuerySpec& query, const Environment& env,
                   std::size_t trials, std::uint64_t seed);

/// Costs every plan on the same sampled realizations. Throws UsageError
/// for an empty plan list.
SimReport compare(const std::vector<Plan>& plans, const Catalog& catalog,
                  const QuerySpec& query, const Environment& env,
                  std::size_t trials, std::uint64_t seed);

nlohmann::json to_json(const SimReport& r);

} // namespace lecopt
