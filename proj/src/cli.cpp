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

#include "lecopt/cli.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lecopt/error.hpp"
#include "lecopt/io.hpp"
#include "lecopt/optimizer.hpp"
#include "lecopt/oracle.hpp"
#include "lecopt/simulator.hpp"

namespace lecopt::cli {
namespace {

enum class LogLevel { Quiet, Info, Trace };

LogLevel log_level() {
  const char* v = std::getenv("LEC_LOG");
  if (v == nullptr) {
    return LogLevel::Quiet;
  }
  const std::string s = v;
  if (s == "trace") {
    return LogLevel::Trace;
  }
  if (s == "info") {
    return LogLevel::Info;
  }
  return LogLevel::Quiet;
}

// Shortest representation that reads back to the same double.
std::string number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

struct Inputs {
  std::string catalog;
  std::string query;
  std::string env;
};

void add_inputs(CLI::App* cmd, Inputs& in) {
  cmd->add_option("--catalog", in.catalog, "catalog JSON file")->required();
  cmd->add_option("--query", in.query, "query JSON file")->required();
  cmd->add_option("--env", in.env, "environment JSON file")->required();
}

struct Loaded {
  Catalog catalog;
  QuerySpec query;
  Environment env;
};

Loaded load(const Inputs& in) {
  Catalog catalog = load_catalog(in.catalog);
  QuerySpec query = load_query(in.query, catalog);
  Environment env = load_environment(in.env);
  return Loaded{std::move(catalog), std::move(query), std::move(env)};
}

void print_plan(std::ostream& out, const Plan& plan) {
  out << to_text(plan);
  out << "expected cost: " << number(plan.expected_cost) << "\n";
  out << "phase costs:";
  for (double c : plan.per_phase_costs) {
    out << ' ' << number(c);
  }
  out << "\n";
}

std::string signature(const Plan& plan) {
  std::string s;
  for (std::size_t i = 0; i < plan.order.size(); ++i) {
    if (i > 0) {
      s += ' ';
      s += to_string(plan.methods[i - 1]);
      s += ' ';
    }
    s += plan.order[i];
  }
  if (plan.final_sort) {
    s += " + Sort";
  }
  return s;
}

class Logger {
 public:
  Logger(std::ostream& err) : err_(err), level_(log_level()) {}

  void info(const std::string& msg) const {
    if (level_ != LogLevel::Quiet) {
      err_ << "lecopt: " << msg << "\n";
    }
  }
  void trace(const std::string& msg) const {
    if (level_ == LogLevel::Trace) {
      err_ << "lecopt: " << msg << "\n";
    }
  }

 private:
  std::ostream& err_;
  LogLevel level_;
};

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Least-expected-cost join order optimizer", "lecopt"};
  app.require_subcommand(1);
  const Logger log(err);

  // optimize
  Inputs opt_in;
  std::string algo;
  std::size_t top_c = 3;
  std::size_t buckets = 16;
  bool auto_buckets = false;
  bool cube_root = false;
  bool opt_json = false;
  std::optional<double> memory;
  CLI::App* optimize = app.add_subcommand("optimize", "choose a join plan");
  optimize->add_option("--algo", algo, "optimizer")
      ->required()
      ->check(CLI::IsMember({"lsc", "lec-a", "lec-b", "lec-c", "lec-d"}));
  add_inputs(optimize, opt_in);
  optimize->add_option("--c", top_c, "plans kept per node by lec-b")
      ->check(CLI::PositiveNumber);
  optimize->add_option("--buckets", buckets,
                       "lec-d result-size bucket budget (0 keeps exact sizes)");
  optimize->add_flag("--auto-buckets", auto_buckets,
                     "coalesce memory at each method's cost breakpoints");
  optimize->add_flag("--cube-root", cube_root,
                     "lec-d: rebucket product inputs instead of products");
  optimize->add_option("--memory", memory,
                       "lsc: memory value to optimize for (default: the mean)");
  optimize->add_flag("--json", opt_json, "print the plan as JSON");

  // oracle
  Inputs orc_in;
  bool orc_json = false;
  OracleOptions orc_opts;
  CLI::App* oracle = app.add_subcommand("oracle", "exhaustive best plan");
  add_inputs(oracle, orc_in);
  oracle->add_option("--max-relations", orc_opts.max_relations,
                     "refuse larger queries");
  oracle->add_option("--max-space", orc_opts.max_space,
                     "refuse larger parameter spaces per plan");
  oracle->add_flag("--json", orc_json, "print the plan as JSON");

  // simulate / compare
  Inputs sim_in;
  std::string sim_plan;
  std::size_t sim_trials = 10000;
  std::uint64_t sim_seed = 0;
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo cost of a plan");
  add_inputs(simulate_cmd, sim_in);
  simulate_cmd->add_option("--plan", sim_plan, "plan JSON file")->required();
  simulate_cmd->add_option("--trials", sim_trials, "number of trials")
      ->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", sim_seed, "random seed");

  Inputs cmp_in;
  std::vector<std::string> cmp_plans;
  std::size_t cmp_trials = 10000;
  std::uint64_t cmp_seed = 0;
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "paired Monte Carlo comparison of plans");
  add_inputs(compare_cmd, cmp_in);
  compare_cmd->add_option("--plan", cmp_plans, "plan JSON file (repeatable)")
      ->required();
  compare_cmd->add_option("--trials", cmp_trials, "number of trials")
      ->check(CLI::PositiveNumber);
  compare_cmd->add_option("--seed", cmp_seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "lecopt: error: " << e.what() << "\n";
    return 1;
  }

  const auto started = std::chrono::steady_clock::now();
  auto elapsed_ms = [&] {
    return std::to_string(std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - started)
                              .count());
  };

  try {
    if (optimize->parsed()) {
      const Loaded in = load(opt_in);
      OptimizerOptions options;
      options.top_c = top_c;
      options.auto_memory_buckets = auto_buckets;
      options.cube_root_rebucket = cube_root;
      options.size_buckets =
          buckets == 0 ? std::nullopt : std::optional<std::size_t>(buckets);
      if (memory && algo != "lsc") {
        throw UsageError("--memory applies to --algo lsc only");
      }
      const bool dynamic = in.env.mode() == MemoryMode::Dynamic;
      if (dynamic && (algo == "lec-a" || algo == "lec-b" || algo == "lec-d")) {
        throw UsageError("--algo " + algo +
                         " needs a static environment; use lec-c for a "
                         "transition model");
      }
      OptimizerStats stats;
      Plan plan;
      if (algo == "lsc") {
        const double m = memory ? *memory : expectation(in.env.memory());
        log.info("lsc at memory " + number(m));
        plan = optimize_lsc(in.catalog, in.query, m, options);
      } else if (algo == "lec-a") {
        plan = optimize_lec_a(in.catalog, in.query, in.env, options, &stats);
      } else if (algo == "lec-b") {
        plan = optimize_lec_b(in.catalog, in.query, in.env, top_c, options, &stats);
      } else if (algo == "lec-c") {
        plan = dynamic ? optimize_lec_c_dynamic(in.catalog, in.query, in.env,
                                                options, &stats)
                       : optimize_lec_c(in.catalog, in.query, in.env, options, &stats);
      } else {
        plan = optimize_lec_d(in.catalog, in.query, in.env, options, &stats);
      }
      log.info(algo + ": " + std::to_string(stats.fixed_point_runs) +
               " fixed-point runs, " + std::to_string(stats.candidates) +
               " candidates, " + std::to_string(stats.join_evaluations) +
               " join evaluations, " + elapsed_ms() + " ms");
      if (opt_json) {
        out << to_json(plan).dump(2) << "\n";
      } else {
        print_plan(out, plan);
      }
      return 0;
    }

    if (oracle->parsed()) {
      const Loaded in = load(orc_in);
      const std::vector<Plan> ranked =
          oracle_ranking(in.catalog, in.query, in.env, orc_opts);
      log.info("oracle: " + std::to_string(ranked.size()) + " plans, " +
               elapsed_ms() + " ms");
      if (orc_json) {
        out << to_json(ranked.front()).dump(2) << "\n";
        return 0;
      }
      print_plan(out, ranked.front());
      if (in.query.relations.size() <= 4) {
        out << "\nrank  expected cost  plan\n";
        for (std::size_t i = 0; i < ranked.size(); ++i) {
          out << std::setw(4) << i + 1 << "  " << std::setw(13)
              << number(ranked[i].expected_cost) << "  " << signature(ranked[i])
              << "\n";
        }
      }
      return 0;
    }

    if (simulate_cmd->parsed()) {
      const Loaded in = load(sim_in);
      const Plan plan = load_plan(sim_plan);
      const SimReport report =
          simulate(plan, in.catalog, in.query, in.env, sim_trials, sim_seed);
      log.info("simulate: " + std::to_string(sim_trials) + " trials, " +
               elapsed_ms() + " ms");
      out << to_json(report).dump(2) << "\n";
      return 0;
    }

    const Loaded in = load(cmp_in);
    std::vector<Plan> plans;
    for (const std::string& path : cmp_plans) {
      log.trace("loading plan " + path);
      plans.push_back(load_plan(path));
    }
    const SimReport report =
        compare(plans, in.catalog, in.query, in.env, cmp_trials, cmp_seed);
    log.info("compare: " + std::to_string(plans.size()) + " plans, " +
             std::to_string(cmp_trials) + " trials, " + elapsed_ms() + " ms");
    out << to_json(report).dump(2) << "\n";
    return 0;
  } catch (const RefusalError& e) {
    err << "lecopt: refused: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "lecopt: error: " << e.what() << "\n";
    return 1;
  }
}

} // namespace lecopt::cli
