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

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lecopt/catalog.hpp"
#include "lecopt/cost_model.hpp"
#include "lecopt/distribution.hpp"
#include "lecopt/error.hpp"
#include "lecopt/io.hpp"
#include "lecopt/optimizer.hpp"
#include "lecopt/plan.hpp"
#include "lecopt/oracle.hpp"
#include "lecopt/simulator.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using json = nlohmann::json;

namespace {

// Problems cross the boundary as JSON text in the documented file schemas.
struct Problem {
  lecopt::Catalog catalog;
  lecopt::QuerySpec query;
  lecopt::Environment env;
};

Problem parse(const std::string& catalog, const std::string& query,
              const std::string& env) {
  lecopt::Catalog c = lecopt::catalog_from_json(json::parse(catalog), "catalog: ");
  lecopt::QuerySpec q = lecopt::query_from_json(json::parse(query), "query: ");
  lecopt::validate(q, c);
  lecopt::Environment e = lecopt::environment_from_json(json::parse(env), "env: ");
  return {std::move(c), std::move(q), std::move(e)};
}

lecopt::Plan parse_plan(const std::string& plan) {
  return lecopt::plan_from_json(json::parse(plan), "plan: ");
}

std::string optimize(const std::string& algo, const std::string& catalog,
                     const std::string& query, const std::string& env, std::size_t c,
                     std::optional<std::size_t> buckets, bool auto_buckets,
                     bool cube_root, std::optional<double> memory) {
  const Problem p = parse(catalog, query, env);
  lecopt::OptimizerOptions options;
  options.top_c = c;
  options.size_buckets = buckets;
  options.auto_memory_buckets = auto_buckets;
  options.cube_root_rebucket = cube_root;
  lecopt::Plan plan;
  if (algo == "lsc") {
    plan = lecopt::optimize_lsc(p.catalog, p.query,
                                memory ? *memory : lecopt::expectation(p.env.memory()),
                                options);
  } else if (algo == "lec-a") {
    plan = lecopt::optimize_lec_a(p.catalog, p.query, p.env, options);
  } else if (algo == "lec-b") {
    plan = lecopt::optimize_lec_b(p.catalog, p.query, p.env, c, options);
  } else if (algo == "lec-c") {
    plan = p.env.mode() == lecopt::MemoryMode::Dynamic
               ? lecopt::optimize_lec_c_dynamic(p.catalog, p.query, p.env, options)
               : lecopt::optimize_lec_c(p.catalog, p.query, p.env, options);
  } else if (algo == "lec-d") {
    plan = lecopt::optimize_lec_d(p.catalog, p.query, p.env, options);
  } else {
    throw lecopt::UsageError("unknown algorithm '" + algo + "'");
  }
  return lecopt::to_json(plan).dump();
}

} // namespace

PYBIND11_MODULE(_lecopt, m) {
  m.doc() = "Least-expected-cost join order optimizer";

  static py::exception<lecopt::Error> error(m, "Error", PyExc_ValueError);
  static py::exception<lecopt::RefusalError> refusal(m, "RefusalError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) {
        std::rethrow_exception(p);
      }
    } catch (const lecopt::RefusalError& e) {
      refusal(e.what());
    } catch (const lecopt::Error& e) {
      error(e.what());
    } catch (const json::exception& e) {
      error(e.what());
    }
  });

  py::class_<lecopt::Distribution>(m, "Distribution")
      .def(py::init([](const std::vector<std::tuple<double, double, double, double>>& b) {
             std::vector<lecopt::Bucket> buckets;
             for (const auto& [lo, hi, rep, prob] : b) {
               buckets.push_back({lo, hi, rep, prob});
             }
             return lecopt::Distribution(std::move(buckets));
           }),
           "buckets"_a)
      .def_property_readonly("buckets",
                             [](const lecopt::Distribution& d) {
                               std::vector<std::tuple<double, double, double, double>> out;
                               for (const lecopt::Bucket& b : d.buckets()) {
                                 out.emplace_back(b.lo, b.hi, b.rep, b.prob);
                               }
                               return out;
                             })
      .def("reps", &lecopt::Distribution::reps)
      .def("__len__", &lecopt::Distribution::size)
      .def("__eq__", [](const lecopt::Distribution& a, const lecopt::Distribution& b) {
        return a == b;
      })
      .def("to_json", [](const lecopt::Distribution& d) { return lecopt::to_json(d).dump(); })
      .def("__repr__", [](const lecopt::Distribution& d) {
        return "Distribution(" + lecopt::to_json(d).dump() + ")";
      });

  m.def("point", &lecopt::point, "value"_a);
  m.def("discrete",
        py::overload_cast<std::vector<std::pair<double, double>>>(&lecopt::discrete),
        "masses"_a);
  m.def("expectation", &lecopt::expectation, "d"_a);
  m.def("product_distribution", &lecopt::product_distribution, "a"_a, "b"_a, "sigma"_a);
  m.def("rebucket", &lecopt::rebucket, "d"_a, "k"_a);

  m.def("cost_sort_merge", &lecopt::cost_sort_merge, "a"_a, "b"_a, "m"_a);
  m.def("cost_nested_loop", &lecopt::cost_nested_loop, "a"_a, "b"_a, "m"_a);
  m.def("cost_grace_hash", &lecopt::cost_grace_hash, "a"_a, "b"_a, "m"_a);
  m.def("cost_external_sort", &lecopt::cost_external_sort, "r"_a, "m"_a);
  m.def("expected_join_cost",
        [](const std::string& method, const lecopt::Distribution& mem,
           const lecopt::Distribution& a, const lecopt::Distribution& b) {
          return lecopt::expected_join_cost(lecopt::join_method_from_string(method),
                                            mem, a, b);
        },
        "method"_a, "mem"_a, "a"_a, "b"_a);

  m.def("top_c_merge",
        [](const std::vector<double>& left, const std::vector<double>& right,
           std::size_t c) {
          const lecopt::TopCResult r = lecopt::top_c_merge(left, right, c);
          std::vector<std::tuple<double, std::size_t, std::size_t>> items;
          for (const lecopt::TopCItem& it : r.items) {
            items.emplace_back(it.sum, it.left, it.right);
          }
          return py::make_tuple(items, r.examined);
        },
        "left"_a, "right"_a, "c"_a);

  m.def("optimize", &optimize, "algo"_a, "catalog"_a, "query"_a, "env"_a, "c"_a = 3,
        "buckets"_a = std::optional<std::size_t>(16), "auto_buckets"_a = false, "cube_root"_a = false,
        "memory"_a = py::none());

  m.def("oracle_best",
        [](const std::string& catalog, const std::string& query, const std::string& env,
           std::size_t max_relations) {
          const Problem p = parse(catalog, query, env);
          lecopt::OracleOptions options;
          options.max_relations = max_relations;
          return lecopt::to_json(lecopt::oracle_best(p.catalog, p.query, p.env, options))
              .dump();
        },
        "catalog"_a, "query"_a, "env"_a, "max_relations"_a = 7);

  m.def("exact_expected_cost",
        [](const std::string& plan, const std::string& catalog, const std::string& query,
           const std::string& env) {
          const Problem p = parse(catalog, query, env);
          return lecopt::exact_expected_cost(parse_plan(plan), p.catalog, p.query, p.env)
              .total;
        },
        "plan"_a, "catalog"_a, "query"_a, "env"_a);

  m.def("compare",
        [](const std::vector<std::string>& plans, const std::string& catalog,
           const std::string& query, const std::string& env, std::size_t trials,
           std::uint64_t seed) {
          const Problem p = parse(catalog, query, env);
          std::vector<lecopt::Plan> parsed;
          for (const std::string& s : plans) {
            parsed.push_back(parse_plan(s));
          }
          return lecopt::to_json(
                     lecopt::compare(parsed, p.catalog, p.query, p.env, trials, seed))
              .dump();
        },
        "plans"_a, "catalog"_a, "query"_a, "env"_a, "trials"_a, "seed"_a = 0);

  m.def("plan_text", [](const std::string& plan) { return lecopt::to_text(parse_plan(plan)); },
        "plan"_a);
}
