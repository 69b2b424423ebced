# Copyright 2026 The lecopt Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Least-expected-cost join order optimizer.

Catalogs, queries, environments and plans are accepted as dicts, JSON
strings or paths to JSON files; plans come back as dicts.
"""

import json
import os

from ._lecopt import (
    Distribution,
    Error,
    RefusalError,
    cost_external_sort,
    cost_grace_hash,
    cost_nested_loop,
    cost_sort_merge,
    discrete,
    expectation,
    expected_join_cost,
    point,
    product_distribution,
    rebucket,
    top_c_merge,
)
from . import _lecopt

__all__ = [
    "Distribution",
    "Error",
    "RefusalError",
    "compare",
    "cost_external_sort",
    "cost_grace_hash",
    "cost_nested_loop",
    "cost_sort_merge",
    "discrete",
    "exact_expected_cost",
    "expectation",
    "expected_join_cost",
    "optimize",
    "oracle_best",
    "plan_text",
    "point",
    "product_distribution",
    "rebucket",
    "simulate",
    "top_c_merge",
]


def _text(doc):
    if isinstance(doc, (dict, list)):
        return json.dumps(doc)
    if isinstance(doc, os.PathLike) or (
        isinstance(doc, str) and not doc.lstrip().startswith(("{", "["))
    ):
        with open(doc, encoding="utf-8") as f:
            return f.read()
    return doc


def optimize(algo, catalog, query, env, *, c=3, buckets=16,
             auto_buckets=False, cube_root=False, memory=None):
    """Runs one of lsc, lec-a, lec-b, lec-c, lec-d. `buckets=None` keeps
    size distributions exact."""
    return json.loads(_lecopt.optimize(
        algo, _text(catalog), _text(query), _text(env), c, buckets,
        auto_buckets, cube_root, memory))


def oracle_best(catalog, query, env, *, max_relations=7):
    return json.loads(_lecopt.oracle_best(
        _text(catalog), _text(query), _text(env), max_relations))


def exact_expected_cost(plan, catalog, query, env):
    return _lecopt.exact_expected_cost(
        _text(plan), _text(catalog), _text(query), _text(env))


def compare(plans, catalog, query, env, *, trials=10000, seed=0):
    return json.loads(_lecopt.compare(
        [_text(p) for p in plans], _text(catalog), _text(query), _text(env),
        trials, seed))


def simulate(plan, catalog, query, env, *, trials=10000, seed=0):
    return compare([plan], catalog, query, env, trials=trials, seed=seed)


def plan_text(plan):
    return _lecopt.plan_text(_text(plan))
