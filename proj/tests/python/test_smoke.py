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

import json
import pathlib

import pytest

import lecopt

FIX = pathlib.Path(__file__).resolve().parents[1] / "fixtures"
EX1 = FIX / "example1"


def load(name):
    return json.loads((EX1 / name).read_text())


def test_cost_formulas():
    assert lecopt.cost_sort_merge(1_000_000, 400_000, 2000) == 2_800_000
    assert lecopt.cost_sort_merge(1_000_000, 400_000, 700) == 5_600_000
    assert lecopt.cost_nested_loop(10, 20, 12) == 30
    assert lecopt.cost_external_sort(0, 5) == 0


def test_distribution_roundtrip():
    d = lecopt.discrete([(700, 0.2), (2000, 0.8)])
    assert lecopt.expectation(d) == pytest.approx(1740)
    assert d.reps() == [700, 2000]
    assert len(lecopt.rebucket(d, 1)) == 1
    p = lecopt.product_distribution(lecopt.point(4), lecopt.point(8), lecopt.point(0.5))
    assert p.reps() == [16]


def test_top_c_merge():
    items, examined = lecopt.top_c_merge([1, 2, 10], [0, 5], 3)
    assert [i[0] for i in items] == [1, 2, 6]
    assert examined >= 3


def test_example1_algorithms():
    cat, query, env = EX1 / "catalog.json", EX1 / "query.json", EX1 / "env.json"
    lsc = lecopt.optimize("lsc", cat, query, env)
    lec = lecopt.optimize("lec-c", cat, query, env)
    assert lsc["methods"] == ["SortMerge"]
    assert lec["methods"] == ["GraceHash"]
    assert lec["expected_cost"] == 2_812_000
    best = lecopt.oracle_best(cat, query, env)
    assert best["methods"] == ["GraceHash"]
    assert lecopt.exact_expected_cost(lsc, cat, query, env) == 3_360_000


def test_dicts_and_text():
    plan = load("plan2.json")
    text = lecopt.plan_text(plan)
    assert text.startswith("Sort")
    report = lecopt.compare(
        [load("plan1.json"), plan], load("catalog.json"), load("query.json"),
        load("env.json"), trials=500, seed=7)
    assert report["trials"] == 500
    assert len(report["plans"]) == 2


def test_errors():
    with pytest.raises(lecopt.Error):
        lecopt.optimize("lec-a", EX1 / "catalog.json", EX1 / "query.json",
                        EX1 / "env_dynamic.json")
    with pytest.raises(ValueError):
        lecopt.optimize("lsc", FIX / "invalid" / "catalog_bad_pages.json",
                        EX1 / "query.json", EX1 / "env.json")
    with pytest.raises(lecopt.RefusalError):
        lecopt.oracle_best(FIX / "five" / "catalog.json", FIX / "five" / "query.json",
                           FIX / "five" / "env.json", max_relations=3)
