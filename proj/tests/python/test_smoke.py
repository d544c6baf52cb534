# Copyright 2026 The alloscore Authors.
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
import math
from pathlib import Path

import pytest

import alloscore as a

DATA = Path(__file__).resolve().parent.parent / "data"


def example_forecast(s1=1.0, s2=4.0):
    E = a.MarginalDistribution.exponential
    return a.MultiForecast(["loc1", "loc2"], [E(s1), E(s2)])


def test_example_allocation():
    amounts, level = a.solve_allocation(example_forecast(), 5.0)
    assert amounts == pytest.approx([1.0, 4.0], abs=1e-9)
    assert level == pytest.approx(1.0 - math.exp(-1.0))


def test_example_scores():
    f = example_forecast()
    assert a.allocation_score(f, [1.0, 10.0], 5.0)["allocation_score"] == pytest.approx(0.0, abs=1e-9)
    r = a.allocation_score(f, [1.0, 10.0], 10.0)
    assert r["allocation_score"] == pytest.approx(1.0, abs=1e-9)
    assert r["per_location"][1]["location"] == "loc2"
    g = a.allocation_score(example_forecast(2.0, 8.0), [1.0, 10.0], 10.0)
    assert g["allocation_score"] == pytest.approx(r["allocation_score"], abs=1e-9)
    fixed = a.score_fixed_allocation([2.0, 8.0], [1.0, 10.0], 10.0)
    assert fixed["allocation_score"] == 1.0
    assert fixed["shared_level"] is None


def test_ias():
    f = example_forecast()
    assert a.integrated_allocation_score(f, [1.0, 10.0], "point", [10.0]) == pytest.approx(1.0)
    assert a.integrated_allocation_score(f, [1.0, 10.0], "uniform", [5.0, 10.0], step=5.0) == pytest.approx(0.5)


def test_wis_and_ranks():
    q = a.QuantileSet([0.25, 0.5, 0.75], [1.0, 2.0, 3.0])
    assert a.quantile_score(3.0, 0.5, 1.0) == 2.0
    assert a.wis(q, 2.5) == pytest.approx(0.5)
    parts = a.wis_decomposition(q, 2.5)
    assert sum(parts.values()) == pytest.approx(0.5)
    assert a.mean_wis([q, a.QuantileSet([0.5], [3.0])], [2.5, 1.0]) == pytest.approx(1.25)
    ranks = a.standardized_ranks([("a", 1.0), ("b", 2.0), ("c", 3.0)])
    assert [r[2] for r in ranks] == [1.0, 0.5, 0.0]


def test_reconstruction_and_errors():
    levels = a.hub_quantile_levels()
    assert len(levels) == 23
    values = [-math.log1p(-t) for t in levels]
    d = a.MarginalDistribution.from_quantiles(a.QuantileSet(levels, values))
    for t, v in zip(levels, values):
        assert d.quantile(t) == pytest.approx(v, rel=1e-9)
    with pytest.raises(a.InputError):
        a.QuantileSet([0.1, 0.2], [2.0, 1.0])
    with pytest.raises(ValueError):
        a.solve_allocation(example_forecast(), -1.0)
    with pytest.raises(a.ComputeError):
        a.solve_allocation(example_forecast(), 5.0, a.SolverConfig(max_iter=1))


def test_lab():
    f = example_forecast()
    r = a.mc_propriety(f, example_forecast(4.0, 1.0), 5.0, n=2000, seed=3)
    assert r["verdict"] == "consistent"
    assert r["mean_self"] < r["mean_other"]
    L = a.MarginalDistribution.lognormal
    g = a.MultiForecast(["a", "b"], [L(0.0, 0.25), L(0.0, 1.0)])
    k = sum(m.quantile(0.995) for m in [L(0.0, 0.25), L(0.0, 1.0)])
    demo = a.posthoc_impropriety_demo(g, k, n=500)
    assert demo["level_in_extrapolated_tail"] is True
    assert demo["max_abs_allocation_gap"] > 0.0


def test_cli_in_process():
    code, out, err = a.run_cli(["score", "--forecasts", str(DATA / "example_forecasts.csv"),
                                "--truth", str(DATA / "example_truth.csv"), "--k", "10",
                                "--format", "json", "--ranks", "/dev/null"])
    assert code == 0, err
    assert [r["allocation_score"] for r in json.loads(out)] == pytest.approx([1.0, 1.0])
    code, _, err = a.run_cli(["allocate", "--forecasts", str(DATA / "crossed_forecasts.csv")])
    assert code == 2
    assert "crossed" in err
