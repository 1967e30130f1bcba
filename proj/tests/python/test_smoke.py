# SPDX-License-Identifier: Apache-2.0
#
# Copyright 2026 The detid Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import math

import pytest

import detid


def test_plan_params_regression_instance():
    p = detid.plan_params(3000, a=0.05, A=1.0, eps1=0.1, eps2=0.1)
    assert (p["q1"], p["n1"], p["k1"], p["n2"], p["k2"]) == (5, 5, 5, 600, 541)
    assert p["log2_M"] == p["k1"] * p["k2"] * math.log2(p["q1"])
    assert detid.di_rate(p["log2_M"], 3000) == p["rate"]


def test_infeasible_inner_field_raises():
    with pytest.raises(detid.InfeasibleError):
        detid.plan_params(3000, q1=4)


def test_codebook_encodes_within_power_bounds():
    cb = detid.ConcatCodebook(detid.plan_params(200))
    assert cb.size == cb.params["q1"] ** (cb.params["k1"] * cb.params["k2"])
    last = cb.size - 1
    for index in (0, 1, last):
        u = cb.encode(index)
        assert len(u) == 200
        assert sum(x * x for x in u) <= 200 * (1 + 1e-12)
    with pytest.raises(IndexError):
        cb.encode(cb.size)
    a, b = cb.encode(0), cb.encode(1)
    dist = math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))
    assert dist >= cb.params["min_distance"] * (1 - 1e-12)


def test_bounds():
    d = detid.min_distance_lower_bound(0.05, 1.0)
    assert d == pytest.approx(2 * 1.6448536269514722, rel=1e-9)
    r = [detid.sphere_packing_rate(n, 1.0, d) for n in (1e6, 1e9, 1e12)]
    assert r[0] < r[1] < r[2] < 0.5


def test_fading_moments():
    m = detid.fading_moments({"type": "discrete", "atoms": [[0.75, 0.8], [2.0, 0.2]]})
    assert m["mean"] == pytest.approx(1.0)
    assert m["mu3"] == pytest.approx(0.1875)


def test_experiment_is_reproducible_across_workers():
    cfg = {
        "channel": {"type": "awgn", "noise_var": 0.05},
        "codebook": {"source": "concat", "n": 200},
        "identities": 5,
        "trials": 10,
        "pairs": 8,
        "pair_trials": 5,
        "min_distance_pairs": 2,
        "seed": 3,
    }
    one = detid.run_experiment(dict(cfg, workers=1), include_rows=True)
    three = detid.run_experiment(dict(cfg, workers=3), include_rows=True)
    assert json.dumps(one, sort_keys=True) == json.dumps(three, sort_keys=True)
    assert len(one["pairs"]) == 8
    with pytest.raises(detid.ConfigError):
        detid.run_experiment(dict(cfg, verifier="sideways"))


def test_moment_validation_small():
    r = detid.moment_validation(draws=2000, seed=1, skew_test=False)
    assert len(r["checks"]) == 60


def test_packing_and_cli(tmp_path):
    spec = {"n": 64, "target_size": 8, "A": 1.0, "A_prime": 0.5, "a": 0.05, "seed": 1, "kind": "prop1"}
    cw = detid.generate_packing(spec)
    assert 0 < len(cw) <= 8 and all(len(u) == 64 for u in cw)
    code, _, err = detid.run_cli(["bounds", "--sweep", "n=100,1000", "-o", str(tmp_path), "-q"])
    assert code == 0, err
    assert (tmp_path / "bounds.csv").read_text().startswith("n,R_upper")
    assert detid.run_cli(["bogus"])[0] == 2
