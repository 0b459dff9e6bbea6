"""Randomized counterexample search.

Oracles: the public checkers themselves (every found violation must
reverify through them), a committed fixture with its exact margin, and
determinism of the whole search under a fixed seed.
"""

import json
import math
from pathlib import Path

import numpy as np
import pytest

from agmcs import (
    HuntConfig,
    NotFound,
    PsdMatrix,
    Violation,
    hunt_counterexample,
    stress_sweep,
)
from agmcs.hunt import TARGETS, run_target_checker
from agmcs.serialize import dumps_canonical

FIXTURE = Path(__file__).parent / "fixtures" / "false_variant_violation.json"

# small deterministic budget that reliably finds the false variant
SMALL = dict(seed=7, restarts=40, steps_per_restart=200, dims=(2, 3))


# ---------------------------------------------------------------------------
# configuration


def test_config_defaults_and_budget():
    cfg = HuntConfig()
    assert cfg.target == "false-variant"
    assert cfg.evaluations == cfg.restarts * (cfg.steps_per_restart + 1)
    assert cfg.evaluations <= 100_000


def test_config_validation():
    with pytest.raises(ValueError):
        HuntConfig(target="nonsense")
    with pytest.raises(ValueError):
        HuntConfig(dims=())
    with pytest.raises(ValueError):
        HuntConfig(dims=(0,))
    with pytest.raises(ValueError):
        HuntConfig(field="quaternion")
    with pytest.raises(ValueError):
        HuntConfig(q_grid=())
    with pytest.raises(ValueError):
        HuntConfig(q_grid=(1.5,))
    with pytest.raises(ValueError):
        HuntConfig(restarts=0)
    with pytest.raises(ValueError):
        HuntConfig(k_policy="worst")
    with pytest.raises(ValueError):
        HuntConfig(k_policy=0)
    with pytest.raises(ValueError):
        HuntConfig(violation_threshold=0.0)


def test_config_json_roundtrip():
    cfg = HuntConfig(target="theorem2", dims=(2, 4), seed=11, k_policy=2)
    again = HuntConfig.from_json_dict(json.loads(json.dumps(cfg.to_json_dict())))
    assert again == cfg


# ---------------------------------------------------------------------------
# finding the genuinely false statement


def test_hunt_finds_false_variant():
    v = hunt_counterexample(HuntConfig(target="false-variant", **SMALL))
    assert isinstance(v, Violation)
    assert v.rel_margin < -1e-6
    assert v.margin < 0.0
    assert v.n in (2, 3)
    assert v.seed_path[0] == 7
    rep = v.reverify()
    assert not rep.holds
    # the stored margin is the checker's margin, bit for bit
    assert rep.margin == v.margin
    assert rep.lhs == v.lhs and rep.rhs == v.rhs


def test_hunt_is_deterministic():
    cfg = HuntConfig(target="false-variant", **SMALL)
    v1 = hunt_counterexample(cfg)
    v2 = hunt_counterexample(cfg)
    assert dumps_canonical(v1.to_json_dict()) == dumps_canonical(v2.to_json_dict())


def test_violation_json_roundtrip():
    v = hunt_counterexample(HuntConfig(target="false-variant", **SMALL))
    d = json.loads(dumps_canonical(v.to_json_dict()))
    again = Violation.from_json_dict(d)
    assert again.margin == v.margin
    assert again.seed_path == v.seed_path
    assert np.array_equal(again.a.array, v.a.array)
    assert np.array_equal(again.b.array, v.b.array)
    rep = again.reverify()
    assert rep.margin == v.margin


def test_committed_fixture_still_violates():
    d = json.loads(FIXTURE.read_text())
    v = Violation.from_json_dict(d)
    assert v.target == "false-variant"
    rep = v.reverify()
    assert not rep.holds
    assert rep.margin < -1e-6
    # reproduction of the stored sides is exact on this machine's libm;
    # allow float-level drift in case BLAS kernels differ
    assert abs(rep.margin - v.margin) <= 1e-12 * max(1.0, abs(v.rhs))


# ---------------------------------------------------------------------------
# not finding the true statements


def test_hunt_true_targets_return_not_found():
    # tiny budget: the point is the NotFound payload, not exhaustiveness
    for target in ("theorem2", "singular-form"):
        cfg = HuntConfig(
            target=target, seed=3, restarts=4, steps_per_restart=40, dims=(2, 3)
        )
        res = hunt_counterexample(cfg)
        assert isinstance(res, NotFound)
        assert res.evaluations == cfg.evaluations
        assert res.min_rel_margin >= -1e-9
        d = res.to_json_dict()
        assert d["kind"] == "not_found"
        assert d["target"] == target
        assert "argmin" in d and "restart" in d["argmin"]


def test_hunt_dims_one_cannot_violate():
    cfg = HuntConfig(
        target="false-variant", seed=5, restarts=3, steps_per_restart=30, dims=(1,)
    )
    res = hunt_counterexample(cfg)
    # 1x1 matrices commute: the variant is an identity there
    assert isinstance(res, NotFound)
    assert res.min_rel_margin >= -1e-12


# ---------------------------------------------------------------------------
# checker dispatch


def test_run_target_checker_dispatch():
    rng = np.random.default_rng(17)
    g1, g2 = rng.standard_normal((3, 3)), rng.standard_normal((3, 3))
    a = PsdMatrix(g1 @ g1.T)
    b = PsdMatrix(g2 @ g2.T)
    for target in TARGETS:
        q = None if target == "agm-singular" else 0.4
        rep = run_target_checker(target, a, b, q=q, k=1)
        assert rep.holds or target == "false-variant"
    with pytest.raises(ValueError):
        run_target_checker("bogus", a, b, q=0.5)


def test_run_target_checker_theorem1_phi():
    rng = np.random.default_rng(18)
    g1, g2 = rng.standard_normal((3, 3)), rng.standard_normal((3, 3))
    a = PsdMatrix(g1 @ g1.T)
    b = PsdMatrix(g2 @ g2.T)
    rep = run_target_checker("theorem1", a, b, q=0.3, phi="schatten:2")
    assert rep.instance["phi"] == "schatten:2"
    assert rep.holds


# ---------------------------------------------------------------------------
# stress sweep


def test_stress_sweep_structure():
    cfg = HuntConfig(
        target="theorem2", seed=13, restarts=2, steps_per_restart=25, dims=(2, 3),
        q_grid=(0.2, 0.8),
    )
    out = stress_sweep(cfg)
    assert out["target"] == "theorem2"
    assert out["samples"] == 50
    assert out["min_margin"] >= -1e-9
    assert out["cells"], "sweep produced no cells"
    for row in out["cells"]:
        assert set(row) == {"n", "q", "k", "count", "min_margin", "median_margin"}
        assert row["q"] in (0.2, 0.8)
        assert row["min_margin"] <= row["median_margin"]
    # cells are sorted by (n, q, k)
    keys = [(r["n"], r["q"], r["k"]) for r in out["cells"]]
    assert keys == sorted(keys)


def test_stress_sweep_agm_collapses_q():
    cfg = HuntConfig(
        target="agm-singular", seed=14, restarts=1, steps_per_restart=20, dims=(2,),
    )
    out = stress_sweep(cfg)
    assert all(row["q"] is None for row in out["cells"])
    assert out["min_margin"] >= -1e-9


def test_stress_sweep_deterministic():
    cfg = HuntConfig(
        target="false-variant", seed=15, restarts=1, steps_per_restart=30, dims=(3,),
        q_grid=(0.1, 0.9),
    )
    assert dumps_canonical(stress_sweep(cfg)) == dumps_canonical(stress_sweep(cfg))
