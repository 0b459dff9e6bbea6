"""Symmetric gauge functions, unitarily invariant norms, and weak
majorization.

Oracles: hand-computed gauge values on tiny vectors, the gauge axioms
themselves (checked by sampling), and the Ky Fan / Schatten crossover
identities kyfan:1 == schatten:inf and kyfan:n == schatten:1.
"""

import math

import numpy as np
import pytest

from agmcs import (
    ComplexMatrix,
    GaugeSpec,
    SCHATTEN_GRID,
    elementwise_product_abs,
    gauge_eval,
    holder_gauge_check,
    norm_grid,
    ui_norm,
    weak_majorize,
)
from agmcs.sampling import random_unitary, substream


# ---------------------------------------------------------------------------
# GaugeSpec parsing and validation


@pytest.mark.parametrize(
    "text,kind,p,k",
    [
        ("schatten:1", "schatten", 1.0, None),
        ("schatten:2", "schatten", 2.0, None),
        ("schatten:1.5", "schatten", 1.5, None),
        ("schatten:inf", "schatten", math.inf, None),
        ("kyfan:1", "kyfan", None, 1),
        ("kyfan:7", "kyfan", None, 7),
        ("  KYFAN:3  ", "kyfan", None, 3),
    ],
)
def test_spec_parse(text, kind, p, k):
    spec = GaugeSpec.parse(text)
    assert spec.kind == kind and spec.p == p and spec.k == k


def test_spec_str_roundtrip():
    for text in ["schatten:1", "schatten:1.5", "schatten:inf", "kyfan:1", "kyfan:12"]:
        spec = GaugeSpec.parse(text)
        assert str(spec) == text
        assert GaugeSpec.parse(str(spec)) == spec


@pytest.mark.parametrize(
    "bad",
    ["schatten:0.5", "schatten:0", "schatten:-1", "kyfan:0", "kyfan:-2",
     "frobenius:2", "schatten", "kyfan", "schatten:xyz"],
)
def test_spec_parse_rejects(bad):
    with pytest.raises(ValueError):
        GaugeSpec.parse(bad)


def test_spec_constructors_validate():
    with pytest.raises(ValueError):
        GaugeSpec.schatten(0.9)
    with pytest.raises(ValueError):
        GaugeSpec.ky_fan(0)
    with pytest.raises(ValueError):
        GaugeSpec("schatten", p=2.0, k=3)
    with pytest.raises(ValueError):
        GaugeSpec("kyfan", p=2.0, k=3)
    with pytest.raises(ValueError):
        GaugeSpec("nuclear")


# ---------------------------------------------------------------------------
# gauge evaluation: hand-computed values


def test_gauge_eval_examples():
    assert gauge_eval(GaugeSpec.schatten(1), [1.0, 1.0, 1.0]) == pytest.approx(3.0)
    assert gauge_eval(GaugeSpec.schatten(2), [3.0, 4.0]) == pytest.approx(5.0)
    assert gauge_eval(GaugeSpec.schatten(math.inf), [2.0, -7.0, 1.0]) == pytest.approx(7.0)
    assert gauge_eval(GaugeSpec.ky_fan(2), [5.0, 1.0, 3.0]) == pytest.approx(8.0)
    assert gauge_eval(GaugeSpec.ky_fan(1), [5.0, 1.0, 3.0]) == pytest.approx(5.0)
    # order beyond the length pads with zeros
    assert gauge_eval(GaugeSpec.ky_fan(10), [2.0, 1.0]) == pytest.approx(3.0)
    # p = 3 with hand-computable cube sums
    assert gauge_eval(GaugeSpec.schatten(3), [1.0, 2.0]) == pytest.approx(9.0 ** (1 / 3))


def test_gauge_eval_zero_and_empty():
    for spec in norm_grid(3):
        assert gauge_eval(spec, [0.0, 0.0, 0.0]) == 0.0
        assert gauge_eval(spec, []) == 0.0


def test_gauge_eval_rejects_nonfinite():
    with pytest.raises(ValueError):
        gauge_eval(GaugeSpec.schatten(2), [1.0, np.nan])
    with pytest.raises(ValueError):
        gauge_eval(GaugeSpec.ky_fan(1), [np.inf])


def test_gauge_eval_overflow_safe_large_p():
    # naive x**p would overflow; the scaled form must not
    val = gauge_eval(GaugeSpec.schatten(300.0), [1e155, 5e154])
    assert np.isfinite(val)
    assert val == pytest.approx(1e155, rel=1e-2)


# ---------------------------------------------------------------------------
# gauge axioms, by sampling


def _sample_vectors(rng, count=100, n=6):
    return [rng.standard_normal(n) * (10.0 ** rng.integers(-3, 4)) for _ in range(count)]


def test_gauge_axioms():
    rng = substream(101, 0)
    specs = norm_grid(6)
    for v in _sample_vectors(rng, 40):
        w = rng.standard_normal(v.size)
        t = float(rng.uniform(0.1, 10.0))
        for spec in specs:
            fv = gauge_eval(spec, v)
            assert fv > 0.0  # positivity on nonzero vectors
            assert gauge_eval(spec, t * v) == pytest.approx(t * fv, rel=1e-12)
            assert gauge_eval(spec, v + w) <= gauge_eval(spec, w) + fv + 1e-9 * fv


def test_gauge_symmetry():
    # invariant under permutations and sign flips
    rng = substream(102, 0)
    v = rng.standard_normal(7)
    specs = norm_grid(7)
    base = {str(s): gauge_eval(s, v) for s in specs}
    for _ in range(100):
        u = rng.permutation(v) * rng.choice([-1.0, 1.0], size=v.size)
        for spec in specs:
            assert gauge_eval(spec, u) == pytest.approx(base[str(spec)], rel=1e-13)


def test_kyfan_schatten_crossovers():
    rng = substream(103, 0)
    for _ in range(25):
        v = rng.standard_normal(5)
        top = np.sort(np.abs(v))[::-1]
        for k in range(1, 6):
            assert gauge_eval(GaugeSpec.ky_fan(k), v) == pytest.approx(
                gauge_eval(GaugeSpec.schatten(1), top[:k]), rel=1e-13
            )
        assert gauge_eval(GaugeSpec.ky_fan(1), v) == pytest.approx(
            gauge_eval(GaugeSpec.schatten(math.inf), v), rel=1e-13
        )
        assert gauge_eval(GaugeSpec.ky_fan(5), v) == pytest.approx(
            gauge_eval(GaugeSpec.schatten(1), v), rel=1e-13
        )


# ---------------------------------------------------------------------------
# unitarily invariant norms


def test_ui_norm_examples():
    eye = ComplexMatrix(np.eye(4))
    assert ui_norm(GaugeSpec.schatten(math.inf), eye) == pytest.approx(1.0)
    assert ui_norm(GaugeSpec.schatten(1), eye) == pytest.approx(4.0)
    d = ComplexMatrix(np.diag([1.0, -2.0, 3.0]))
    assert ui_norm(GaugeSpec.schatten(1), d) == pytest.approx(6.0)
    assert ui_norm(GaugeSpec.schatten(2), d) == pytest.approx(math.sqrt(14.0))
    assert ui_norm(GaugeSpec.ky_fan(2), d) == pytest.approx(5.0)


def test_ui_norm_rejects_raw_arrays():
    with pytest.raises(ValueError):
        ui_norm(GaugeSpec.schatten(2), np.eye(2))


def test_ui_norm_unitary_invariance():
    rng = substream(104, 0)
    specs = norm_grid(5)
    for field in ("real", "complex"):
        for i in range(10):
            m = rng.standard_normal((5, 5))
            if field == "complex":
                m = m + 1j * rng.standard_normal((5, 5))
            x = ComplexMatrix(m)
            u = random_unitary(rng, 5, field)
            w = random_unitary(rng, 5, field)
            rotated = ComplexMatrix(u.array @ m @ w.array)
            for spec in specs:
                a, b = ui_norm(spec, x), ui_norm(spec, rotated)
                assert abs(a - b) <= 1e-10 * max(1.0, a)


# ---------------------------------------------------------------------------
# weak majorization


def test_weak_majorize_examples():
    v = weak_majorize([1.0, 1.0], [2.0, 0.0])
    assert v.holds
    assert v.worst_partial_sum_gap == pytest.approx(0.0)

    v = weak_majorize([2.0, 0.0], [1.0, 1.0])
    assert not v.holds
    assert v.prefix_index == 1
    assert v.worst_partial_sum_gap == pytest.approx(-1.0)


def test_weak_majorize_reflexive_and_padding():
    rng = substream(105, 0)
    for _ in range(20):
        x = np.abs(rng.standard_normal(6))
        assert weak_majorize(x, x).holds
        # appending zeros to either side changes nothing
        assert weak_majorize(x, np.concatenate([x, [0.0, 0.0]])).holds
        assert weak_majorize(np.concatenate([x, [0.0]]), x).holds


def test_weak_majorize_transitive():
    rng = substream(106, 0)
    found = 0
    for _ in range(200):
        x, y, z = (np.abs(rng.standard_normal(5)) for _ in range(3))
        if weak_majorize(x, y, tol=0.0).holds and weak_majorize(y, z, tol=0.0).holds:
            found += 1
            assert weak_majorize(x, z).holds
    assert found > 5  # the sampler actually exercised the property


def test_weak_majorize_empty():
    v = weak_majorize([], [])
    assert v.holds and v.prefix_index == 0


def test_weak_majorize_gap_reporting():
    # sorted prefix gaps y - x: j=1 -> 4-3=1, j=2 -> 5-6=-1 (worst), j=3 -> 6-6=0
    v = weak_majorize([3.0, 3.0, 0.0], [4.0, 1.0, 1.0], tol=0.0)
    assert not v.holds
    assert v.worst_partial_sum_gap == pytest.approx(-1.0)
    assert v.prefix_index == 2


# ---------------------------------------------------------------------------
# elementwise products and the Hoelder inequality


def test_elementwise_product_abs():
    assert np.allclose(elementwise_product_abs([1.0, 2.0], [3.0, 4.0]), [3.0, 8.0])
    assert np.allclose(elementwise_product_abs([-1.0, 2.0], [3.0, -4.0]), [3.0, 8.0])
    assert np.allclose(elementwise_product_abs([0.0, 0.0], [3.0, 4.0]), [0.0, 0.0])
    with pytest.raises(ValueError):
        elementwise_product_abs([1.0], [1.0, 2.0])


def test_holder_equality_case():
    rep = holder_gauge_check(GaugeSpec.schatten(1), np.ones(4), np.ones(4), 2.0)
    assert rep.holds
    assert rep.lhs == pytest.approx(rep.rhs, rel=1e-12)


def test_holder_hand_example():
    # phi = schatten:1, x = (2,1), y = (1,2), p = 2:
    # lhs = |2*1| + |1*2| = 4; rhs = sqrt(5) * sqrt(5) = 5
    rep = holder_gauge_check(GaugeSpec.schatten(1), [2.0, 1.0], [1.0, 2.0], 2.0)
    assert rep.lhs == pytest.approx(4.0)
    assert rep.rhs == pytest.approx(5.0)
    assert rep.holds and rep.margin == pytest.approx(1.0)


def test_holder_random_sweep():
    rng = substream(107, 0)
    specs = norm_grid(6)
    for _ in range(50):
        x = rng.standard_normal(6)
        y = rng.standard_normal(6)
        for p in (1.5, 2.0, 3.0):
            for spec in specs:
                rep = holder_gauge_check(spec, x, y, p)
                assert rep.holds, (str(spec), p, rep.margin)


def test_holder_rejects_bad_exponent():
    for p in (1.0, 0.5, math.inf, -2.0):
        with pytest.raises(ValueError):
            holder_gauge_check(GaugeSpec.schatten(1), [1.0], [1.0], p)


def test_holder_report_shape():
    rep = holder_gauge_check(GaugeSpec.ky_fan(2), [1.0, 2.0, 3.0], [1.0, 1.0, 1.0], 3.0)
    d = rep.to_json_dict()
    assert d["name"] == "holder-gauge"
    assert d["instance"]["phi"] == "kyfan:2"
    assert d["instance"]["p"] == 3.0


# ---------------------------------------------------------------------------
# Fan dominance and the norm battery


def test_fan_dominance_consistency():
    # if the Ky Fan comparisons all pass, every norm in the battery passes
    rng = substream(108, 0)
    for _ in range(30):
        x = np.abs(rng.standard_normal(5))
        slack = np.abs(rng.standard_normal(5)) * 0.2
        y = np.sort(x)[::-1] + np.cumsum(slack) / 5.0  # dominates x prefix-wise
        assert weak_majorize(x, y, tol=0.0).holds
        for k in range(1, 6):
            spec = GaugeSpec.ky_fan(k)
            assert gauge_eval(spec, x) <= gauge_eval(spec, y) + 1e-12
        # schatten:1 and schatten:inf are the boundary cases of the battery
        assert gauge_eval(GaugeSpec.schatten(1), x) <= gauge_eval(GaugeSpec.schatten(1), y) + 1e-12


def test_norm_grid_composition():
    grid = norm_grid(4)
    kinds = [str(s) for s in grid]
    assert kinds[:4] == ["kyfan:1", "kyfan:2", "kyfan:3", "kyfan:4"]
    assert "schatten:1" in kinds and "schatten:inf" in kinds
    assert len(grid) == 4 + len(SCHATTEN_GRID)
    with pytest.raises(ValueError):
        norm_grid(0)
