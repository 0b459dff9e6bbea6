"""Randomized counterexample search.

The false variant sigma_k(AB) <= sigma_k(C(q)C(1-q)) genuinely fails,
and this module's job is to find witnesses: strict-descent hill
climbing over PSD pairs with random restarts, random Hermitian
perturbations re-projected to the PSD cone by eigenvalue clamping, and
a line search over the q grid at every evaluation.  Aimed at the true
inequalities, the same search must come back empty-handed (margins
never beyond tolerance noise) — that asymmetry is the experiment.

Search state is always a PSD pair (A, B).  Targets stated for general
(X, Y) are evaluated at X = A^(1/2), Y = B^(1/2), which loses no
generality: both sides of each such inequality depend on (X, Y) only
through X*X = A and Y*Y = B, since sigma_k(XY*)^2 = lambda_k(AB).

Everything is deterministic given the config: restart r uses the RNG
substream (seed, 0, r), candidates are evaluated in a fixed order, and
the reported violation is the first one in that order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .checks import (
    agm_singular_sides,
    check_agm_singular,
    check_false_variant,
    check_singular_form,
    check_theorem1,
    check_theorem2,
    false_variant_lhs,
    false_variant_rhs,
    singular_form_lhs,
    singular_form_rhs,
    theorem1_lhs,
    theorem1_rhs,
    theorem2_lhs,
    theorem2_rhs,
)
from .config import DEFAULT_TOLS
from .gauge import GaugeSpec, norm_grid
from .linalg import ComplexMatrix, PsdMatrix, _eigh_raw, _hermitize
from .report import CheckReport
from . import sampling, serialize

#: Checker targets the hunt knows how to aim at.
TARGETS = ("false-variant", "theorem2", "theorem1", "singular-form", "agm-singular")

#: Targets whose checker consumes general matrices (X, Y) rather than
#: the PSD pair itself.
_XY_TARGETS = frozenset({"theorem1", "singular-form", "agm-singular"})

#: Consecutive rejections before the perturbation step is halved.
_SHRINK_AFTER = 20
_STEP_FLOOR = 1e-3


@dataclass(frozen=True)
class HuntConfig:
    """Search configuration; ``evaluations`` = restarts * (steps + 1)."""

    target: str = "false-variant"
    dims: tuple[int, ...] = (2, 3, 4, 5, 6)
    field: str = "both"
    q_grid: tuple[float, ...] = (0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.8, 0.9, 0.95)
    k_policy: int | str = "all"
    restarts: int = 160
    steps_per_restart: int = 620
    step_scale: float = 0.25
    seed: int = 0
    violation_threshold: float = DEFAULT_TOLS.violation

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ValueError(f"unknown target {self.target!r}; choose from {TARGETS}")
        if not self.dims or any(int(d) < 1 for d in self.dims):
            raise ValueError(f"dims must be a nonempty set of sizes >= 1, got {self.dims}")
        if self.field not in ("real", "complex", "both"):
            raise ValueError(f"field must be real, complex or both, got {self.field!r}")
        if not self.q_grid:
            raise ValueError("q_grid must not be empty")
        if any(not 0.0 <= float(q) <= 1.0 for q in self.q_grid):
            raise ValueError(f"q_grid values must lie in [0, 1], got {self.q_grid}")
        if self.restarts < 1 or self.steps_per_restart < 1:
            raise ValueError("restarts and steps_per_restart must be >= 1")
        if not self.step_scale > 0.0:
            raise ValueError("step_scale must be positive")
        if not self.violation_threshold > 0.0:
            raise ValueError("violation_threshold must be positive")
        if self.k_policy != "all" and (
            not isinstance(self.k_policy, int) or self.k_policy < 1
        ):
            raise ValueError(f"k_policy must be 'all' or a fixed k >= 1, got {self.k_policy}")
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "q_grid", tuple(float(q) for q in self.q_grid))

    @property
    def evaluations(self) -> int:
        return self.restarts * (self.steps_per_restart + 1)

    def to_json_dict(self) -> dict:
        return {
            "target": self.target,
            "dims": list(self.dims),
            "field": self.field,
            "q_grid": list(self.q_grid),
            "k_policy": self.k_policy,
            "restarts": self.restarts,
            "steps_per_restart": self.steps_per_restart,
            "step_scale": self.step_scale,
            "seed": self.seed,
            "violation_threshold": self.violation_threshold,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "HuntConfig":
        kw = dict(d)
        for key in ("dims", "q_grid"):
            if key in kw:
                kw[key] = tuple(kw[key])
        return cls(**kw)


@dataclass(frozen=True)
class Violation:
    """A certified counterexample: full instance plus the margin it
    produces, self-verifying via ``reverify``."""

    target: str
    a: ComplexMatrix
    b: ComplexMatrix
    q: float
    k: int | None
    phi: str | None
    field: str
    n: int
    lhs: float
    rhs: float
    margin: float
    rel_margin: float
    seed_path: tuple[int, int, int]
    evaluations: int

    def reverify(self, tol: float = DEFAULT_TOLS.check) -> CheckReport:
        """Run the public target checker on the stored instance."""
        return run_target_checker(
            self.target, self.a, self.b, q=self.q, k=self.k, phi=self.phi, tol=tol
        )

    def to_json_dict(self) -> dict:
        return {
            "kind": "violation",
            "target": self.target,
            "a": serialize.matrix_to_dict(self.a),
            "b": serialize.matrix_to_dict(self.b),
            "q": self.q,
            "k": self.k,
            "phi": self.phi,
            "field": self.field,
            "n": self.n,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "rel_margin": self.rel_margin,
            "seed_path": list(self.seed_path),
            "evaluations": self.evaluations,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "Violation":
        kind = "psd" if d["target"] not in _XY_TARGETS else "any"
        return cls(
            target=d["target"],
            a=serialize.matrix_from_dict(d["a"], kind),
            b=serialize.matrix_from_dict(d["b"], kind),
            q=float(d["q"]),
            k=None if d.get("k") is None else int(d["k"]),
            phi=d.get("phi"),
            field=d["field"],
            n=int(d["n"]),
            lhs=float(d["lhs"]),
            rhs=float(d["rhs"]),
            margin=float(d["margin"]),
            rel_margin=float(d["rel_margin"]),
            seed_path=tuple(int(v) for v in d["seed_path"]),
            evaluations=int(d["evaluations"]),
        )


@dataclass(frozen=True)
class NotFound:
    """Search exhausted its budget without a qualifying violation."""

    target: str
    evaluations: int
    min_rel_margin: float
    min_margin: float
    argmin: Mapping[str, Any] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "kind": "not_found",
            "target": self.target,
            "evaluations": self.evaluations,
            "min_rel_margin": self.min_rel_margin,
            "min_margin": self.min_margin,
            "argmin": dict(self.argmin),
        }


def run_target_checker(
    target: str,
    a: ComplexMatrix,
    b: ComplexMatrix,
    q: float | None = None,
    k: int | None = None,
    phi: str | None = None,
    tol: float = DEFAULT_TOLS.check,
) -> CheckReport:
    """Dispatch to the public checker behind a hunt target name."""
    if target == "theorem2":
        return check_theorem2(a, b, q, k, tol)
    if target == "false-variant":
        return check_false_variant(a, b, q, k, tol)
    if target == "singular-form":
        return check_singular_form(a, b, q, k, tol)
    if target == "agm-singular":
        return check_agm_singular(a, b, k, tol)
    if target == "theorem1":
        gauge = None if phi is None else GaugeSpec.parse(phi)
        return check_theorem1(a, b, q, gauge, tol)
    raise ValueError(f"unknown target {target!r}")


def _k_range(k_policy, length: int) -> range:
    if k_policy == "all":
        return range(1, length + 1)
    k = int(k_policy)
    if k > length:
        return range(0)
    return range(k, k + 1)


def _evaluate(
    target: str,
    a_arr: np.ndarray,
    b_arr: np.ndarray,
    q_grid,
    k_policy,
    phis,
) -> tuple[float, dict]:
    """Minimum relative margin of the target over the (q, k/phi) grid.

    Works on raw arrays through the same lhs/rhs helpers the public
    checkers use, so margins here and there are bit-identical.  The
    left side of every target is independent of q and computed once."""
    best = math.inf
    info: dict[str, Any] = {}
    if target in _XY_TARGETS:
        # state is (A, B); the checker arguments are the PSD roots
        wa, va = _eigh_raw(a_arr)
        wb, vb = _eigh_raw(b_arr)
        x = _hermitize((va * np.sqrt(np.maximum(wa, 0.0))) @ va.conj().T)
        y = _hermitize((vb * np.sqrt(np.maximum(wb, 0.0))) @ vb.conj().T)
    if target == "agm-singular":
        lhs_vec, rhs_vec = agm_singular_sides(x, y)
        rel = (rhs_vec - lhs_vec) / np.maximum(1.0, np.abs(rhs_vec))
        for k in _k_range(k_policy, rel.size):
            if rel[k - 1] < best:
                best = float(rel[k - 1])
                info = {
                    "q": None,
                    "k": k,
                    "lhs": float(lhs_vec[k - 1]),
                    "rhs": float(rhs_vec[k - 1]),
                }
        return best, info
    if target == "theorem2":
        lhs_vec = theorem2_lhs(a_arr, b_arr)
        rhs_at = lambda q: theorem2_rhs(a_arr, b_arr, q)  # noqa: E731
    elif target == "false-variant":
        lhs_vec = false_variant_lhs(a_arr, b_arr)
        rhs_at = lambda q: false_variant_rhs(a_arr, b_arr, q)  # noqa: E731
    elif target == "singular-form":
        lhs_vec = singular_form_lhs(x, y)
        rhs_at = lambda q: singular_form_rhs(x, y, q)  # noqa: E731
    elif target == "theorem1":
        lhs_vec = theorem1_lhs(x, y, phis)
        rhs_at = lambda q: theorem1_rhs(x, y, q, phis)  # noqa: E731
    else:  # pragma: no cover - guarded by HuntConfig validation
        raise ValueError(f"unknown target {target!r}")
    for q in q_grid:
        rhs_vec = rhs_at(q)
        rel = (rhs_vec - lhs_vec) / np.maximum(1.0, np.abs(rhs_vec))
        if target == "theorem1":
            i = int(np.argmin(rel))
            if rel[i] < best:
                best = float(rel[i])
                info = {
                    "q": float(q),
                    "k": None,
                    "phi": str(phis[i]),
                    "lhs": float(lhs_vec[i]),
                    "rhs": float(rhs_vec[i]),
                }
            continue
        for k in _k_range(k_policy, rel.size):
            if rel[k - 1] < best:
                best = float(rel[k - 1])
                info = {
                    "q": float(q),
                    "k": k,
                    "lhs": float(lhs_vec[k - 1]),
                    "rhs": float(rhs_vec[k - 1]),
                }
    return best, info


def _clamp_psd(arr: np.ndarray) -> np.ndarray:
    """Project a Hermitian array onto the PSD cone (eigenvalue clamping).

    The result is PSD by construction, which is exactly the PsdMatrix
    admission invariant."""
    w, v = _eigh_raw(arr)
    return _hermitize((v * np.maximum(w, 0.0)) @ v.conj().T)


# Widest allowed Frobenius-norm ratio between the two climb factors.
# Every target is jointly degree-2 homogeneous in (A, B) -> (tA, tB),
# so overall scale carries no information; keeping ||A||*||B|| = 1 and
# the ratio capped stops strict descent from chasing eigensolver noise
# (which grows with scale while max(1, rhs) pins the margin denominator)
# into regions where the computed margin measures the hardware.
_RATIO_CAP = 1e6


def _rescale_pair(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if not (na > 0.0 and nb > 0.0):
        return a, b
    rho = math.sqrt(min(max(na / nb, 1.0 / _RATIO_CAP), _RATIO_CAP))
    return a * (rho / na), b * (1.0 / (rho * nb))


def _random_hermitian(rng: np.random.Generator, n: int, field: str) -> np.ndarray:
    g = rng.standard_normal((n, n))
    if field == "complex":
        g = g + 1j * rng.standard_normal((n, n))
    return _hermitize(g)


def _start_pair(rng, n: int, field: str) -> tuple[np.ndarray, np.ndarray]:
    def one():
        g = rng.standard_normal((n, n))
        if field == "complex":
            g = g + 1j * rng.standard_normal((n, n))
        return _hermitize(g @ g.conj().T)

    return one(), one()


def _hunt_restart(cfg: HuntConfig, restart: int, phis_cache: dict):
    """Run one hill-climbing restart; yields (margin, info, state, step_index)."""
    rng = sampling.substream(cfg.seed, 0, restart)
    n = int(cfg.dims[rng.integers(len(cfg.dims))])
    if cfg.field == "both":
        field = ("real", "complex")[int(rng.integers(2))]
    else:
        field = cfg.field
    phis = None
    if cfg.target == "theorem1":
        phis = phis_cache.get(n)
        if phis is None:
            phis = norm_grid(n)
            phis_cache[n] = phis
    a, b = _rescale_pair(*_start_pair(rng, n, field))
    margin, info = _evaluate(cfg.target, a, b, cfg.q_grid, cfg.k_policy, phis)
    yield margin, info, (a, b, n, field), 0
    step = cfg.step_scale
    rejects = 0
    for step_index in range(1, cfg.steps_per_restart + 1):
        side = int(rng.integers(2))
        base = a if side == 0 else b
        pert = _random_hermitian(rng, n, field)
        pnorm = np.linalg.norm(pert)
        if pnorm > 0.0:
            pert *= step * max(np.linalg.norm(base), 1e-6) / pnorm
        cand = _clamp_psd(base + pert)
        ca, cb = _rescale_pair(*((cand, b) if side == 0 else (a, cand)))
        cand_margin, cand_info = _evaluate(
            cfg.target, ca, cb, cfg.q_grid, cfg.k_policy, phis
        )
        if cand_margin < margin:
            a, b, margin, info = ca, cb, cand_margin, cand_info
            rejects = 0
        else:
            rejects += 1
            if rejects >= _SHRINK_AFTER:
                step = max(step / 2.0, _STEP_FLOOR)
                rejects = 0
        yield margin, info, (a, b, n, field), step_index


def _violation_from(
    cfg: HuntConfig, state, info, margin: float, restart: int, step: int, evals: int
) -> Violation:
    a_arr, b_arr, n, fld = state
    if cfg.target in _XY_TARGETS:
        wa, va = _eigh_raw(a_arr)
        wb, vb = _eigh_raw(b_arr)
        a_m: ComplexMatrix = ComplexMatrix(
            _hermitize((va * np.sqrt(np.maximum(wa, 0.0))) @ va.conj().T)
        )
        b_m: ComplexMatrix = ComplexMatrix(
            _hermitize((vb * np.sqrt(np.maximum(wb, 0.0))) @ vb.conj().T)
        )
    else:
        a_m = PsdMatrix(a_arr)
        b_m = PsdMatrix(b_arr)
    return Violation(
        target=cfg.target,
        a=a_m,
        b=b_m,
        q=info.get("q"),
        k=info.get("k"),
        phi=info.get("phi"),
        field=fld,
        n=n,
        lhs=info["lhs"],
        rhs=info["rhs"],
        margin=info["rhs"] - info["lhs"],
        rel_margin=margin,
        seed_path=(cfg.seed, restart, step),
        evaluations=evals,
    )


def hunt_counterexample(cfg: HuntConfig):
    """Hill-climb with random restarts until the target's relative
    margin drops below -violation_threshold; returns the first such
    Violation (in deterministic restart/step order) or NotFound with
    the search statistics."""
    evals = 0
    best = math.inf
    best_digest: dict[str, Any] = {}
    phis_cache: dict[int, tuple] = {}
    for restart in range(cfg.restarts):
        for margin, info, state, step_index in _hunt_restart(cfg, restart, phis_cache):
            evals += 1
            if margin < best:
                best = margin
                best_digest = dict(info)
                best_digest.update(
                    {"restart": restart, "step": step_index, "n": state[2], "field": state[3]}
                )
            if margin < -cfg.violation_threshold:
                return _violation_from(
                    cfg, state, info, margin, restart, step_index, evals
                )
    return NotFound(
        target=cfg.target,
        evaluations=evals,
        min_rel_margin=best,
        min_margin=best_digest.get("rhs", 0.0) - best_digest.get("lhs", 0.0),
        argmin=best_digest,
    )


def stress_sweep(cfg: HuntConfig) -> dict:
    """Pure random sampling (no hill climb): restarts * steps_per_restart
    instances over the config grid, each evaluated on every (q, k) cell;
    returns per-(dim, q, k) min/median margins plus global statistics."""
    samples = cfg.restarts * cfg.steps_per_restart
    cells: dict[tuple, list[float]] = {}
    best = math.inf
    argmin: dict[str, Any] = {}
    phis_cache: dict[int, tuple] = {}
    for i in range(samples):
        rng = sampling.substream(cfg.seed, 1, i)
        n = int(cfg.dims[rng.integers(len(cfg.dims))])
        field = (
            ("real", "complex")[int(rng.integers(2))] if cfg.field == "both" else cfg.field
        )
        rank_a = int(rng.integers(1, n + 1))
        rank_b = int(rng.integers(1, n + 1))
        ga = rng.standard_normal((n, rank_a))
        gb = rng.standard_normal((n, rank_b))
        if field == "complex":
            ga = ga + 1j * rng.standard_normal((n, rank_a))
            gb = gb + 1j * rng.standard_normal((n, rank_b))
        a = _hermitize(ga @ ga.conj().T)
        b = _hermitize(gb @ gb.conj().T)
        phis = None
        if cfg.target == "theorem1":
            phis = phis_cache.setdefault(n, norm_grid(n))
        # the agm target has no q parameter; collapse its grid to one cell
        q_cells = (None,) if cfg.target == "agm-singular" else cfg.q_grid
        for q in q_cells:
            sub_grid = cfg.q_grid[:1] if q is None else (q,)
            margin, info = _evaluate(cfg.target, a, b, sub_grid, cfg.k_policy, phis)
            key = (n, None if q is None else float(q), info.get("k"))
            cells.setdefault(key, []).append(margin)
            if margin < best:
                best = margin
                argmin = dict(info, sample=i, n=n, field=field)
    rows = []
    def cell_key(t):
        return (t[0], -1.0 if t[1] is None else t[1], t[2] if t[2] else 0)

    for (n, q, k) in sorted(cells, key=cell_key):
        vals = cells[(n, q, k)]
        rows.append(
            {
                "n": n,
                "q": q,
                "k": k,
                "count": len(vals),
                "min_margin": float(min(vals)),
                "median_margin": float(np.median(vals)),
            }
        )
    return {
        "target": cfg.target,
        "samples": samples,
        "min_margin": best,
        "argmin": argmin,
        "cells": rows,
    }
