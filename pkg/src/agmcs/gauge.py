"""Symmetric gauge functions, unitarily invariant norms, weak
majorization, and the Hoelder inequality for gauge functions.

Two gauge families are supported, which together decide every norm
comparison this package makes: the Ky Fan norms (sum of the k largest
magnitudes; by Fan dominance they already settle |||X||| <= |||Z||| for
every unitarily invariant norm) and the Schatten-p norms (which carry
the Hoelder exponent structure).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .config import DEFAULT_TOLS
from .linalg import ComplexMatrix, _svals_raw
from .report import CheckReport

SCHATTEN_GRID = (1.0, 1.5, 2.0, 3.0, math.inf)


@dataclass(frozen=True)
class GaugeSpec:
    """Selector for a symmetric gauge function.

    ``kind`` is "schatten" (with exponent ``p`` >= 1, math.inf allowed)
    or "kyfan" (with order ``k`` >= 1).  The CLI string syntax is
    "schatten:p" (p numeric or "inf") and "kyfan:k".
    """

    kind: str
    p: float | None = None
    k: int | None = None

    def __post_init__(self):
        if self.kind == "schatten":
            if self.p is None or not (self.p >= 1.0):
                raise ValueError(f"Schatten exponent must be >= 1, got {self.p}")
            if self.k is not None:
                raise ValueError("Schatten spec takes no k")
        elif self.kind == "kyfan":
            if self.k is None or self.k < 1 or self.k != int(self.k):
                raise ValueError(f"Ky Fan order must be an integer >= 1, got {self.k}")
            if self.p is not None:
                raise ValueError("Ky Fan spec takes no p")
            object.__setattr__(self, "k", int(self.k))
        else:
            raise ValueError(f"unknown gauge kind {self.kind!r}")

    @classmethod
    def schatten(cls, p: float) -> "GaugeSpec":
        return cls("schatten", p=float(p))

    @classmethod
    def ky_fan(cls, k: int) -> "GaugeSpec":
        return cls("kyfan", k=k)

    @classmethod
    def parse(cls, text: str) -> "GaugeSpec":
        kind, sep, arg = text.strip().partition(":")
        if not sep:
            raise ValueError(f"gauge spec {text!r} must look like 'schatten:p' or 'kyfan:k'")
        kind = kind.strip().lower()
        arg = arg.strip().lower()
        if kind == "schatten":
            return cls.schatten(math.inf if arg == "inf" else float(arg))
        if kind == "kyfan":
            return cls.ky_fan(int(arg))
        raise ValueError(f"unknown gauge kind {kind!r}")

    def __str__(self) -> str:
        if self.kind == "schatten":
            if math.isinf(self.p):
                return "schatten:inf"
            return f"schatten:{self.p:g}"
        return f"kyfan:{self.k}"


class MajorizationVerdict(NamedTuple):
    """Outcome of a weak-majorization test x <_w y.

    ``worst_partial_sum_gap`` is the minimum over prefix lengths j of
    sum(y, j) - sum(x, j) (negative means x beat y somewhere);
    ``prefix_index`` is the 1-based j attaining it.
    """

    holds: bool
    worst_partial_sum_gap: float
    prefix_index: int


def gauge_eval(phi: GaugeSpec, v) -> float:
    """Evaluate the gauge function at a real vector.

    Permutation- and sign-invariant: only the sorted magnitudes matter.
    Ky Fan orders beyond the vector length see conceptual zero padding.
    """
    a = np.abs(np.asarray(v, dtype=np.float64).ravel())
    if not np.all(np.isfinite(a)):
        raise ValueError("gauge argument must be finite")
    if phi.kind == "schatten":
        if a.size == 0:
            return 0.0
        if math.isinf(phi.p):
            return float(np.max(a))
        if phi.p == 1.0:
            return float(np.sum(a))
        if phi.p == 2.0:
            return float(np.sqrt(np.sum(a * a)))
        # scale factored out for overflow safety at large p
        top = float(np.max(a))
        if top == 0.0:
            return 0.0
        return float(top * np.sum((a / top) ** phi.p) ** (1.0 / phi.p))
    k = min(phi.k, a.size)
    if k == 0:
        return 0.0
    return float(np.sum(np.sort(a)[::-1][:k]))


def ui_norm(phi: GaugeSpec, x: ComplexMatrix) -> float:
    """Unitarily invariant norm: the gauge applied to singular values."""
    if not isinstance(x, ComplexMatrix):
        raise ValueError("ui_norm expects a ComplexMatrix")
    return gauge_eval(phi, _svals_raw(x.array))


def weak_majorize(x, y, tol: float = DEFAULT_TOLS.check) -> MajorizationVerdict:
    """Test x <_w y: every prefix sum of the non-ascending rearrangement
    of x is at most the matching prefix sum of y, with slack
    tol * max(1, sum |y|).  Unequal lengths are zero-padded."""
    xv = np.asarray(x, dtype=np.float64).ravel()
    yv = np.asarray(y, dtype=np.float64).ravel()
    n = max(xv.size, yv.size)
    if n == 0:
        return MajorizationVerdict(True, 0.0, 0)
    xs = np.zeros(n)
    ys = np.zeros(n)
    xs[: xv.size] = np.sort(xv)[::-1]
    ys[: yv.size] = np.sort(yv)[::-1]
    # re-sort after padding in case entries are negative
    xs = np.sort(xs)[::-1]
    ys = np.sort(ys)[::-1]
    gaps = np.cumsum(ys) - np.cumsum(xs)
    worst = int(np.argmin(gaps))
    scale = max(1.0, float(np.sum(np.abs(yv))))
    gap = float(gaps[worst])
    return MajorizationVerdict(gap >= -tol * scale, gap, worst + 1)


def elementwise_product_abs(x, y) -> np.ndarray:
    """z_i = |x_i * y_i|, same length required."""
    xv = np.asarray(x, dtype=np.float64).ravel()
    yv = np.asarray(y, dtype=np.float64).ravel()
    if xv.size != yv.size:
        raise ValueError(f"length mismatch {xv.size} vs {yv.size}")
    return np.abs(xv * yv)


def holder_gauge_check(
    phi: GaugeSpec, x, y, p: float, tol: float = DEFAULT_TOLS.check
) -> CheckReport:
    """Hoelder inequality for gauge functions:

        Phi(|x . y|)  <=  Phi(|x|^p)^(1/p) * Phi(|y|^p')^(1/p')

    with 1/p + 1/p' = 1 and 1 < p < inf.
    """
    if not p > 1.0 or math.isinf(p):
        raise ValueError(f"Hoelder exponent must satisfy 1 < p < inf, got {p}")
    xv = np.abs(np.asarray(x, dtype=np.float64).ravel())
    yv = np.abs(np.asarray(y, dtype=np.float64).ravel())
    if xv.size != yv.size:
        raise ValueError(f"length mismatch {xv.size} vs {yv.size}")
    pc = p / (p - 1.0)
    lhs = gauge_eval(phi, xv * yv)
    rhs = gauge_eval(phi, xv**p) ** (1.0 / p) * gauge_eval(phi, yv**pc) ** (1.0 / pc)
    return CheckReport.from_sides(
        "holder-gauge",
        lhs,
        rhs,
        tol,
        {"phi": str(phi), "p": p, "length": int(xv.size)},
    )


def norm_grid(n: int, schatten_ps=SCHATTEN_GRID) -> tuple[GaugeSpec, ...]:
    """The finite norm battery used across sweeps: every Ky Fan order
    1..n plus the Schatten exponents in ``schatten_ps``.  By Fan
    dominance the Ky Fan family alone already decides unitarily
    invariant norm comparisons; the Schatten family adds exponent
    structure."""
    if n < 1:
        raise ValueError(f"norm grid needs n >= 1, got {n}")
    specs = [GaugeSpec.ky_fan(k) for k in range(1, n + 1)]
    specs.extend(GaugeSpec.schatten(p) for p in schatten_ps)
    return tuple(specs)
