"""Numerical tolerance policy shared across the package.

Every tolerance is relative to a scale that the consuming routine
documents (typically ``max(1, |rhs|)`` for inequality margins and
``max(1, lambda_max)`` or ``max(1, max |entry|)`` for matrix residuals),
so absolute and relative control coincide near unit scale.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Frozen bundle of the package-wide numerical tolerances."""

    #: Hermitian defect allowed when accepting a matrix as Hermitian,
    #: relative to max(1, max |entry|).
    herm: float = 1e-12
    #: Eigenvalue negativity allowed when accepting a matrix as PSD,
    #: relative to max(1, lambda_max).
    psd: float = 1e-10
    #: Reconstruction / unitarity residual for eigendecompositions.
    eig: float = 1e-11
    #: Residual for matrix functions built on top of the eigensolver
    #: (square root, pseudo-inverse).
    fun: float = 1e-10
    #: Slack granted to inequality checks: a report holds iff
    #: margin >= -check * max(1, |rhs|).
    check: float = 1e-9
    #: Relative eigenvalue cutoff used for numerical rank decisions.
    rank: float = 1e-12
    #: A hunted counterexample only counts when its relative margin is
    #: below -violation; anything closer to zero is roundoff territory.
    violation: float = 1e-6


DEFAULT_TOLS = Tolerances()
