"""Deterministic random-instance generation.

Every consumer derives an independent RNG substream from a master seed
and an integer path, so batch results never depend on evaluation order
or parallelism degree, and any single instance can be regenerated in
isolation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import ComplexMatrix, PsdMatrix, random_psd

#: q values every sweep always visits, per the sampling plan.
Q_GRID_FIXED = tuple(round(0.1 * i, 1) for i in range(11))


def substream(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for (seed, path...) via SeedSequence spawn keys."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(p) for p in path)))


def random_square(rng: np.random.Generator, n: int, field: str) -> ComplexMatrix:
    """n x n matrix of iid standard normals (complex: independent parts)."""
    g = rng.standard_normal((n, n))
    if field == "complex":
        g = g + 1j * rng.standard_normal((n, n))
    return ComplexMatrix(g)


def random_unitary(rng: np.random.Generator, n: int, field: str) -> ComplexMatrix:
    """Haar-ish unitary from the QR factorization of a Gaussian matrix."""
    q, r = np.linalg.qr(random_square(rng, n, field).array)
    # normalize the phase so the factorization is unique
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return ComplexMatrix(q)


@dataclass(frozen=True)
class SweepInstance:
    """One sampled eigenvalue-form instance for batch sweeps."""

    index: int
    n: int
    rank_a: int
    rank_b: int
    field: str
    q: float
    k: int
    a: PsdMatrix
    b: PsdMatrix

    def digest(self) -> dict:
        return {
            "index": self.index,
            "n": self.n,
            "rank_a": self.rank_a,
            "rank_b": self.rank_b,
            "field": self.field,
            "q": self.q,
            "k": self.k,
        }


def q_pool(seed: int, extra: int = 10) -> tuple[float, ...]:
    """The fixed q grid {0, 0.1, ..., 1} plus ``extra`` uniform draws."""
    rng = substream(seed, 0)
    return Q_GRID_FIXED + tuple(float(v) for v in rng.uniform(0.0, 1.0, size=extra))


def sweep_instance(
    seed: int,
    index: int,
    dims=(1, 2, 3, 4, 5, 6, 7, 8),
    fields=("real", "complex"),
    qs: tuple[float, ...] | None = None,
) -> SweepInstance:
    """Instance ``index`` of the sweep for ``seed``: dimension, ranks,
    field, q and k all drawn from the instance's own substream."""
    if qs is None:
        qs = q_pool(seed)
    rng = substream(seed, 1, index)
    n = int(dims[rng.integers(len(dims))])
    rank_a = int(rng.integers(1, n + 1))
    rank_b = int(rng.integers(1, n + 1))
    field = str(fields[rng.integers(len(fields))])
    q = float(qs[rng.integers(len(qs))])
    k = int(rng.integers(1, n + 1))
    a = random_psd(n, rank_a, rng, field)
    b = random_psd(n, rank_b, rng, field)
    return SweepInstance(
        index=index, n=n, rank_a=rank_a, rank_b=rank_b, field=field, q=q, k=k, a=a, b=b
    )


def sweep_instances(seed: int, count: int, **kwargs):
    """Yield ``count`` sweep instances (order-independent substreams)."""
    qs = kwargs.pop("qs", None) or q_pool(seed)
    for i in range(count):
        yield sweep_instance(seed, i, qs=qs, **kwargs)
