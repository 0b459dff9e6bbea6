"""Dense linear algebra core: validated matrix types and spectral ops.

All eigenvalue work in the package funnels through the cyclic Jacobi
kernels in :mod:`agmcs._jacobi`; numpy supplies only storage, matmul and
elementwise arithmetic.  Singular values, PSD square roots,
pseudo-inverses and Loewner-order tests are all derived from that one
solver so the whole toolkit shares a single numerical root of trust
(tests cross-validate it against an independent reference solver).

Types form a small ladder:

``ComplexMatrix``  any finite dense matrix (float64 or complex128)
``HermitianMatrix``  square, Hermitian within tolerance (symmetrized)
``PsdMatrix``  Hermitian with spectrum >= -tol, eigensystem cached

Instances are immutable in practice: the wrapped array is made
read-only, and derived quantities are computed once.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _jacobi
from .config import DEFAULT_TOLS, Tolerances


class LinalgError(ValueError):
    """An input failed validation (shape, finiteness, symmetry, PSD-ness)."""


class ConvergenceError(LinalgError):
    """The Jacobi sweep cap was hit before the off-diagonal mass vanished."""

    def __init__(self, message: str, offdiag: float):
        super().__init__(message)
        self.offdiag = offdiag


# ---------------------------------------------------------------------------
# raw ndarray layer


def _working_array(array, field: str | None = None) -> np.ndarray:
    arr = np.asarray(array)
    if arr.ndim != 2:
        raise LinalgError(f"expected a 2-d array, got ndim={arr.ndim}")
    if field is None:
        field = "complex" if np.iscomplexobj(arr) else "real"
    if field == "complex":
        arr = np.ascontiguousarray(arr, dtype=np.complex128)
    elif field == "real":
        if np.iscomplexobj(arr):
            if np.max(np.abs(arr.imag), initial=0.0) != 0.0:
                raise LinalgError("cannot store a matrix with nonzero imaginary part as real")
            arr = arr.real
        arr = np.ascontiguousarray(arr, dtype=np.float64)
    else:
        raise LinalgError(f"field must be 'real' or 'complex', got {field!r}")
    if not np.all(np.isfinite(arr)):
        raise LinalgError("matrix entries must be finite")
    return arr


def _eigh_raw(arr: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Jacobi eigendecomposition, eigenvalues sorted non-ascending."""
    if arr.shape[0] == 0:
        return np.empty(0), np.empty((0, 0), dtype=arr.dtype)
    if np.iscomplexobj(arr):
        w, v, off, _ = _jacobi.jacobi_c128(arr, _jacobi.OFF_TOL, _jacobi.MAX_SWEEPS)
    else:
        w, v, off, _ = _jacobi.jacobi_f64(arr, _jacobi.OFF_TOL, _jacobi.MAX_SWEEPS)
    frob = np.linalg.norm(arr)
    if frob > 0.0 and off > _jacobi.OFF_TOL * frob:
        raise ConvergenceError(
            f"Jacobi solver left off-diagonal mass {off:.3e} after "
            f"{_jacobi.MAX_SWEEPS} sweeps (target {_jacobi.OFF_TOL * frob:.3e})",
            offdiag=float(off),
        )
    order = np.argsort(-w, kind="stable")
    return w[order], np.ascontiguousarray(v[:, order])


def _hermitize(arr: np.ndarray) -> np.ndarray:
    return (arr + arr.conj().T) / 2.0


def _svals_raw(arr: np.ndarray) -> np.ndarray:
    """Singular values of a rectangular array, non-ascending.

    One-sided Jacobi on the matrix itself: every sigma comes back with
    absolute error on the order of eps * sigma_max.  (A Gram-matrix
    route would floor small singular values at sqrt(eps) * sigma_max,
    which is exactly where tight inequality margins live.)
    """
    m, n = arr.shape
    if m == 0 or n == 0:
        return np.empty(0)
    work = arr if n <= m else arr.conj().T
    if np.iscomplexobj(work):
        sv, off, _ = _jacobi.svd_c128(np.ascontiguousarray(work), _jacobi.OFF_TOL, _jacobi.MAX_SWEEPS)
    else:
        sv, off, _ = _jacobi.svd_f64(np.ascontiguousarray(work), _jacobi.OFF_TOL, _jacobi.MAX_SWEEPS)
    if off > _jacobi.OFF_TOL:
        raise ConvergenceError(
            f"one-sided Jacobi left column inner products at {off:.3e} "
            f"after {_jacobi.MAX_SWEEPS} sweeps (target {_jacobi.OFF_TOL:.3e})",
            offdiag=float(off),
        )
    return np.sort(sv)[::-1].copy()


# ---------------------------------------------------------------------------
# spectra


@dataclass(frozen=True)
class Spectrum:
    """A non-ascending sequence of eigenvalues or singular values.

    ``kth(k)`` is 1-based, matching the usual lambda_k / sigma_k sub-
    scripts; plain indexing stays 0-based.
    """

    values: np.ndarray
    kind: str

    def __post_init__(self):
        vals = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if vals.ndim != 1:
            raise LinalgError("spectrum values must be a 1-d array")
        if not np.all(np.isfinite(vals)):
            raise LinalgError("spectrum values must be finite")
        if vals.size > 1 and np.any(np.diff(vals) > 0.0):
            raise LinalgError("spectrum values must be sorted non-ascending")
        if self.kind not in ("eigenvalues", "singular_values"):
            raise LinalgError(f"unknown spectrum kind {self.kind!r}")
        if self.kind == "singular_values" and vals.size and vals[-1] < 0.0:
            raise LinalgError("singular values must be nonnegative")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return self.values.size

    def __getitem__(self, i):
        return self.values[i]

    def kth(self, k: int) -> float:
        """The k-th largest value, k = 1 .. len."""
        if not 1 <= k <= self.values.size:
            raise IndexError(f"k={k} outside 1..{self.values.size}")
        return float(self.values[k - 1])


# ---------------------------------------------------------------------------
# matrix types


class ComplexMatrix:
    """A finite dense matrix stored as float64 or complex128, read-only."""

    def __init__(self, array, *, field: str | None = None):
        arr = _working_array(array, field)
        arr.setflags(write=False)
        self._array = arr

    @property
    def array(self) -> np.ndarray:
        return self._array

    @property
    def rows(self) -> int:
        return self._array.shape[0]

    @property
    def cols(self) -> int:
        return self._array.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._array.shape

    @property
    def field(self) -> str:
        return "complex" if np.iscomplexobj(self._array) else "real"

    def conj_t(self) -> "ComplexMatrix":
        return ComplexMatrix(self._array.conj().T)

    def __repr__(self):
        return f"{type(self).__name__}({self.rows}x{self.cols}, {self.field})"


class HermitianMatrix(ComplexMatrix):
    """Square matrix accepted as Hermitian and stored symmetrized.

    The Hermitian defect ``max |M - M*|`` must not exceed
    ``tols.herm * max(1, max |M|)``; the stored array is the exact
    Hermitian part ``(M + M*) / 2``.
    """

    def __init__(self, array, *, field: str | None = None, tols: Tolerances = DEFAULT_TOLS):
        arr = _working_array(array, field)
        if arr.shape[0] != arr.shape[1]:
            raise LinalgError(f"Hermitian matrix must be square, got {arr.shape}")
        scale = max(1.0, float(np.max(np.abs(arr), initial=0.0)))
        defect = float(np.max(np.abs(arr - arr.conj().T), initial=0.0))
        if defect > tols.herm * scale:
            raise LinalgError(
                f"Hermitian defect {defect:.3e} exceeds {tols.herm:.1e} * {scale:.3e}"
            )
        sym = _hermitize(arr)
        sym.setflags(write=False)
        self._array = sym
        self._herm_defect = defect

    @property
    def herm_defect(self) -> float:
        return self._herm_defect


class PsdMatrix(HermitianMatrix):
    """Hermitian matrix verified positive semidefinite by the package's
    own eigensolver at construction time.

    Eigenvalues may dip to ``-tols.psd * max(1, lambda_max)``; anything
    lower is rejected.  The eigensystem is computed once and cached, so
    square roots, pseudo-inverses and product spectra come cheap.
    """

    def __init__(
        self,
        array,
        *,
        field: str | None = None,
        tols: Tolerances = DEFAULT_TOLS,
        _eig: tuple[np.ndarray, np.ndarray] | None = None,
    ):
        super().__init__(array, field=field, tols=tols)
        if _eig is None:
            w, v = _eigh_raw(self._array)
        else:
            w, v = _eig
        lam_max = float(w[0]) if w.size else 0.0
        lam_min = float(w[-1]) if w.size else 0.0
        if lam_min < -tols.psd * max(1.0, lam_max):
            raise LinalgError(
                f"matrix is not PSD: lambda_min = {lam_min:.6e} "
                f"(allowed down to {-tols.psd * max(1.0, lam_max):.1e})"
            )
        w.setflags(write=False)
        v.setflags(write=False)
        self._eig_w = w
        self._eig_v = v

    @property
    def spectrum(self) -> Spectrum:
        return Spectrum(self._eig_w.copy(), "eigenvalues")

    def eig(self) -> tuple[np.ndarray, np.ndarray]:
        """Cached ``(eigenvalues desc, eigenvector columns)`` as raw arrays."""
        return self._eig_w, self._eig_v


# ---------------------------------------------------------------------------
# operations


def hermitian_eig(h: HermitianMatrix) -> tuple[Spectrum, ComplexMatrix]:
    """Full eigendecomposition ``h = U diag(w) U*`` with w non-ascending."""
    if not isinstance(h, HermitianMatrix):
        raise LinalgError("hermitian_eig expects a HermitianMatrix")
    if isinstance(h, PsdMatrix):
        w, v = h.eig()
        return Spectrum(w.copy(), "eigenvalues"), ComplexMatrix(v)
    w, v = _eigh_raw(h.array)
    return Spectrum(w, "eigenvalues"), ComplexMatrix(v)


def singular_values(x: ComplexMatrix) -> Spectrum:
    """Singular values of x (length min(rows, cols), non-ascending).

    Computed as square roots of the eigenvalues of the smaller Gram
    matrix; slight negative eigenvalues are clamped to zero.
    """
    if not isinstance(x, ComplexMatrix):
        raise LinalgError("singular_values expects a ComplexMatrix")
    return Spectrum(_svals_raw(x.array), "singular_values")


def psd_sqrt(a: PsdMatrix) -> PsdMatrix:
    """The unique PSD square root, from the cached eigensystem."""
    if not isinstance(a, PsdMatrix):
        raise LinalgError("psd_sqrt expects a PsdMatrix")
    w, v = a.eig()
    root = np.sqrt(np.maximum(w, 0.0))
    arr = _hermitize((v * root) @ v.conj().T)
    return PsdMatrix(arr, _eig=(root.copy(), v.copy()))


def pseudo_inverse(a: PsdMatrix, rank_tol: float = DEFAULT_TOLS.rank) -> PsdMatrix:
    """Moore-Penrose inverse of a PSD matrix via its eigensystem.

    Eigenvalues at or below ``rank_tol * lambda_max`` are treated as
    exact zeros, so the result of inverting a singular matrix stays
    bounded instead of exploding.
    """
    if not isinstance(a, PsdMatrix):
        raise LinalgError("pseudo_inverse expects a PsdMatrix")
    w, v = a.eig()
    if w.size == 0 or w[0] <= 0.0:
        zero = np.zeros_like(a.array)
        return PsdMatrix(zero, _eig=(np.zeros_like(w), v.copy()))
    cutoff = rank_tol * float(w[0])
    winv = np.where(w > cutoff, 1.0 / np.where(w > cutoff, w, 1.0), 0.0)
    arr = _hermitize((v * winv) @ v.conj().T)
    order = np.argsort(-winv, kind="stable")
    return PsdMatrix(arr, _eig=(winv[order], np.ascontiguousarray(v[:, order])))


def loewner_leq(
    a: HermitianMatrix, b: HermitianMatrix, tol: float = DEFAULT_TOLS.psd
) -> tuple[bool, float]:
    """Test A <= B in the Loewner (PSD) order.

    Returns ``(holds, margin)`` where margin = lambda_min(B - A) and the
    order holds iff margin >= -tol * max(1, max |A|, max |B|).
    """
    if not isinstance(a, HermitianMatrix) or not isinstance(b, HermitianMatrix):
        raise LinalgError("loewner_leq expects HermitianMatrix operands")
    if a.shape != b.shape:
        raise LinalgError(f"shape mismatch {a.shape} vs {b.shape}")
    diff = _hermitize(b.array - a.array)
    w, _ = _eigh_raw(diff)
    margin = float(w[-1]) if w.size else 0.0
    scale = max(
        1.0,
        float(np.max(np.abs(a.array), initial=0.0)),
        float(np.max(np.abs(b.array), initial=0.0)),
    )
    return margin >= -tol * scale, margin


def eigvals_of_product(a: PsdMatrix, b: PsdMatrix) -> Spectrum:
    """Eigenvalues of A B for PSD A, B (nonnegative, non-ascending).

    A B is not Hermitian, but it shares its spectrum with the Hermitian
    congruence A^(1/2) B A^(1/2), which is what actually gets solved.
    """
    if not isinstance(a, PsdMatrix) or not isinstance(b, PsdMatrix):
        raise LinalgError("eigvals_of_product expects PsdMatrix operands")
    if a.shape != b.shape:
        raise LinalgError(f"shape mismatch {a.shape} vs {b.shape}")
    w, v = a.eig()
    root = np.sqrt(np.maximum(w, 0.0))
    s = (v * root) @ v.conj().T
    m = _hermitize(s @ b.array @ s)
    vals, _ = _eigh_raw(m)
    return Spectrum(np.maximum(vals, 0.0), "eigenvalues")


def random_psd(
    n: int,
    rank: int,
    seed: int | np.random.Generator,
    field: str = "real",
) -> PsdMatrix:
    """Random n x n PSD matrix of the given rank: G G* with G an
    n x rank matrix of iid standard normals (independent real and
    imaginary parts in the complex case)."""
    if not 1 <= rank <= n:
        raise LinalgError(f"rank must lie in 1..{n}, got {rank}")
    if field not in ("real", "complex"):
        raise LinalgError(f"field must be 'real' or 'complex', got {field!r}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    g = rng.standard_normal((n, rank))
    if field == "complex":
        g = g + 1j * rng.standard_normal((n, rank))
    return PsdMatrix(_hermitize(g @ g.conj().T), field=field)


def numerical_rank(a: PsdMatrix, rank_tol: float = DEFAULT_TOLS.rank) -> int:
    """Count of eigenvalues above ``rank_tol * lambda_max``."""
    w, _ = a.eig()
    if w.size == 0 or w[0] <= 0.0:
        return 0
    return int(np.count_nonzero(w > rank_tol * float(w[0])))
