"""One checker per inequality, each returning an auditable CheckReport.

Checked statements, for PSD A, B and arbitrary same-shape X, Y, with
C(q) = q A + (1-q) B and M(q) = q X*X + (1-q) Y*Y:

  theorem2        lambda_k(A B)      <= lambda_k(C(q) C(1-q))
  singular-form   sigma_k(X Y*)^2    <= lambda_k(M(q) M(1-q))
  agm-singular    sigma_k(X Y*)      <= (1/2) lambda_k(X*X + Y*Y)
  theorem1        |||X Y*|||^2       <= |||M(q)||| * |||M(1-q)|||
  weyl-majorant   |lambda(A B)|^r    <_w sigma^r(A B)
  sv-product      sigma^r(A B)       <_w sigma^r(A) . sigma^r(B)
  chain           sigma^{2r}(X Y*)   <_w lambda^r(M(q) M(1-q))
                                     <_w lambda^r(M(q)) . lambda^r(M(1-q))
  false-variant   sigma_k(A B)  vs  sigma_k(C(q) C(1-q))   (known to fail)

The ``*_sides`` helpers work on raw ndarrays and are shared with the
hunt module, so a hunted margin and a checker margin come from the very
same arithmetic.
"""

from __future__ import annotations

import math

import numpy as np

from .config import DEFAULT_TOLS
from .gauge import GaugeSpec, gauge_eval, norm_grid, weak_majorize
from .linalg import (
    ComplexMatrix,
    LinalgError,
    PsdMatrix,
    _eigh_raw,
    _hermitize,
    _svals_raw,
)
from .report import CheckReport


# ---------------------------------------------------------------------------
# raw-array plumbing


def _arr(m) -> np.ndarray:
    return m.array if isinstance(m, ComplexMatrix) else np.asarray(m)


def _psd_eigs(a) -> np.ndarray:
    """Eigenvalues (desc) of a PSD-by-construction array or matrix."""
    if isinstance(a, PsdMatrix):
        return a.eig()[0]
    w, _ = _eigh_raw(_hermitize(np.asarray(a)))
    return w


def _psd_sqrt_arr(a) -> np.ndarray:
    if isinstance(a, PsdMatrix):
        w, v = a.eig()
    else:
        w, v = _eigh_raw(_hermitize(np.asarray(a)))
    root = np.sqrt(np.maximum(w, 0.0))
    return (v * root) @ v.conj().T


def product_eigs(a, b) -> np.ndarray:
    """lambda(A B) for PSD a, b via the Hermitian congruence, clamped >= 0."""
    s = _psd_sqrt_arr(a)
    w, _ = _eigh_raw(_hermitize(s @ _arr(b) @ s))
    return np.maximum(w, 0.0)


def _mixes(a: np.ndarray, b: np.ndarray, q: float) -> tuple[np.ndarray, np.ndarray]:
    return q * a + (1.0 - q) * b, (1.0 - q) * a + q * b


def _pad(v: np.ndarray, n: int) -> np.ndarray:
    if v.size >= n:
        return v[:n]
    out = np.zeros(n)
    out[: v.size] = v
    return out


def theorem2_lhs(a, b) -> np.ndarray:
    return product_eigs(a, b)


def theorem2_rhs(a, b, q: float) -> np.ndarray:
    cq, c1q = _mixes(_arr(a), _arr(b), q)
    return product_eigs(cq, c1q)


def theorem2_sides(a, b, q: float) -> tuple[np.ndarray, np.ndarray]:
    return theorem2_lhs(a, b), theorem2_rhs(a, b, q)


def singular_form_lhs(x, y) -> np.ndarray:
    xa, ya = _arr(x), _arr(y)
    return _pad(_svals_raw(xa @ ya.conj().T), xa.shape[1]) ** 2


def singular_form_rhs(x, y, q: float) -> np.ndarray:
    xa, ya = _arr(x), _arr(y)
    mq, m1q = _mixes(_hermitize(xa.conj().T @ xa), _hermitize(ya.conj().T @ ya), q)
    return product_eigs(mq, m1q)


def singular_form_sides(x, y, q: float) -> tuple[np.ndarray, np.ndarray]:
    return singular_form_lhs(x, y), singular_form_rhs(x, y, q)


def agm_singular_sides(x, y) -> tuple[np.ndarray, np.ndarray]:
    xa, ya = _arr(x), _arr(y)
    n = xa.shape[1]
    lhs = _pad(_svals_raw(xa @ ya.conj().T), n)
    gram_sum = _hermitize(xa.conj().T @ xa + ya.conj().T @ ya)
    rhs = 0.5 * np.maximum(_eigh_raw(gram_sum)[0], 0.0)
    return lhs, rhs


def theorem1_lhs(x, y, phis) -> np.ndarray:
    xa, ya = _arr(x), _arr(y)
    sv_prod = _svals_raw(xa @ ya.conj().T)
    return np.array([gauge_eval(phi, sv_prod) ** 2 for phi in phis])


def theorem1_rhs(x, y, q: float, phis) -> np.ndarray:
    xa, ya = _arr(x), _arr(y)
    mq, m1q = _mixes(_hermitize(xa.conj().T @ xa), _hermitize(ya.conj().T @ ya), q)
    sv_q = np.maximum(_eigh_raw(mq)[0], 0.0)
    sv_1q = np.maximum(_eigh_raw(m1q)[0], 0.0)
    return np.array([gauge_eval(phi, sv_q) * gauge_eval(phi, sv_1q) for phi in phis])


def theorem1_sides(x, y, q: float, phis) -> tuple[np.ndarray, np.ndarray]:
    """lhs/rhs value per gauge in phis (sigma vectors computed once)."""
    return theorem1_lhs(x, y, phis), theorem1_rhs(x, y, q, phis)


def false_variant_lhs(a, b) -> np.ndarray:
    return _svals_raw(_arr(a) @ _arr(b))


def false_variant_rhs(a, b, q: float) -> np.ndarray:
    cq, c1q = _mixes(_arr(a), _arr(b), q)
    return _svals_raw(cq @ c1q)


def false_variant_sides(a, b, q: float) -> tuple[np.ndarray, np.ndarray]:
    return false_variant_lhs(a, b), false_variant_rhs(a, b, q)


def _validate_q(q: float) -> float:
    q = float(q)
    if not 0.0 <= q <= 1.0 or not math.isfinite(q):
        raise ValueError(f"q must lie in [0, 1], got {q}")
    return q


def _validate_k(k, n: int) -> int:
    k = int(k)
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in 1..{n}, got {k}")
    return k


def _worst_k(lhs_vec: np.ndarray, rhs_vec: np.ndarray) -> int:
    rel = (rhs_vec - lhs_vec) / np.maximum(1.0, np.abs(rhs_vec))
    return int(np.argmin(rel)) + 1


def _pick(name, lhs_vec, rhs_vec, k, tol, instance) -> CheckReport:
    """Report at index k, or at the worst (smallest relative margin) k."""
    if k is None:
        k = _worst_k(lhs_vec, rhs_vec)
    else:
        k = _validate_k(k, lhs_vec.size)
    instance = dict(instance)
    instance["k"] = k
    return CheckReport.from_sides(name, lhs_vec[k - 1], rhs_vec[k - 1], tol, instance)


def _pair_digest(a, b, q=None) -> dict:
    d = {"n": int(_arr(a).shape[0]), "field": getattr(a, "field", None)}
    if d["field"] is None:
        d["field"] = "complex" if np.iscomplexobj(_arr(a)) else "real"
    if q is not None:
        d["q"] = float(q)
    return d


# ---------------------------------------------------------------------------
# public checkers


def cq_mix(a: PsdMatrix, b: PsdMatrix, q: float) -> PsdMatrix:
    """The convex mix C(q) = q A + (1-q) B, verified PSD on construction."""
    if not isinstance(a, PsdMatrix) or not isinstance(b, PsdMatrix):
        raise LinalgError("cq_mix expects PsdMatrix operands")
    if a.shape != b.shape:
        raise LinalgError(f"shape mismatch {a.shape} vs {b.shape}")
    q = _validate_q(q)
    return PsdMatrix(q * a.array + (1.0 - q) * b.array)


def check_theorem2(
    a: PsdMatrix,
    b: PsdMatrix,
    q: float,
    k: int | None = None,
    tol: float = DEFAULT_TOLS.check,
) -> CheckReport:
    """lambda_k(A B) <= lambda_k(C(q) C(1-q)); k = None reports the worst k."""
    if not isinstance(a, PsdMatrix) or not isinstance(b, PsdMatrix):
        raise LinalgError("check_theorem2 expects PsdMatrix operands")
    if a.shape != b.shape:
        raise LinalgError(f"shape mismatch {a.shape} vs {b.shape}")
    q = _validate_q(q)
    lhs_vec, rhs_vec = theorem2_sides(a, b, q)
    return _pick("theorem2", lhs_vec, rhs_vec, k, tol, _pair_digest(a, b, q))


def check_singular_form(
    x: ComplexMatrix,
    y: ComplexMatrix,
    q: float,
    k: int | None = None,
    tol: float = DEFAULT_TOLS.check,
) -> CheckReport:
    """sigma_k(X Y*)^2 <= lambda_k( (qX*X + (1-q)Y*Y) ((1-q)X*X + qY*Y) )."""
    if not isinstance(x, ComplexMatrix) or not isinstance(y, ComplexMatrix):
        raise LinalgError("check_singular_form expects ComplexMatrix operands")
    if x.shape != y.shape:
        raise LinalgError(f"shape mismatch {x.shape} vs {y.shape}")
    q = _validate_q(q)
    lhs_vec, rhs_vec = singular_form_sides(x, y, q)
    digest = {"n": x.cols, "m": x.rows, "field": x.field, "q": q}
    return _pick("singular-form", lhs_vec, rhs_vec, k, tol, digest)


def check_agm_singular(
    x: ComplexMatrix,
    y: ComplexMatrix,
    k: int | None = None,
    tol: float = DEFAULT_TOLS.check,
) -> CheckReport:
    """sigma_k(X Y*) <= (1/2) lambda_k(X*X + Y*Y).

    Cross-asserts against the q = 1/2 singular form after squaring,
    since C(1/2)C(1/2) = ((X*X + Y*Y)/2)^2 makes the two routes equal.
    """
    if not isinstance(x, ComplexMatrix) or not isinstance(y, ComplexMatrix):
        raise LinalgError("check_agm_singular expects ComplexMatrix operands")
    if x.shape != y.shape:
        raise LinalgError(f"shape mismatch {x.shape} vs {y.shape}")
    lhs_vec, rhs_vec = agm_singular_sides(x, y)
    sq_lhs, sq_rhs = singular_form_sides(x, y, 0.5)
    scale = max(1.0, float(rhs_vec[0]) ** 2)
    drift = max(
        float(np.max(np.abs(lhs_vec**2 - sq_lhs), initial=0.0)),
        float(np.max(np.abs(rhs_vec**2 - sq_rhs), initial=0.0)),
    )
    if drift > 1e-10 * scale:
        raise LinalgError(
            f"agm-singular route disagrees with its q=1/2 squared form by {drift:.3e}"
        )
    digest = {"n": x.cols, "m": x.rows, "field": x.field}
    return _pick("agm-singular", lhs_vec, rhs_vec, k, tol, digest)


def check_theorem1(
    x: ComplexMatrix,
    y: ComplexMatrix,
    q: float,
    phi: GaugeSpec | None = None,
    tol: float = DEFAULT_TOLS.check,
) -> CheckReport:
    """|||X Y*|||^2 <= |||q X*X + (1-q) Y*Y||| * |||(1-q) X*X + q Y*Y|||.

    phi = None evaluates the full norm grid and reports the gauge with
    the smallest relative margin.  The name is annotated at the
    endpoint values of q (0 and 1 recover the Cauchy-Schwarz norm
    inequality, 1/2 the arithmetic-geometric-mean one).
    """
    if not isinstance(x, ComplexMatrix) or not isinstance(y, ComplexMatrix):
        raise LinalgError("check_theorem1 expects ComplexMatrix operands")
    if x.shape != y.shape:
        raise LinalgError(f"shape mismatch {x.shape} vs {y.shape}")
    q = _validate_q(q)
    phis = norm_grid(min(x.rows, x.cols)) if phi is None else (phi,)
    lhs_vec, rhs_vec = theorem1_sides(x, y, q, phis)
    rel = (rhs_vec - lhs_vec) / np.maximum(1.0, np.abs(rhs_vec))
    i = int(np.argmin(rel))
    name = "theorem1"
    if q in (0.0, 1.0):
        name += ":cauchy-schwarz-endpoint"
    elif q == 0.5:
        name += ":agm-endpoint"
    digest = {"n": x.cols, "m": x.rows, "field": x.field, "q": q, "phi": str(phis[i])}
    return CheckReport.from_sides(name, lhs_vec[i], rhs_vec[i], tol, digest)


def _majorization_report(name, x_vec, y_vec, tol, instance) -> CheckReport:
    """Lift a weak-majorization verdict into the CheckReport rule.

    lhs/rhs are the prefix sums at the worst prefix; the tolerance is
    rescaled so that the report's margin rule reproduces the verdict of
    weak_majorize (whose slack is relative to max(1, sum |y|)) exactly.
    """
    verdict = weak_majorize(x_vec, y_vec, tol)
    j = verdict.prefix_index
    xv = np.asarray(x_vec, dtype=np.float64).ravel()
    yv = np.asarray(y_vec, dtype=np.float64).ravel()
    n = max(xv.size, yv.size)
    xs = np.sort(np.concatenate([xv, np.zeros(n - xv.size)]))[::-1]
    ys = np.sort(np.concatenate([yv, np.zeros(n - yv.size)]))[::-1]
    lhs = float(np.sum(xs[:j]))
    rhs = float(np.sum(ys[:j]))
    scale = max(1.0, float(np.sum(np.abs(yv))))
    adj_tol = tol * scale / max(1.0, abs(rhs))
    instance = dict(instance)
    instance["prefix_index"] = j
    report = CheckReport.from_sides(name, lhs, rhs, adj_tol, instance)
    if report.holds != verdict.holds:  # pragma: no cover - tolerance algebra guard
        raise LinalgError("majorization verdict failed to round-trip into report form")
    return report


def check_weyl_majorant(
    a: PsdMatrix, b: PsdMatrix, r: float, tol: float = DEFAULT_TOLS.check
) -> CheckReport:
    """|lambda(A B)|^r <_w sigma^r(A B), sigma taken of the literal product."""
    if not isinstance(a, PsdMatrix) or not isinstance(b, PsdMatrix):
        raise LinalgError("check_weyl_majorant expects PsdMatrix operands")
    if a.shape != b.shape:
        raise LinalgError(f"shape mismatch {a.shape} vs {b.shape}")
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    lam = product_eigs(a, b)
    sv = _svals_raw(a.array @ b.array)
    digest = _pair_digest(a, b)
    digest["r"] = float(r)
    return _majorization_report("weyl-majorant", lam**r, sv**r, tol, digest)


def check_sv_product_majorization(
    a: ComplexMatrix, b: ComplexMatrix, r: float, tol: float = DEFAULT_TOLS.check
) -> CheckReport:
    """sigma^r(A B) <_w sigma^r(A) . sigma^r(B) for composable A, B."""
    if not isinstance(a, ComplexMatrix) or not isinstance(b, ComplexMatrix):
        raise LinalgError("check_sv_product_majorization expects ComplexMatrix operands")
    if a.cols != b.rows:
        raise LinalgError(f"shapes {a.shape} and {b.shape} do not compose")
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    sv_ab = _svals_raw(a.array @ b.array)
    sv_a = _svals_raw(a.array)
    sv_b = _svals_raw(b.array)
    n = max(sv_ab.size, sv_a.size, sv_b.size)
    y = _pad(sv_a, n) * _pad(sv_b, n)
    digest = {"shape_a": list(a.shape), "shape_b": list(b.shape), "r": float(r)}
    return _majorization_report(
        "sv-product-majorization", _pad(sv_ab, n) ** r, y**r, tol, digest
    )


def check_majorization_chain(
    x: ComplexMatrix,
    y: ComplexMatrix,
    q: float,
    r: float,
    tol: float = DEFAULT_TOLS.check,
) -> list[CheckReport]:
    """The three-link weak-majorization chain behind the norm inequality:

      (a) sigma^{2r}(X Y*) <_w lambda^r(M(q) M(1-q))
      (b) lambda^r(M(q) M(1-q)) <_w lambda^r(M(q)) . lambda^r(M(1-q))
      (c) sigma^{2r}(X Y*) <_w lambda^r(M(q)) . lambda^r(M(1-q))

    with M(q) = q X*X + (1-q) Y*Y.  Returns the three reports in order.
    """
    if not isinstance(x, ComplexMatrix) or not isinstance(y, ComplexMatrix):
        raise LinalgError("check_majorization_chain expects ComplexMatrix operands")
    if x.shape != y.shape:
        raise LinalgError(f"shape mismatch {x.shape} vs {y.shape}")
    q = _validate_q(q)
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    xa, ya = x.array, y.array
    n = xa.shape[1]
    sv2r = _pad(_svals_raw(xa @ ya.conj().T), n) ** (2.0 * r)
    mq, m1q = _mixes(_hermitize(xa.conj().T @ xa), _hermitize(ya.conj().T @ ya), q)
    lam_prod_r = product_eigs(mq, m1q) ** r
    lam_q_r = np.maximum(_eigh_raw(mq)[0], 0.0) ** r
    lam_1q_r = np.maximum(_eigh_raw(m1q)[0], 0.0) ** r
    z = lam_q_r * lam_1q_r
    digest = {"n": x.cols, "m": x.rows, "field": x.field, "q": q, "r": float(r)}
    return [
        _majorization_report("majorization-chain:pointwise", sv2r, lam_prod_r, tol, digest),
        _majorization_report("majorization-chain:product-spectra", lam_prod_r, z, tol, digest),
        _majorization_report("majorization-chain:combined", sv2r, z, tol, digest),
    ]


def check_false_variant(
    a: PsdMatrix,
    b: PsdMatrix,
    q: float,
    k: int | None = None,
    tol: float = DEFAULT_TOLS.check,
) -> CheckReport:
    """sigma_k(A B) vs sigma_k(C(q) C(1-q)) on the literal products.

    This variant of the eigenvalue bound is known to fail; the checker
    measures and never raises on a violation (holds = False is data).
    """
    if not isinstance(a, PsdMatrix) or not isinstance(b, PsdMatrix):
        raise LinalgError("check_false_variant expects PsdMatrix operands")
    if a.shape != b.shape:
        raise LinalgError(f"shape mismatch {a.shape} vs {b.shape}")
    q = _validate_q(q)
    lhs_vec, rhs_vec = false_variant_sides(a, b, q)
    return _pick("false-variant", lhs_vec, rhs_vec, k, tol, _pair_digest(a, b, q))
