"""Step-by-step numerical executor of the constructive reduction that
proves the eigenvalue bound lambda_k(AB) <= lambda_k(C(q)C(1-q)).

The reduction, run here on concrete matrices with every intermediate
claim asserted numerically:

  1. scale (A, B) so that lambda_k(AB) = 1;
  2. build a rank-k projector P <= M := A^(1/2) B A^(1/2) from the
     top-k eigenvectors of M (possible because lambda_k(M) = 1);
  3. build B' with A^(1/2) B' A^(1/2) = P, B' <= B, rank k, so that
     spectrum(AB') = (1, ..., 1, 0, ..., 0);
  4. pass to an eigenbasis of B': B' = B11 + 0, partition A
     conformally; necessarily B11 = A11^(-1);
  5. shrink A to A' = [[A11, A12], [A12*, A12* A11^(-1) A12]] with
     rank k and 0 <= A' <= A;
  6. with F = A11, G = A12 A12*, H = F^(-1/2) G F^(-1/2), and
     s = (1-q)/q, reduce lambda_k(C''(q) C''(1-q)) to q(1-q) times the
     k-th squared singular value of Z = [[F^(-1), sqrt(s) I],
     [I/sqrt(s), F+H]]; Z shares singular values with a matrix X whose
     Hermitian part is Y = [[sqrt(s) I, K], [K, I/sqrt(s)]] with
     K = (F + H + F^(-1))/2 >= I;
  7. the closed form for lambda_j(Y) then gives
     lambda_k(Y) >= sqrt(s) + 1/sqrt(s), hence
     lambda_k(C''(q)C''(1-q)) >= q(1-q)(sqrt(s)+1/sqrt(s))^2 = 1,
     and the chain C'' <= C' <= C transports the bound back to C.

Each step is a public function that re-derives what it needs, asserts
its claims against named residual gates, and (optionally) records the
residuals into a shared dict; ``run_pipeline`` chains them into a
PipelineTrace.  Instances whose A11 block is numerically
ill-conditioned are marked degenerate: their residuals are still
recorded, but gate violations no longer raise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np

from .config import DEFAULT_TOLS
from .checks import product_eigs
from .linalg import (
    ComplexMatrix,
    HermitianMatrix,
    PsdMatrix,
    Spectrum,
    _eigh_raw,
    _hermitize,
    _svals_raw,
    numerical_rank,
)
from .report import CheckReport
from . import serialize


class TriviallyTrue(Exception):
    """lambda_k(AB) is numerically zero: the bound holds with lhs = 0
    and there is nothing to normalize or reduce."""


class PipelineDomainError(ValueError):
    """The instance is outside the reduction's domain (q endpoint,
    bad k, shape mismatch)."""


class PipelineStepError(RuntimeError):
    """A step's numerical assertion failed on a non-degenerate instance."""

    def __init__(self, step: str, residual: str, value: float, gate: float):
        super().__init__(
            f"step {step!r}: residual {residual!r} = {value:.6e} exceeds gate {gate:.1e}"
        )
        self.step = step
        self.residual = residual
        self.value = value
        self.gate = gate


#: Residual gates, keyed "step:residual".  Values are relative to the
#: scale each step documents.  Steps that compound a matrix inversion
#: (B11 = A11^(-1)) run looser than pure spectral steps.
GATES: dict[str, float] = {
    "normalize:lambda_k": 1e-10,
    "projector:hermitian": 1e-12,
    "projector:idempotent": 1e-9,
    "projector:rank": 0.5,
    "projector:order": 1e-9,
    "bprime:reconstruction": 1e-8,
    "bprime:rank": 0.5,
    "bprime:order": 1e-8,
    "bprime:spectrum": 1e-8,
    "blocks:b11_inverse": 1e-7,
    "blocks:r_top_identity": 1e-7,
    "aprime:rank": 0.5,
    "aprime:psd": 1e-8,
    "aprime:below_a": 1e-8,
    "zxy:sv_z_equals_x": 1e-9,
    "zxy:cdprime_eigenvalue": 1e-8,
    "zxy:k_above_identity": 1e-9,
    "y:closed_form": 1e-9,
    "y:lower_bound": 1e-9,
    "hermitian_part:bound": 1e-9,
    "chain:cprime_below_c": 1e-8,
    "chain:cdprime_below_cprime": 1e-8,
    "final:identity": 1e-12,
    "final:bound": 1e-8,
    "final:original_scale": 1e-7,
}

#: A11 condition number beyond which a trace is marked degenerate.
COND_LIMIT = 1e10


def _record(
    residuals: dict | None,
    strict: bool,
    step: str,
    name: str,
    value: float,
) -> None:
    key = f"{step}:{name}"
    gate = GATES[key]
    if residuals is not None:
        residuals[key] = float(value)
    if strict and not value <= gate:
        raise PipelineStepError(step, name, float(value), gate)


def _sqrt_from(psd: PsdMatrix) -> np.ndarray:
    w, v = psd.eig()
    return (v * np.sqrt(np.maximum(w, 0.0))) @ v.conj().T


def _inv_from(psd: PsdMatrix) -> np.ndarray:
    w, v = psd.eig()
    return _hermitize((v * (1.0 / w)) @ v.conj().T)


def _inv_sqrt_from(psd: PsdMatrix) -> np.ndarray:
    w, v = psd.eig()
    return _hermitize((v * (1.0 / np.sqrt(w))) @ v.conj().T)


# ---------------------------------------------------------------------------
# steps


def normalize_instance(
    a: PsdMatrix,
    b: PsdMatrix,
    k: int,
    residuals: dict | None = None,
    strict: bool = True,
) -> tuple[PsdMatrix, PsdMatrix, float]:
    """Scale (A, B) by 1/sqrt(t), t = lambda_k(AB), so the scaled
    product has k-th eigenvalue exactly 1.  Returns (A', B', t).

    Raises TriviallyTrue when lambda_k(AB) is numerically zero (rank
    deficiency makes the bound hold with lhs = 0)."""
    if not isinstance(a, PsdMatrix) or not isinstance(b, PsdMatrix):
        raise PipelineDomainError("normalize_instance expects PsdMatrix operands")
    if a.shape != b.shape:
        raise PipelineDomainError(f"shape mismatch {a.shape} vs {b.shape}")
    n = a.rows
    if not 1 <= k <= n:
        raise PipelineDomainError(f"k must lie in 1..{n}, got {k}")
    lam = product_eigs(a, b)
    t = float(lam[k - 1])
    if t <= DEFAULT_TOLS.rank * max(1.0, float(lam[0])):
        raise TriviallyTrue(
            f"lambda_{k}(AB) = {t:.3e} is numerically zero; the bound holds trivially"
        )
    root = math.sqrt(t)
    wa, va = a.eig()
    wb, vb = b.eig()
    a_n = PsdMatrix(a.array / root, _eig=(wa / root, va.copy()))
    b_n = PsdMatrix(b.array / root, _eig=(wb / root, vb.copy()))
    check = product_eigs(a_n, b_n)
    _record(residuals, strict, "normalize", "lambda_k", abs(float(check[k - 1]) - 1.0))
    return a_n, b_n, t


def construct_projector(
    a: PsdMatrix,
    b: PsdMatrix,
    k: int,
    residuals: dict | None = None,
    strict: bool = True,
) -> HermitianMatrix:
    """Rank-k spectral projector P onto the top-k eigenvectors of
    M = A^(1/2) B A^(1/2), valid (P <= M) because the normalized
    instance has lambda_j(M) >= 1 for j <= k."""
    s = _sqrt_from(a)
    m = _hermitize(s @ b.array @ s)
    w, v = _eigh_raw(m)
    if w[k - 1] < 1.0 - 1e-9:
        raise PipelineStepError(
            "projector", "normalization", float(1.0 - w[k - 1]), 1e-9
        )
    vk = v[:, :k]
    p_arr = _hermitize(vk @ vk.conj().T)
    _record(
        residuals,
        strict,
        "projector",
        "hermitian",
        float(np.max(np.abs(p_arr - p_arr.conj().T), initial=0.0)),
    )
    _record(
        residuals,
        strict,
        "projector",
        "idempotent",
        float(np.max(np.abs(p_arr @ p_arr - p_arr))),
    )
    wp, _ = _eigh_raw(p_arr)
    _record(
        residuals,
        strict,
        "projector",
        "rank",
        float(abs(int(np.count_nonzero(wp > 0.5)) - k)),
    )
    wd, _ = _eigh_raw(_hermitize(m - p_arr))
    order_defect = max(0.0, -float(wd[-1])) / max(1.0, float(w[0]))
    _record(residuals, strict, "projector", "order", order_defect)
    return HermitianMatrix(p_arr)


def construct_bprime(
    a: PsdMatrix,
    b: PsdMatrix,
    p: HermitianMatrix,
    residuals: dict | None = None,
    strict: bool = True,
) -> PsdMatrix:
    """The rank-k matrix B' with A^(1/2) B' A^(1/2) = P and B' <= B.

    Built as B' = sum_j lambda_j^(-2) w_j w_j* over j <= k, where
    w_j = B S v_j, S = A^(1/2), and (lambda_j, v_j) are the top
    eigenpairs of M = S B S.  On invertible A this equals
    A^(-1/2) P A^(-1/2); when A is singular it is the generalized-
    inverse realization that still satisfies B' <= B (the plain
    S+ P S+ formula does not, which the order assert below would
    catch)."""
    s = _sqrt_from(a)
    m = _hermitize(s @ b.array @ s)
    w, v = _eigh_raw(m)
    k = int(round(float(np.trace(p.array).real)))
    if k < 1 or w[k - 1] <= 0.0:
        raise PipelineDomainError(
            f"projector trace {k} incompatible with spectrum of A^(1/2)BA^(1/2)"
        )
    cols = b.array @ (s @ v[:, :k])
    bp_arr = _hermitize((cols / (w[:k] ** 2)) @ cols.conj().T)
    b_prime = PsdMatrix(bp_arr)
    recon = float(np.linalg.norm(s @ bp_arr @ s - p.array))
    _record(residuals, strict, "bprime", "reconstruction", recon)
    _record(
        residuals,
        strict,
        "bprime",
        "rank",
        float(abs(numerical_rank(b_prime) - k)),
    )
    wd, _ = _eigh_raw(_hermitize(b.array - bp_arr))
    scale_b = max(1.0, float(np.max(np.abs(b.array), initial=0.0)))
    _record(
        residuals, strict, "bprime", "order", max(0.0, -float(wd[-1])) / scale_b
    )
    spec = product_eigs(a, b_prime)
    target = np.zeros_like(spec)
    target[:k] = 1.0
    _record(
        residuals,
        strict,
        "bprime",
        "spectrum",
        float(np.max(np.abs(spec - target), initial=0.0)),
    )
    return b_prime


@dataclass(frozen=True)
class Blocks:
    """Conformal partition of A in an eigenbasis of B' (nonzero
    eigenvectors first), where B' becomes B11 + 0 with B11 diagonal."""

    a11: np.ndarray
    a12: np.ndarray
    a22: np.ndarray
    b11: np.ndarray
    basis: np.ndarray
    k: int
    cond_a11: float


def block_decompose(
    a: PsdMatrix,
    b_prime: PsdMatrix,
    k: int,
    residuals: dict | None = None,
    strict: bool = True,
) -> Blocks:
    """Rotate to an eigenbasis of B' and partition A conformally.

    Asserts B11 = A11^(-1) (relative Frobenius) and that the top-left
    k x k block of R = B'^(1/2) A B'^(1/2) is the identity.  The
    condition number of A11 is measured here; callers treat traces
    beyond COND_LIMIT as degenerate."""
    wb, vb = b_prime.eig()
    basis = vb
    a_rot = _hermitize(basis.conj().T @ a.array @ basis)
    b_rot = _hermitize(basis.conj().T @ b_prime.array @ basis)
    a11 = _hermitize(a_rot[:k, :k])
    a12 = np.ascontiguousarray(a_rot[:k, k:])
    a22 = _hermitize(a_rot[k:, k:])
    b11 = _hermitize(b_rot[:k, :k])
    wa11, va11 = _eigh_raw(a11)
    lam_min = float(wa11[-1])
    cond = math.inf if lam_min <= 0.0 else float(wa11[0]) / lam_min
    degenerate_here = not cond <= COND_LIMIT
    strict_here = strict and not degenerate_here
    if lam_min > 0.0:
        a11_inv = _hermitize((va11 * (1.0 / wa11)) @ va11.conj().T)
        binv_res = float(
            np.linalg.norm(b11 - a11_inv) / max(np.linalg.norm(b11), 1e-300)
        )
    else:
        binv_res = math.inf
    _record(residuals, strict_here, "blocks", "b11_inverse", binv_res)
    # R = B'^(1/2) A B'^(1/2) in the rotated basis: B' is diag(wb) there,
    # so the top-left block is diag(sqrt(wb)) A11 diag(sqrt(wb))
    root_b = np.sqrt(np.maximum(wb[:k], 0.0))
    r_top = (root_b[:, None] * a11) * root_b[None, :]
    _record(
        residuals,
        strict_here,
        "blocks",
        "r_top_identity",
        float(np.max(np.abs(r_top - np.eye(k)))),
    )
    return Blocks(
        a11=a11, a12=a12, a22=a22, b11=b11, basis=basis, k=k, cond_a11=cond
    )


def construct_aprime(
    blocks: Blocks,
    residuals: dict | None = None,
    strict: bool = True,
) -> PsdMatrix:
    """A' = [[A11, A12], [A12*, A12* A11^(-1) A12]] in the rotated
    basis: rank k, PSD, and below A (their difference is the Schur
    complement of A11 in A, padded by zeros)."""
    k = blocks.k
    n = k + blocks.a22.shape[0]
    wa11, va11 = _eigh_raw(blocks.a11)
    if float(wa11[-1]) <= 0.0:
        raise PipelineDomainError("A11 is numerically singular; cannot form A'")
    a11_inv = _hermitize((va11 * (1.0 / wa11)) @ va11.conj().T)
    corner = _hermitize(blocks.a12.conj().T @ a11_inv @ blocks.a12)
    ap = np.zeros((n, n), dtype=np.result_type(blocks.a11, blocks.a12))
    ap[:k, :k] = blocks.a11
    ap[:k, k:] = blocks.a12
    ap[k:, :k] = blocks.a12.conj().T
    ap[k:, k:] = corner
    ap = _hermitize(ap)
    wap, _ = _eigh_raw(ap)
    lam_max = max(1.0, float(wap[0]))
    # noise floor for the rank count grows with the conditioning of the
    # inversion that produced the corner block
    rank_cut = max(1e-8, 100.0 * np.finfo(float).eps * min(blocks.cond_a11, 1e12))
    rank = int(np.count_nonzero(wap > rank_cut * float(wap[0])))
    _record(residuals, strict, "aprime", "rank", float(abs(rank - k)))
    _record(
        residuals, strict, "aprime", "psd", max(0.0, -float(wap[-1])) / lam_max
    )
    a_full = np.zeros_like(ap)
    a_full[:k, :k] = blocks.a11
    a_full[:k, k:] = blocks.a12
    a_full[k:, :k] = blocks.a12.conj().T
    a_full[k:, k:] = blocks.a22
    wd, _ = _eigh_raw(_hermitize(a_full - ap))
    scale_a = max(1.0, float(np.max(np.abs(a_full), initial=0.0)))
    _record(
        residuals, strict, "aprime", "below_a", max(0.0, -float(wd[-1])) / scale_a
    )
    return PsdMatrix(ap)


@dataclass(frozen=True)
class ZxyParts:
    """The 2k x 2k matrices of the final reduction step."""

    z: ComplexMatrix
    x: ComplexMatrix
    y: HermitianMatrix
    k_mat: PsdMatrix
    s: float
    h: PsdMatrix
    sigma_z: np.ndarray


def assemble_zxy(
    f: PsdMatrix,
    g: PsdMatrix,
    q: float,
    residuals: dict | None = None,
    strict: bool = True,
) -> ZxyParts:
    """Build H = F^(-1/2) G F^(-1/2), s = (1-q)/q, and the 2k x 2k
    matrices

        Z = [[F^(-1), sqrt(s) I], [I/sqrt(s), F + H]]
        X = [[sqrt(s) I, F^(-1)], [F + H, I/sqrt(s)]]
        Y = (X + X*)/2 = [[sqrt(s) I, K], [K, I/sqrt(s)]]
        K = (F + H + F^(-1))/2

    Asserts sigma(Z) = sigma(X) (column swap), K >= I, and that
    q(1-q) sigma_k(Z)^2 equals lambda_k(C''(q) C''(1-q)) with C''
    reassembled independently from (F, G) via a canonical factor of G."""
    if not 0.0 < q < 1.0:
        raise PipelineDomainError(f"q must lie strictly inside (0, 1), got {q}")
    if not isinstance(f, PsdMatrix) or not isinstance(g, PsdMatrix):
        raise PipelineDomainError("assemble_zxy expects PsdMatrix F and G")
    k = f.rows
    if g.shape != (k, k):
        raise PipelineDomainError(f"G must be {k}x{k}, got {g.shape}")
    wf, _ = _eigh_raw(f.array)
    if float(wf[-1]) <= 0.0:
        raise PipelineDomainError("F must be positive definite")
    s_val = (1.0 - q) / q
    rs = math.sqrt(s_val)
    f_inv = _inv_from(f)
    f_inv_sqrt = _inv_sqrt_from(f)
    h = _hermitize(f_inv_sqrt @ g.array @ f_inv_sqrt)
    dtype = np.result_type(f.array, g.array)
    eye = np.eye(k, dtype=dtype)
    z = np.zeros((2 * k, 2 * k), dtype=dtype)
    z[:k, :k] = f_inv
    z[:k, k:] = rs * eye
    z[k:, :k] = eye / rs
    z[k:, k:] = f.array + h
    x = np.zeros_like(z)
    x[:k, :k] = rs * eye
    x[:k, k:] = f_inv
    x[k:, :k] = f.array + h
    x[k:, k:] = eye / rs
    k_arr = _hermitize((f.array + h + f_inv) / 2.0)
    y = np.zeros_like(z)
    y[:k, :k] = rs * eye
    y[:k, k:] = k_arr
    y[k:, :k] = k_arr
    y[k:, k:] = eye / rs
    sigma_z = _svals_raw(z)
    sigma_x = _svals_raw(x)
    # compare the squared values: sigma near 0 comes out of the Gram
    # route with absolute error ~ sqrt(eps) * sigma_max, so the squares
    # are the numerically faithful form of "sigma(Z) = sigma(X)"
    sv_scale = max(1.0, float(sigma_z[0]) ** 2)
    _record(
        residuals,
        strict,
        "zxy",
        "sv_z_equals_x",
        float(np.max(np.abs(sigma_z**2 - sigma_x**2))) / sv_scale,
    )
    # canonical reconstruction of C'' from (F, G): any factor W with
    # W W* = G gives a unitarily equivalent C'', so use W = G^(1/2)
    wg, vg = g.eig()
    w_fac = (vg * np.sqrt(np.maximum(wg, 0.0))) @ vg.conj().T
    corner = _hermitize(w_fac.conj().T @ f_inv @ w_fac)
    ap = np.zeros((2 * k, 2 * k), dtype=dtype)
    ap[:k, :k] = f.array
    ap[:k, k:] = w_fac
    ap[k:, :k] = w_fac.conj().T
    ap[k:, k:] = corner
    bp = np.zeros_like(ap)
    bp[:k, :k] = f_inv
    cq = q * ap + (1.0 - q) * bp
    c1q = (1.0 - q) * ap + q * bp
    lam_cdd = product_eigs(cq, c1q)
    lhs = float(lam_cdd[k - 1])
    rhs = q * (1.0 - q) * float(sigma_z[k - 1]) ** 2
    _record(
        residuals,
        strict,
        "zxy",
        "cdprime_eigenvalue",
        abs(lhs - rhs) / max(1.0, abs(rhs)),
    )
    wk, _ = _eigh_raw(k_arr)
    _record(
        residuals,
        strict,
        "zxy",
        "k_above_identity",
        max(0.0, 1.0 - float(wk[-1])),
    )
    return ZxyParts(
        z=ComplexMatrix(z),
        x=ComplexMatrix(x),
        y=HermitianMatrix(_hermitize(y)),
        k_mat=PsdMatrix(k_arr),
        s=s_val,
        h=PsdMatrix(h),
        sigma_z=sigma_z,
    )


def y_eigenvalues(
    s: float,
    k_mat: PsdMatrix,
    residuals: dict | None = None,
    strict: bool = True,
) -> Spectrum:
    """Top-k eigenvalues of Y by the closed form

        lambda_j(Y) = ( ss + sqrt(ss^2 - 4 + 4 lambda_j(K)^2) ) / 2,
        ss = sqrt(s) + 1/sqrt(s),

    cross-checked against a direct eigendecomposition of the assembled
    Y; monotone in lambda_j(K), so lambda_k(Y) >= ss once K >= I."""
    if not s > 0.0:
        raise PipelineDomainError(f"s must be positive, got {s}")
    if not isinstance(k_mat, PsdMatrix):
        raise PipelineDomainError("y_eigenvalues expects a PsdMatrix K")
    wk, _ = k_mat.eig()
    if strict and float(wk[-1]) < 1.0 - 1e-6:
        raise PipelineDomainError(
            f"K >= I violated: lambda_min(K) = {float(wk[-1]):.6e}"
        )
    ss = math.sqrt(s) + 1.0 / math.sqrt(s)
    disc = np.maximum(ss * ss - 4.0 + 4.0 * wk * wk, 0.0)
    closed = (ss + np.sqrt(disc)) / 2.0
    k = k_mat.rows
    rs = math.sqrt(s)
    dtype = k_mat.array.dtype
    y = np.zeros((2 * k, 2 * k), dtype=dtype)
    y[:k, :k] = rs * np.eye(k, dtype=dtype)
    y[:k, k:] = k_mat.array
    y[k:, :k] = k_mat.array
    y[k:, k:] = np.eye(k, dtype=dtype) / rs
    wy, _ = _eigh_raw(_hermitize(y))
    direct = wy[:k]
    scale = max(1.0, float(closed[0]))
    _record(
        residuals,
        strict,
        "y",
        "closed_form",
        float(np.max(np.abs(closed - direct))) / scale,
    )
    _record(
        residuals,
        strict,
        "y",
        "lower_bound",
        max(0.0, ss - float(closed[-1])),
    )
    return Spectrum(closed, "eigenvalues")


def hermitian_part_bound_check(
    x: ComplexMatrix, tol: float = DEFAULT_TOLS.check
) -> list[CheckReport]:
    """sigma_j(X) >= lambda_j((X + X*)/2) for square X, one report per j."""
    if not isinstance(x, ComplexMatrix):
        raise PipelineDomainError("hermitian_part_bound_check expects a ComplexMatrix")
    if x.rows != x.cols:
        raise PipelineDomainError(f"X must be square, got {x.shape}")
    sv = _svals_raw(x.array)
    wh, _ = _eigh_raw(_hermitize(x.array))
    reports = []
    for j in range(x.rows):
        reports.append(
            CheckReport.from_sides(
                "hermitian-part-bound",
                float(wh[j]),
                float(sv[j]),
                tol,
                {"j": j + 1, "n": x.rows},
            )
        )
    return reports


# ---------------------------------------------------------------------------
# the full trace


@dataclass(frozen=True)
class PipelineTrace:
    """Everything one reduction run produced: inputs, intermediates,
    named residuals with pass/fail against their gates, and the final
    certified bound (lambda_k of C''(q)C''(1-q) at normalized scale,
    which the proof pins to >= 1)."""

    n: int
    field: str
    q: float
    k: int
    scale: float
    p: HermitianMatrix
    b_prime: PsdMatrix
    basis: ComplexMatrix
    blocks: Blocks
    a_prime: PsdMatrix
    f: PsdMatrix
    g: PsdMatrix
    h: PsdMatrix
    k_mat: PsdMatrix
    s: float
    z: ComplexMatrix
    x: ComplexMatrix
    y: HermitianMatrix
    y_spectrum: Spectrum
    chain: Mapping[str, float]
    final_bound: float
    step_residuals: Mapping[str, float]
    degenerate: bool
    cond_a11: float

    def step_table(self) -> list[dict[str, Any]]:
        """Group residuals by step: [{name, residuals, pass}, ...]."""
        steps: dict[str, dict[str, Any]] = {}
        for key, value in self.step_residuals.items():
            step, _, rname = key.partition(":")
            entry = steps.setdefault(step, {"name": step, "residuals": {}, "pass": True})
            entry["residuals"][rname] = value
            entry["pass"] = bool(entry["pass"] and value <= GATES[key])
        return list(steps.values())

    @property
    def all_gates_pass(self) -> bool:
        return all(v <= GATES[k] for k, v in self.step_residuals.items())

    def to_json_dict(self, include_matrices: bool = True) -> dict:
        out: dict[str, Any] = {
            "input": {
                "n": self.n,
                "field": self.field,
                "q": self.q,
                "k": self.k,
                "scale": self.scale,
            },
            "steps": self.step_table(),
            "chain": dict(self.chain),
            "s": self.s,
            "y_spectrum": [float(v) for v in self.y_spectrum.values],
            "final_bound": self.final_bound,
            "degenerate": self.degenerate,
            "cond_a11": self.cond_a11,
        }
        if include_matrices:
            out["matrices"] = {
                "p": serialize.matrix_to_dict(self.p),
                "b_prime": serialize.matrix_to_dict(self.b_prime),
                "basis": serialize.matrix_to_dict(self.basis),
                "a_prime": serialize.matrix_to_dict(self.a_prime),
                "f": serialize.matrix_to_dict(self.f),
                "g": serialize.matrix_to_dict(self.g),
                "h": serialize.matrix_to_dict(self.h),
                "k_mat": serialize.matrix_to_dict(self.k_mat),
                "z": serialize.matrix_to_dict(self.z),
                "x": serialize.matrix_to_dict(self.x),
                "y": serialize.matrix_to_dict(self.y),
            }
        return out


def run_pipeline(a: PsdMatrix, b: PsdMatrix, q: float, k: int) -> PipelineTrace:
    """Run the full reduction on (A, B, q, k) and return its trace.

    Raises TriviallyTrue when lambda_k(AB) is numerically zero,
    PipelineDomainError for q in {0, 1} or invalid k, and
    PipelineStepError when a residual gate fails on a non-degenerate
    instance (condition(A11) <= 1e10)."""
    q = float(q)
    if not 0.0 < q < 1.0:
        raise PipelineDomainError(f"the reduction needs q strictly inside (0, 1), got {q}")
    residuals: dict[str, float] = {}
    a_n, b_n, scale = normalize_instance(a, b, k, residuals)
    p = construct_projector(a_n, b_n, k, residuals)
    b_prime = construct_bprime(a_n, b_n, p, residuals)
    blocks = block_decompose(a_n, b_prime, k, residuals)
    degenerate = not blocks.cond_a11 <= COND_LIMIT
    strict = not degenerate
    a_prime = construct_aprime(blocks, residuals, strict)
    f = PsdMatrix(blocks.a11)
    g = PsdMatrix(_hermitize(blocks.a12 @ blocks.a12.conj().T))
    parts = assemble_zxy(f, g, q, residuals, strict)
    y_spec = y_eigenvalues(parts.s, parts.k_mat, residuals, strict)

    h_reports = hermitian_part_bound_check(parts.x)
    worst_h = max(
        max(0.0, rep.lhs - rep.rhs) / max(1.0, abs(rep.rhs)) for rep in h_reports
    )
    _record(residuals, strict, "hermitian_part", "bound", worst_h)

    # the monotone chain C'' <= C' <= C at the normalized scale
    n = a_n.rows
    basis = blocks.basis
    b_prime_rot = np.zeros((n, n), dtype=basis.dtype)
    b_prime_rot[:k, :k] = blocks.b11
    lam_c = float(product_eigs(q * a_n.array + (1 - q) * b_n.array,
                               (1 - q) * a_n.array + q * b_n.array)[k - 1])
    lam_cp = float(product_eigs(q * a_n.array + (1 - q) * b_prime.array,
                                (1 - q) * a_n.array + q * b_prime.array)[k - 1])
    ap_rot = a_prime.array
    lam_cdd = float(product_eigs(q * ap_rot + (1 - q) * b_prime_rot,
                                 (1 - q) * ap_rot + q * b_prime_rot)[k - 1])
    _record(
        residuals, strict, "chain", "cprime_below_c",
        max(0.0, lam_cp - lam_c) / max(1.0, lam_c),
    )
    _record(
        residuals, strict, "chain", "cdprime_below_cprime",
        max(0.0, lam_cdd - lam_cp) / max(1.0, lam_cp),
    )

    ss = math.sqrt(parts.s) + 1.0 / math.sqrt(parts.s)
    _record(residuals, strict, "final", "identity", abs(q * (1.0 - q) * ss * ss - 1.0))
    final_bound = lam_cdd
    _record(residuals, strict, "final", "bound", max(0.0, 1.0 - final_bound))

    # reproduce the bound for the original, unscaled instance
    lam_orig = float(product_eigs(q * a.array + (1 - q) * b.array,
                                  (1 - q) * a.array + q * b.array)[k - 1])
    _record(
        residuals, strict, "final", "original_scale",
        max(0.0, final_bound * scale - lam_orig) / max(1.0, lam_orig),
    )

    joint_field = "complex" if "complex" in (a.field, b.field) else "real"
    return PipelineTrace(
        n=n,
        field=joint_field,
        q=q,
        k=k,
        scale=scale,
        p=p,
        b_prime=b_prime,
        basis=ComplexMatrix(basis),
        blocks=blocks,
        a_prime=a_prime,
        f=f,
        g=g,
        h=parts.h,
        k_mat=parts.k_mat,
        s=parts.s,
        z=parts.z,
        x=parts.x,
        y=parts.y,
        y_spectrum=y_spec,
        chain={"c": lam_c, "c_prime": lam_cp, "c_dprime": lam_cdd},
        final_bound=final_bound,
        step_residuals=residuals,
        degenerate=degenerate,
        cond_a11=blocks.cond_a11,
    )
