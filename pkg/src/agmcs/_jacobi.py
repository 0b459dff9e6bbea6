"""Cyclic Jacobi eigensolver and one-sided SVD kernels.

The eigensolver applies cyclic-by-row Jacobi rotations until the
off-diagonal Frobenius mass drops below ``OFF_TOL`` times the Frobenius
norm of the input, or ``MAX_SWEEPS`` full sweeps have run.  Two jitted
kernels cover the real symmetric and complex Hermitian cases; the
complex rotation carries the phase of the annihilated entry.

The singular-value kernels are one-sided (Hestenes) Jacobi: plane
rotations orthogonalize column pairs until every pair's inner product
is below ``OFF_TOL`` relative to the column norms, and the singular
values are the final column norms.  Working on the matrix itself rather
than its Gram matrix keeps the absolute error of every singular value
at the eps * sigma_max level; squaring first would floor small singular
values at sqrt(eps) * sigma_max, which is fatal for tight inequality
margins near rank deficiency.

All kernels mutate a working copy in place and return raw unsorted
values plus the final convergence measure and sweep count.  Sorting and
validation live in :mod:`agmcs.linalg`, outside the jitted code.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

#: Convergence target: off-diagonal Frobenius mass relative to the
#: Frobenius norm of the input matrix.
OFF_TOL = 1e-14
#: Hard cap on full cyclic sweeps before giving up.
MAX_SWEEPS = 100
#: One-sided SVD deflation: columns below this fraction of the (static)
#: Frobenius norm count as numerically zero.  About 20 * eps: safely
#: above rounding debris, far below anything a 1e-10 gate can see.
DEAD_TOL = 4e-15


@njit(cache=True)
def _offdiag_frob(a):
    n = a.shape[0]
    acc = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                acc += abs(a[i, j]) ** 2
    return np.sqrt(acc)


@njit(cache=True)
def jacobi_c128(h, off_tol, max_sweeps):
    """Cyclic Jacobi on a complex Hermitian matrix (in-place on a copy).

    Returns ``(w, v, off, sweeps)`` with ``h ~ v @ diag(w) @ v.conj().T``.
    """
    n = h.shape[0]
    a = h.copy()
    v = np.eye(n, dtype=np.complex128)
    frob = 0.0
    for i in range(n):
        for j in range(n):
            frob += abs(a[i, j]) ** 2
    frob = np.sqrt(frob)
    tol = off_tol * frob
    sweeps = 0
    off = _offdiag_frob(a)
    while off > tol and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = abs(apq)
                if g == 0.0:
                    continue
                ph = apq / g
                alpha = a[p, p].real
                beta = a[q, q].real
                theta = (beta - alpha) / (2.0 * g)
                if theta >= 0.0:
                    t = -1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = 1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                sph = s * ph
                sphc = s * np.conj(ph)
                for i in range(n):
                    if i != p and i != q:
                        aip = a[i, p]
                        aiq = a[i, q]
                        a[i, p] = c * aip + sphc * aiq
                        a[i, q] = -sph * aip + c * aiq
                        a[p, i] = np.conj(a[i, p])
                        a[q, i] = np.conj(a[i, q])
                a[p, p] = alpha + t * g
                a[q, q] = beta - t * g
                a[p, q] = 0.0
                a[q, p] = 0.0
                for i in range(n):
                    vip = v[i, p]
                    viq = v[i, q]
                    v[i, p] = c * vip + sphc * viq
                    v[i, q] = -sph * vip + c * viq
        sweeps += 1
        off = _offdiag_frob(a)
    w = np.empty(n, dtype=np.float64)
    for i in range(n):
        w[i] = a[i, i].real
    return w, v, off, sweeps


@njit(cache=True)
def jacobi_f64(h, off_tol, max_sweeps):
    """Cyclic Jacobi on a real symmetric matrix (in-place on a copy)."""
    n = h.shape[0]
    a = h.copy()
    v = np.eye(n, dtype=np.float64)
    frob = 0.0
    for i in range(n):
        for j in range(n):
            frob += a[i, j] * a[i, j]
    frob = np.sqrt(frob)
    tol = off_tol * frob
    sweeps = 0
    off = _offdiag_frob(a)
    while off > tol and sweeps < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = abs(apq)
                if g == 0.0:
                    continue
                alpha = a[p, p]
                beta = a[q, q]
                theta = (beta - alpha) / (2.0 * apq)
                if theta >= 0.0:
                    t = -1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = 1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for i in range(n):
                    if i != p and i != q:
                        aip = a[i, p]
                        aiq = a[i, q]
                        a[i, p] = c * aip + s * aiq
                        a[i, q] = -s * aip + c * aiq
                        a[p, i] = a[i, p]
                        a[q, i] = a[i, q]
                a[p, p] = alpha + t * apq
                a[q, q] = beta - t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for i in range(n):
                    vip = v[i, p]
                    viq = v[i, q]
                    v[i, p] = c * vip + s * viq
                    v[i, q] = -s * vip + c * viq
        sweeps += 1
        off = _offdiag_frob(a)
    w = np.empty(n, dtype=np.float64)
    for i in range(n):
        w[i] = a[i, i]
    return w, v, off, sweeps


@njit(cache=True)
def svd_f64(z, off_tol, max_sweeps):
    """One-sided Jacobi singular values of a real matrix (any shape).

    Returns ``(sv, off, sweeps)`` with ``sv`` the unsorted column norms
    after orthogonalization and ``off`` the largest relative column
    inner product seen in the last sweep (0 once converged).

    Columns whose norm falls to rounding level (relative to the
    rotation-invariant Frobenius norm) are deflated: a dead column is a
    numerically exact zero of the rank-deficient input, and rotating it
    against a live column only re-injects the live column's rounding
    noise, so such pairs never settle by the relative criterion.
    """
    m = z.shape[0]
    n = z.shape[1]
    w = z.copy()
    # normalize by a power of two (exact) so column products can neither
    # overflow nor underflow at extreme input scales
    mx = 0.0
    for i in range(m):
        for j in range(n):
            av = abs(w[i, j])
            if av > mx:
                mx = av
    scale = math.ldexp(1.0, math.frexp(mx)[1]) if mx > 0.0 else 1.0
    inv = 1.0 / scale
    frob2 = 0.0
    for i in range(m):
        for j in range(n):
            w[i, j] *= inv
            frob2 += w[i, j] * w[i, j]
    dead2 = DEAD_TOL * DEAD_TOL * frob2
    sweeps = 0
    off = 0.0
    while sweeps < max_sweeps:
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                a = 0.0
                b = 0.0
                c = 0.0
                for i in range(m):
                    a += w[i, p] * w[i, p]
                    b += w[i, q] * w[i, q]
                    c += w[i, p] * w[i, q]
                if a <= dead2 or b <= dead2 or c == 0.0:
                    continue
                rel = abs(c) / np.sqrt(a * b)
                if rel > off:
                    off = rel
                if rel <= off_tol:
                    continue
                tau = (b - a) / (2.0 * c)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(tau * tau + 1.0))
                else:
                    t = -1.0 / (-tau + np.sqrt(tau * tau + 1.0))
                cs = 1.0 / np.sqrt(t * t + 1.0)
                sn = t * cs
                for i in range(m):
                    wp = w[i, p]
                    wq = w[i, q]
                    w[i, p] = cs * wp - sn * wq
                    w[i, q] = sn * wp + cs * wq
        sweeps += 1
        if off <= off_tol:
            break
    sv = np.empty(n, dtype=np.float64)
    for j in range(n):
        acc = 0.0
        for i in range(m):
            acc += w[i, j] * w[i, j]
        sv[j] = np.sqrt(acc) * scale
    return sv, off, sweeps


@njit(cache=True)
def svd_c128(z, off_tol, max_sweeps):
    """One-sided Jacobi singular values of a complex matrix.

    The rotation absorbs the phase of the column inner product so the
    remaining 2x2 problem is real, exactly as the Hermitian kernel
    carries the phase of the annihilated entry.  Dead columns are
    deflated as in the real kernel.
    """
    m = z.shape[0]
    n = z.shape[1]
    w = z.copy()
    mx = 0.0
    for i in range(m):
        for j in range(n):
            wij = w[i, j]
            av = abs(wij.real) if abs(wij.real) > abs(wij.imag) else abs(wij.imag)
            if av > mx:
                mx = av
    scale = math.ldexp(1.0, math.frexp(mx)[1]) if mx > 0.0 else 1.0
    inv = 1.0 / scale
    frob2 = 0.0
    for i in range(m):
        for j in range(n):
            w[i, j] *= inv
            wij = w[i, j]
            frob2 += wij.real * wij.real + wij.imag * wij.imag
    dead2 = DEAD_TOL * DEAD_TOL * frob2
    sweeps = 0
    off = 0.0
    while sweeps < max_sweeps:
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                a = 0.0
                b = 0.0
                c = 0.0 + 0.0j
                for i in range(m):
                    wp = w[i, p]
                    wq = w[i, q]
                    a += wp.real * wp.real + wp.imag * wp.imag
                    b += wq.real * wq.real + wq.imag * wq.imag
                    c += np.conj(wp) * wq
                g = abs(c)
                if a <= dead2 or b <= dead2 or g == 0.0:
                    continue
                rel = g / np.sqrt(a * b)
                if rel > off:
                    off = rel
                if rel <= off_tol:
                    continue
                ph = c / g
                tau = (b - a) / (2.0 * g)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(tau * tau + 1.0))
                else:
                    t = -1.0 / (-tau + np.sqrt(tau * tau + 1.0))
                cs = 1.0 / np.sqrt(t * t + 1.0)
                sn = t * cs
                phc = np.conj(ph)
                for i in range(m):
                    wp = w[i, p]
                    wq = phc * w[i, q]
                    w[i, p] = cs * wp - sn * wq
                    w[i, q] = sn * wp + cs * wq
        sweeps += 1
        if off <= off_tol:
            break
    sv = np.empty(n, dtype=np.float64)
    for j in range(n):
        acc = 0.0
        for i in range(m):
            wj = w[i, j]
            acc += wj.real * wj.real + wj.imag * wj.imag
        sv[j] = np.sqrt(acc) * scale
    return sv, off, sweeps
