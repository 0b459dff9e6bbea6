"""Kernel-level tests for the cyclic Jacobi eigensolvers and the
one-sided Jacobi SVD.

numpy.linalg.eigh / numpy.linalg.svd serve as the independent oracles
throughout; the kernels themselves never call LAPACK.
"""

import numpy as np
import pytest

from agmcs._jacobi import (
    MAX_SWEEPS,
    OFF_TOL,
    jacobi_c128,
    jacobi_f64,
    svd_c128,
    svd_f64,
)


def _offdiag(a):
    return np.linalg.norm(a - np.diag(np.diag(a)))


def test_real_2x2_closed_form():
    h = np.array([[1.0, 1.0], [1.0, 3.0]])
    w, v, off, sweeps = jacobi_f64(h.copy(), OFF_TOL, MAX_SWEEPS)
    got = np.sort(w)
    want = np.array([2.0 - np.sqrt(2.0), 2.0 + np.sqrt(2.0)])
    assert np.allclose(got, want, rtol=0, atol=1e-14)
    assert sweeps <= 2


def test_diagonal_input_is_fixed_point():
    h = np.diag([3.0, -1.0, 2.0])
    w, v, off, sweeps = jacobi_f64(h.copy(), OFF_TOL, MAX_SWEEPS)
    assert np.array_equal(np.sort(w), np.array([-1.0, 2.0, 3.0]))
    assert off == 0.0


def test_one_by_one():
    h = np.array([[7.5]])
    w, v, off, sweeps = jacobi_f64(h.copy(), OFF_TOL, MAX_SWEEPS)
    assert w[0] == 7.5 and v[0, 0] == 1.0


@pytest.mark.parametrize("n", [2, 3, 5, 9, 16])
def test_real_symmetric_matches_numpy(n):
    rng = np.random.default_rng(100 + n)
    g = rng.standard_normal((n, n))
    h = (g + g.T) / 2.0
    w, v, off, sweeps = jacobi_f64(h.copy(), OFF_TOL, MAX_SWEEPS)
    assert off <= OFF_TOL * max(np.linalg.norm(h), 1e-300)
    want = np.linalg.eigvalsh(h)
    assert np.allclose(np.sort(w), want, rtol=0, atol=1e-12 * max(1.0, np.abs(want).max()))


@pytest.mark.parametrize("n", [2, 3, 5, 9, 16])
def test_complex_hermitian_matches_numpy(n):
    rng = np.random.default_rng(200 + n)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = (g + g.conj().T) / 2.0
    w, v, off, sweeps = jacobi_c128(h.astype(np.complex128), OFF_TOL, MAX_SWEEPS)
    want = np.linalg.eigvalsh(h)
    assert np.allclose(np.sort(w), want, rtol=0, atol=1e-12 * max(1.0, np.abs(want).max()))


@pytest.mark.parametrize("field", ["real", "complex"])
def test_eigenvectors_reconstruct_and_are_unitary(field):
    rng = np.random.default_rng(11)
    n = 8
    g = rng.standard_normal((n, n))
    if field == "complex":
        g = g + 1j * rng.standard_normal((n, n))
        h = ((g + g.conj().T) / 2.0).astype(np.complex128)
        w, v, off, sweeps = jacobi_c128(h.copy(), OFF_TOL, MAX_SWEEPS)
    else:
        h = (g + g.T) / 2.0
        w, v, off, sweeps = jacobi_f64(h.copy(), OFF_TOL, MAX_SWEEPS)
    scale = max(1.0, np.linalg.norm(h))
    assert np.linalg.norm(v.conj().T @ v - np.eye(n)) <= 1e-12
    assert np.linalg.norm((v * w) @ v.conj().T - h) <= 1e-12 * scale


def test_scale_extremes():
    # very large and very small scales must converge identically
    rng = np.random.default_rng(3)
    g = rng.standard_normal((4, 4))
    h = (g + g.T) / 2.0
    for t in (1e-150, 1e150):
        w, v, off, sweeps = jacobi_f64(h * t, OFF_TOL, MAX_SWEEPS)
        assert np.allclose(np.sort(w), np.linalg.eigvalsh(h) * t, rtol=1e-12)


def test_sweep_count_reported():
    rng = np.random.default_rng(5)
    g = rng.standard_normal((6, 6))
    h = (g + g.T) / 2.0
    w, v, off, sweeps = jacobi_f64(h.copy(), OFF_TOL, MAX_SWEEPS)
    assert 1 <= sweeps <= MAX_SWEEPS


# ---------------------------------------------------------------------------
# one-sided SVD kernels


def test_svd_column_closed_forms():
    sv, off, _ = svd_f64(np.array([[3.0], [4.0]]), OFF_TOL, MAX_SWEEPS)
    assert sv[0] == 5.0 and off == 0.0
    # already-orthogonal columns are a fixed point
    sv, off, sweeps = svd_f64(np.array([[0.0, 2.0], [3.0, 0.0]]), OFF_TOL, MAX_SWEEPS)
    assert np.array_equal(np.sort(sv), np.array([2.0, 3.0]))
    assert off == 0.0


def test_svd_2x2_closed_form():
    # Z*Z = [[1,1],[1,2]] has eigenvalues (3 +/- sqrt(5))/2
    z = np.array([[1.0, 1.0], [0.0, 1.0]])
    sv, off, _ = svd_f64(z, OFF_TOL, MAX_SWEEPS)
    want = np.sqrt((3.0 + np.sqrt(5.0) * np.array([1.0, -1.0])) / 2.0)
    assert np.allclose(np.sort(sv)[::-1], want, rtol=0, atol=1e-15)


@pytest.mark.parametrize("shape", [(2, 2), (5, 3), (3, 5), (9, 9), (16, 4)])
@pytest.mark.parametrize("field", ["real", "complex"])
def test_svd_matches_numpy(shape, field):
    rng = np.random.default_rng(sum(shape) * 37)
    z = rng.standard_normal(shape)
    if field == "complex":
        z = (z + 1j * rng.standard_normal(shape)).astype(np.complex128)
        sv, off, _ = svd_c128(z, OFF_TOL, MAX_SWEEPS)
    else:
        sv, off, _ = svd_f64(z, OFF_TOL, MAX_SWEEPS)
    want = np.linalg.svd(z, compute_uv=False)
    got = np.sort(sv)[::-1][: want.size]
    assert off <= OFF_TOL
    assert np.allclose(got, want, rtol=0, atol=1e-13 * max(1.0, want[0]))


def test_svd_small_values_keep_absolute_accuracy():
    # the reason this kernel exists: sigma = 1e-8 must come back with
    # ~eps * sigma_max error, where a Gram-matrix route would be stuck
    # at sqrt(eps) * sigma_max ~ 1e-8 -- pure noise at this scale
    rng = np.random.default_rng(17)
    q1, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    q2, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    d = np.array([1.0, 1e-8, 1e-13, 0.0])
    sv, off, _ = svd_f64(q1 @ np.diag(d) @ q2, OFF_TOL, MAX_SWEEPS)
    err = np.abs(np.sort(sv)[::-1] - d)
    assert np.all(err <= 1e-14)


def test_svd_exact_rank_deficiency_converges():
    # duplicated columns / exactly singular products used to cycle: a
    # column collapsed to rounding debris never passes the *relative*
    # pair criterion, so dead columns must deflate
    a = np.array([[8.0, -4.0, 0.0], [-4.0, 4.0, 0.0], [0.0, 0.0, 0.0]])
    b = np.array([[5.0, -6.0, 4.0], [-6.0, 8.0, -4.0], [4.0, -4.0, 4.0]])
    sv, off, sweeps = svd_f64(a @ b, OFF_TOL, MAX_SWEEPS)
    assert off <= OFF_TOL and sweeps < MAX_SWEEPS
    want = np.linalg.svd(a @ b, compute_uv=False)
    assert np.allclose(np.sort(sv)[::-1], want, rtol=0, atol=1e-13 * want[0])

    rng = np.random.default_rng(23)
    z = rng.standard_normal((5, 4))
    z[:, 3] = z[:, 0]
    sv, off, _ = svd_f64(z, OFF_TOL, MAX_SWEEPS)
    want = np.linalg.svd(z, compute_uv=False)
    assert off <= OFF_TOL
    assert np.allclose(np.sort(sv)[::-1], want, rtol=0, atol=1e-13 * want[0])


def test_svd_zero_matrix_and_zero_columns():
    sv, off, _ = svd_f64(np.zeros((3, 2)), OFF_TOL, MAX_SWEEPS)
    assert np.array_equal(sv, np.zeros(2)) and off == 0.0
    z = np.array([[1.0, 0.0], [2.0, 0.0]])
    sv, off, _ = svd_f64(z, OFF_TOL, MAX_SWEEPS)
    assert np.allclose(np.sort(sv)[::-1], [np.sqrt(5.0), 0.0], atol=1e-15)


def test_svd_scale_extremes():
    rng = np.random.default_rng(29)
    z = rng.standard_normal((4, 4))
    want = np.linalg.svd(z, compute_uv=False)
    for t in (1e-150, 1e150):
        sv, off, _ = svd_f64(z * t, OFF_TOL, MAX_SWEEPS)
        assert off <= OFF_TOL
        assert np.allclose(np.sort(sv)[::-1], want * t, rtol=1e-12)


def test_svd_complex_phases_are_absorbed():
    # a unitary column scaling changes nothing: |det of each rotation|=1
    rng = np.random.default_rng(31)
    z = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    phases = np.exp(1j * rng.uniform(0, 2 * np.pi, 4))
    sv1, off1, _ = svd_c128(z.astype(np.complex128), OFF_TOL, MAX_SWEEPS)
    sv2, off2, _ = svd_c128((z * phases).astype(np.complex128), OFF_TOL, MAX_SWEEPS)
    assert off1 <= OFF_TOL and off2 <= OFF_TOL
    assert np.allclose(np.sort(sv1), np.sort(sv2), rtol=1e-13)
