import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from skewgain import (
    DimensionMismatch,
    NotHermitian,
    NotPositiveSemidefinite,
    ToleranceConfig,
    commutator,
    dagger,
    frobenius_norm,
    hermitian_eigh,
    matmul,
    psd_sqrt,
    trace,
)
from skewgain.numerics import hybrid

from conftest import random_psd


def small_complex(mag=5.0):
    return st.complex_numbers(max_magnitude=mag, allow_nan=False, allow_infinity=False)


@st.composite
def square_matrix(draw, max_dim=5):
    d = draw(st.integers(min_value=1, max_value=max_dim))
    return draw(hnp.arrays(np.complex128, (d, d), elements=small_complex()))


@st.composite
def matrix_pair(draw, max_dim=5):
    d = draw(st.integers(min_value=1, max_value=max_dim))
    a = draw(hnp.arrays(np.complex128, (d, d), elements=small_complex()))
    b = draw(hnp.arrays(np.complex128, (d, d), elements=small_complex()))
    return a, b


# ---------------------------------------------------------------------------
# hermitian_eigh
# ---------------------------------------------------------------------------

def test_eigh_identity():
    w, v = hermitian_eigh(np.eye(3, dtype=complex))
    assert np.allclose(w, [1, 1, 1])
    assert np.linalg.norm(v.conj().T @ v - np.eye(3)) < 1e-10


def test_eigh_diagonal_sorted():
    w, _ = hermitian_eigh(np.diag([1.0, 10.0, 5.0]).astype(complex))
    assert np.allclose(w, [1, 5, 10])


def test_eigh_rank_one_projector():
    psi = np.full(3, 1 / np.sqrt(3), dtype=complex)
    w, _ = hermitian_eigh(np.outer(psi, psi.conj()))
    assert np.allclose(w, [0, 0, 1], atol=1e-12)


def test_eigh_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eigh(np.array([[0, 1], [0, 0]], dtype=complex))


def test_eigh_reconstruction_and_unitarity(rng):
    for dim in range(2, 17):
        m = random_psd(rng, dim)
        w, v = hermitian_eigh(m)
        scale = max(1.0, frobenius_norm(m))
        assert np.linalg.norm((v * w) @ v.conj().T - m) <= 1e-10 * scale
        assert np.linalg.norm(v.conj().T @ v - np.eye(dim)) <= 1e-10


def test_eigh_density_matrix_spectrum(rng):
    from skewgain.search import rand_density_matrix

    for _ in range(30):
        dim = int(rng.integers(2, 9))
        rho = rand_density_matrix(rng, dim)
        w, _ = hermitian_eigh(rho.matrix)
        assert w[0] >= -1e-9
        assert w[-1] <= 1 + 1e-9
        assert abs(w.sum() - 1.0) <= 1e-9


# ---------------------------------------------------------------------------
# psd_sqrt
# ---------------------------------------------------------------------------

def test_psd_sqrt_diagonal():
    s = psd_sqrt(np.diag([4.0, 9.0, 0.0]).astype(complex))
    assert np.allclose(s, np.diag([2.0, 3.0, 0.0]), atol=1e-12)


def test_psd_sqrt_projector_is_fixed_point():
    psi = np.array([0.6, 0.8j, 0.0], dtype=complex)
    proj = np.outer(psi, psi.conj())
    assert np.linalg.norm(psd_sqrt(proj) - proj) < 1e-12


def test_psd_sqrt_half_half():
    s = psd_sqrt(np.diag([0.5, 0.5, 0.0]).astype(complex))
    assert np.allclose(s, np.diag([1 / np.sqrt(2), 1 / np.sqrt(2), 0.0]), atol=1e-12)


def test_psd_sqrt_rejects_negative():
    with pytest.raises(NotPositiveSemidefinite):
        psd_sqrt(np.diag([1.0, -1e-6]).astype(complex))


def test_psd_sqrt_tolerates_rounding_negativity():
    s = psd_sqrt(np.diag([1.0, -1e-10]).astype(complex))
    assert np.allclose(s, np.diag([1.0, 0.0]), atol=1e-12)


def test_psd_sqrt_roundtrip_random(rng):
    for dim in range(2, 17):
        m = random_psd(rng, dim)
        s = psd_sqrt(m)
        scale = max(1.0, frobenius_norm(m))
        assert np.linalg.norm(s @ s - m) <= 1e-8 * scale
        # result is itself Hermitian PSD
        assert np.linalg.norm(s - s.conj().T) < 1e-12 * scale
        assert np.linalg.eigvalsh(s).min() >= -1e-12


# ---------------------------------------------------------------------------
# commutator / trace / norms
# ---------------------------------------------------------------------------

def test_commutator_with_identity_vanishes(rng):
    m = random_psd(rng, 4)
    assert np.linalg.norm(commutator(np.eye(4, dtype=complex), m)) == 0.0


def test_commutator_diagonal_matrices():
    a = np.diag([1.0, 2.0]).astype(complex)
    b = np.diag([3.0, 4.0]).astype(complex)
    assert np.linalg.norm(commutator(a, b)) == 0.0


def test_commutator_flip_vs_diagonal():
    # hand multiplication: flip = |1><2| + |2><1|, K = diag(1, 10)
    # flip@K = [[0,10],[1,0]], K@flip = [[0,1],[10,0]], difference = 9(|1><2| - |2><1|)
    flip = np.array([[0, 1], [1, 0]], dtype=complex)
    k = np.diag([1.0, 10.0]).astype(complex)
    expected = 9.0 * np.array([[0, 1], [-1, 0]], dtype=complex)
    assert np.allclose(commutator(flip, k), expected)


@settings(max_examples=60, deadline=None)
@given(square_matrix())
def test_commutator_self_is_zero(a):
    scale = max(1.0, frobenius_norm(a) ** 2)
    assert frobenius_norm(commutator(a, a)) <= 1e-12 * scale


@settings(max_examples=60, deadline=None)
@given(matrix_pair())
def test_trace_cyclic(pair):
    a, b = pair
    scale = max(1.0, frobenius_norm(a) * frobenius_norm(b))
    assert abs(trace(a @ b) - trace(b @ a)) <= 1e-10 * scale


def test_trace_identity():
    assert trace(np.eye(3, dtype=complex)) == 3.0 + 0j


def test_dagger_involution(rng):
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    assert np.array_equal(dagger(dagger(m)), m)


def test_frobenius_norm_pythagorean():
    assert frobenius_norm(np.diag([3.0, 4.0])) == pytest.approx(5.0)


def test_matmul_checks_dims():
    with pytest.raises(DimensionMismatch):
        matmul(np.eye(2), np.eye(3))
    with pytest.raises(DimensionMismatch):
        commutator(np.eye(2), np.eye(3))


def test_non_square_rejected():
    with pytest.raises(DimensionMismatch):
        trace(np.ones((2, 3)))


# ---------------------------------------------------------------------------
# tolerance bundle
# ---------------------------------------------------------------------------

def test_tolerance_defaults():
    tol = ToleranceConfig()
    assert tol.validation == 1e-9
    assert tol.reconstruction == 1e-8


def test_tolerance_from_value_keeps_ratio():
    tol = ToleranceConfig.from_value(1e-7)
    assert tol.validation == 1e-7
    assert tol.reconstruction == 1e-6


def test_tolerance_from_env():
    assert ToleranceConfig.from_env({}).validation == 1e-9
    assert ToleranceConfig.from_env({"SKEWGAIN_TOL": "1e-6"}).validation == 1e-6
    with pytest.raises(ValueError):
        ToleranceConfig.from_env({"SKEWGAIN_TOL": "-1"})


def test_hybrid_has_absolute_floor():
    assert hybrid(1e-9, 0.001) == 1e-9
    assert hybrid(1e-9, 100.0) == pytest.approx(1e-7)
