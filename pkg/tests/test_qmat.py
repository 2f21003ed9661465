import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdcorr.qmat import (
    I2,
    I4,
    SIGMA_X,
    SIGMA_Z,
    InvalidInputError,
    InvalidStateError,
    check_state,
    hermitian_eigenvalues,
    is_x_structured,
    jacobi_eigh,
    kron,
    partial_trace,
    sqrtm_psd,
    von_neumann_entropy,
)


def random_hermitian(rng, n=4):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return g + g.conj().T


def random_state(rng):
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def bell():
    psi = np.array([1, 0, 0, 1]) / math.sqrt(2)
    return np.outer(psi, psi)


def test_eigenvalues_identity_and_diagonal():
    assert np.allclose(hermitian_eigenvalues(I4), [1, 1, 1, 1])
    assert np.allclose(hermitian_eigenvalues(np.diag([4.0, 3.0, 2.0, 1.0])), [1, 2, 3, 4])


def test_x_block_against_quadratic_formula():
    m = np.diag([0.1, 0.3, 0.4, 0.2]).astype(complex)
    m[1, 2] = m[2, 1] = 0.2
    # inner block ((0.3, 0.2), (0.2, 0.4)): 0.35 -/+ sqrt(0.05^2 + 0.2^2)
    expected = [0.1, 0.14384471871911694, 0.2, 0.556155281280883]
    assert is_x_structured(m)
    assert np.allclose(hermitian_eigenvalues(m), expected, atol=1e-15)
    assert np.allclose(jacobi_eigh(m)[0], expected, atol=1e-15)


def test_jacobi_matches_lapack_and_reconstructs():
    rng = np.random.default_rng(3)
    for _ in range(50):
        m = random_hermitian(rng)
        vals, vecs = jacobi_eigh(m)
        assert np.allclose(vals, np.linalg.eigvalsh(m), atol=1e-12)
        assert np.allclose(vecs @ np.diag(vals) @ vecs.conj().T, m, atol=1e-12)
        assert np.allclose(vecs.conj().T @ vecs, np.eye(4), atol=1e-13)


def test_jacobi_keeps_tiny_eigenvalues_of_graded_matrices():
    # a unit entry next to a 1e-7 block must not hide the small block's rotation
    m = np.diag([1e-60, 1.6e-7, 2.5e-7, 1.0]).astype(complex)
    m[1, 2] = m[2, 1] = -2.3e-9
    vals = jacobi_eigh(m)[0]
    mid = 0.5 * (1.6e-7 + 2.5e-7)
    half = math.hypot(0.5 * (1.6e-7 - 2.5e-7), 2.3e-9)
    assert vals[1] == pytest.approx(mid - half, rel=1e-12)
    assert vals[2] == pytest.approx(mid + half, rel=1e-12)


def test_eigenvalue_invariants_on_random_set():
    rng = np.random.default_rng(11)
    for _ in range(100):
        m = random_hermitian(rng)
        vals = hermitian_eigenvalues(m)
        assert abs(vals.sum() - np.trace(m).real) <= 1e-10
        perm = np.eye(4)[rng.permutation(4)]
        assert np.allclose(hermitian_eigenvalues(perm @ m @ perm.T), vals, atol=1e-10)


def test_non_hermitian_rejected():
    m = np.zeros((4, 4), dtype=complex)
    m[0, 1] = 1.0
    with pytest.raises(InvalidInputError):
        hermitian_eigenvalues(m)
    with pytest.raises(InvalidInputError):
        hermitian_eigenvalues(np.full((4, 4), np.nan))


def test_check_state_rejects_bad_trace_and_negative_eigenvalue():
    with pytest.raises(InvalidStateError):
        check_state(np.diag([0.5, 0.5, 0.5, 0.0]))
    with pytest.raises(InvalidStateError):
        check_state(np.diag([1.1, -0.1, 0.0, 0.0]))


def test_entropy_examples():
    pure = np.zeros((4, 4))
    pure[3, 3] = 1.0
    assert von_neumann_entropy(pure) == pytest.approx(0.0, abs=1e-15)
    assert von_neumann_entropy(I4 / 4) == pytest.approx(2.0, abs=1e-14)
    assert von_neumann_entropy(np.diag([0.5, 0.5, 0.0, 0.0])) == pytest.approx(1.0, abs=1e-14)


def test_entropy_permutation_invariance_on_x_states():
    rng = np.random.default_rng(5)
    for _ in range(100):
        p = rng.dirichlet(np.ones(4))
        m = np.diag(p).astype(complex)
        m[1, 2] = rng.uniform() * math.sqrt(p[1] * p[2]) * np.exp(1j * rng.uniform(0, 6.3))
        m[0, 3] = rng.uniform() * math.sqrt(p[0] * p[3])
        m[2, 1], m[3, 0] = np.conj(m[1, 2]), np.conj(m[0, 3])
        perm = np.eye(4)[rng.permutation(4)]
        assert abs(von_neumann_entropy(perm @ m @ perm.T) - von_neumann_entropy(m)) <= 1e-10


def test_partial_trace_examples():
    assert np.allclose(partial_trace(I4 / 4, "A"), I2 / 2)
    ket10 = np.zeros(4)
    ket10[1] = 1.0  # |10>: qubit A excited
    one = np.array([[1, 0], [0, 0]])  # |1><1| in single-qubit ordering (|1>, |0>)
    assert np.allclose(partial_trace(np.outer(ket10, ket10), "A"), one)
    assert np.allclose(partial_trace(bell(), "B"), I2 / 2)
    with pytest.raises(ValueError):
        partial_trace(I4 / 4, "C")


def test_partial_trace_of_random_products():
    rng = np.random.default_rng(8)
    for _ in range(50):
        a, b = (random_state(rng)[:2, :2] for _ in range(2))
        a, b = a / np.trace(a), b / np.trace(b)
        prod = kron(a, b)
        assert np.max(np.abs(partial_trace(prod, "A") - a)) <= 1e-12
        assert np.max(np.abs(partial_trace(prod, "B") - b)) <= 1e-12


def test_kron_examples():
    assert np.array_equal(kron(I2, I2), I4)
    assert np.array_equal(kron(SIGMA_Z, I2), np.diag([1, 1, -1, -1]))
    assert np.array_equal(kron(SIGMA_Z, SIGMA_Z), np.diag([1, -1, -1, 1]))


def test_sqrtm_psd_squares_back():
    rng = np.random.default_rng(2)
    rho = random_state(rng)
    root = sqrtm_psd(rho)
    assert np.allclose(root @ root, rho, atol=1e-13)
    assert np.allclose(sqrtm_psd(kron(SIGMA_X, SIGMA_X) @ kron(SIGMA_X, SIGMA_X)), I4)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=4, max_size=4),
       st.floats(0, 5), st.floats(0, 2 * math.pi), st.floats(0, 5))
def test_x_fast_path_agrees_with_jacobi(diag, c23, phase, c14):
    m = np.diag(diag).astype(complex)
    m[1, 2] = c23 * np.exp(1j * phase)
    m[2, 1] = np.conj(m[1, 2])
    m[0, 3] = m[3, 0] = c14
    assert np.allclose(hermitian_eigenvalues(m), jacobi_eigh(m)[0], atol=1e-11)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_entropy_bounds(seed):
    rho = random_state(np.random.default_rng(seed))
    assert -1e-12 <= von_neumann_entropy(rho) <= 2.0 + 1e-12
