"""Exact-size complex matrix algebra for one- and two-qubit operators.

Matrices are plain ``numpy`` arrays of shape (2, 2) or (4, 4).  The
two-qubit basis is ordered ``|q_A q_B>`` with index 0 <-> |11>,
1 <-> |10>, 2 <-> |01>, 3 <-> |00>; single-qubit index 0 is |1> and
index 1 is |0>.  With that convention ``np.kron`` ordering and the
printed Pauli/ladder matrices line up with no relabeling.

Eigenvalues come from a cyclic Jacobi sweep (general Hermitian input)
or from the analytic 2x2 blocks when the input has X structure.
"""

from __future__ import annotations

import math

import numpy as np

HERMITIAN_TOL = 1e-12
EIGEN_FLOOR = -1e-12
TRACE_TOL = 1e-8
ZERO_EIGEN = 1e-15

I2 = np.eye(2, dtype=complex)
I4 = np.eye(4, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
S_PLUS = np.array([[0, 0], [1, 0]], dtype=complex)
S_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)
S_Z = 0.5 * SIGMA_Z

# off-X positions of a 4x4 matrix
_OFF_X = np.ones((4, 4), dtype=bool)
for _i in range(4):
    _OFF_X[_i, _i] = False
    _OFF_X[_i, 3 - _i] = False


class InvalidInputError(ValueError):
    """Matrix fails a structural precondition (shape, Hermiticity)."""


class InvalidStateError(ValueError):
    """Matrix is not a valid density matrix (trace, positivity)."""


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a complex 2x2 or 4x4 array."""
    a = np.asarray(m, dtype=complex)
    if a.shape not in ((2, 2), (4, 4)):
        raise InvalidInputError(f"expected a 2x2 or 4x4 matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix has non-finite entries")
    return a


def hermiticity_error(m) -> float:
    a = np.asarray(m)
    return float(np.max(np.abs(a - a.conj().T)))


def check_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    a = as_matrix(m)
    err = hermiticity_error(a)
    if err > tol:
        raise InvalidInputError(f"matrix is not Hermitian (max deviation {err:.3e})")
    return a


def is_x_structured(m, tol: float = 0.0) -> bool:
    a = np.asarray(m)
    return a.shape == (4, 4) and bool(np.all(np.abs(a[_OFF_X]) <= tol))


def _eig2_hermitian(a: complex, b: complex, d: complex) -> tuple[float, float]:
    """Eigenvalues (ascending) of [[a, b], [conj(b), d]] with real a, d."""
    mean = 0.5 * (a.real + d.real)
    half = math.hypot(0.5 * (a.real - d.real), abs(b))
    return mean - half, mean + half


def x_block_eigenvalues(m) -> list[float]:
    """Eigenvalues of an X-structured 4x4 Hermitian matrix, ascending.

    The outer block couples indices (0, 3) and the inner block (1, 2).
    """
    a = np.asarray(m)
    outer = _eig2_hermitian(a[0, 0], a[0, 3], a[3, 3])
    inner = _eig2_hermitian(a[1, 1], a[1, 2], a[2, 2])
    return sorted(outer + inner)


def jacobi_eigh(m, tol: float = 1e-15, max_sweeps: int = 50) -> tuple[np.ndarray, np.ndarray]:
    """Diagonalize a Hermitian matrix by cyclic complex Jacobi rotations.

    Parameters
    ----------
    m : array_like
        Hermitian 2x2 or 4x4 matrix.
    tol : float
        A pair (p, q) counts as converged once ``|m_pq|`` is below ``tol``
        times ``sqrt(|m_pp m_qq|)``; this relative test keeps tiny
        eigenvalues of strongly graded matrices accurate.
    max_sweeps : int
        Hard cap on the number of full sweeps.

    Returns
    -------
    values : ndarray
        Real eigenvalues in ascending order.
    vectors : ndarray
        Unitary matrix whose columns are the matching eigenvectors.
    """
    a = check_hermitian(m).copy()
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    if not np.any(a):
        return np.zeros(n), v
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= 1e-300 or r <= tol * math.sqrt(abs(a[p, p].real * a[q, q].real)):
                    continue
                rotated = True
                phase = apq / r
                phi = (a[q, q].real - a[p, p].real) / (2.0 * r)
                t = math.copysign(1.0, phi) / (abs(phi) + math.hypot(phi, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # g = diag(1, conj(phase)) @ real rotation, embedded at (p, q)
                g = np.eye(n, dtype=complex)
                g[p, p] = c
                g[p, q] = s
                g[q, p] = -s * phase.conjugate()
                g[q, q] = c * phase.conjugate()
                a = g.conj().T @ a @ g
                a[p, q] = a[q, p] = 0.0
                v = v @ g
        if not rotated:
            break
    values = np.real(np.diag(a)).copy()
    order = np.argsort(values, kind="stable")
    return values[order], v[:, order]


def hermitian_eigenvalues(m) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, ascending.

    X-structured 4x4 input takes the analytic block route; everything
    else goes through :func:`jacobi_eigh`.
    """
    a = check_hermitian(m)
    if a.shape == (4, 4) and is_x_structured(a):
        return np.array(x_block_eigenvalues(a))
    if a.shape == (2, 2):
        return np.array(_eig2_hermitian(a[0, 0], a[0, 1], a[1, 1]))
    return jacobi_eigh(a)[0]


def check_state(rho, trace_tol: float = TRACE_TOL, floor: float = EIGEN_FLOOR) -> np.ndarray:
    """Validate a density matrix and return it as an array.

    Raises
    ------
    InvalidStateError
        If the trace is off by more than ``trace_tol`` or an eigenvalue
        lies below ``floor``.
    """
    a = check_hermitian(rho)
    tr = np.trace(a).real
    if abs(tr - 1.0) > trace_tol:
        raise InvalidStateError(f"trace {tr!r} deviates from 1")
    low = hermitian_eigenvalues(a)[0]
    if low < floor:
        raise InvalidStateError(f"negative eigenvalue {low:.3e}")
    return a


def entropy_from_eigenvalues(values) -> float:
    """Shannon entropy in bits of a probability vector; 0 log 0 = 0."""
    s = 0.0
    for x in values:
        if x > ZERO_EIGEN:
            s -= x * math.log2(x)
    return max(s, 0.0)


def von_neumann_entropy(rho) -> float:
    """S(rho) = -Tr(rho log2 rho) in bits."""
    a = check_hermitian(rho)
    tr = np.trace(a).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise InvalidStateError(f"trace {tr!r} deviates from 1")
    values = hermitian_eigenvalues(a)
    if values[0] < EIGEN_FLOOR:
        raise InvalidStateError(f"negative eigenvalue {values[0]:.3e}")
    return entropy_from_eigenvalues(values)


def partial_trace(rho, keep: str) -> np.ndarray:
    """Reduced 2x2 state of subsystem ``keep`` ('A' or 'B')."""
    a = as_matrix(rho)
    if a.shape != (4, 4):
        raise InvalidInputError("partial_trace expects a 4x4 matrix")
    t = a.reshape(2, 2, 2, 2)  # [a, b, a', b']
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("jijk->ik", t)
    raise InvalidInputError(f"keep must be 'A' or 'B', got {keep!r}")


def kron(m, n) -> np.ndarray:
    """Tensor product of two single-qubit operators (A first, B second)."""
    return np.kron(as_matrix(m), as_matrix(n))


def sqrtm_psd(m) -> np.ndarray:
    """Principal square root of a positive semidefinite Hermitian matrix."""
    values, vectors = jacobi_eigh(m)
    root = np.sqrt(np.clip(values, 0.0, None))
    return (vectors * root) @ vectors.conj().T
