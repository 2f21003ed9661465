"""Concurrence, mutual information, classical correlation and discord.

Discord is measured on subsystem B with rank-one projective
measurements ``|Pi_1> = cos(theta)|+> + e^{i phi} sin(theta)|->`` and its
orthogonal partner, where |+>, |-> are the basis states of qubit B.
``discord_numeric`` minimizes the conditional entropy over (theta, phi);
``discord_x`` is the two-candidate closed form for X states.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize

from .model import XState
from .qmat import (
    SIGMA_Y,
    ZERO_EIGEN,
    check_state,
    entropy_from_eigenvalues,
    jacobi_eigh,
    kron,
    partial_trace,
    sqrtm_psd,
    von_neumann_entropy,
)

log = logging.getLogger(__name__)

DEFAULT_GRID = (64, 128)
DEFAULT_REFINE_TOL = 1e-6
MAX_REFINE_ITER = 500
PROB_FLOOR = 1e-14

_YY = kron(SIGMA_Y, SIGMA_Y)


@dataclass(frozen=True)
class MeasurementBasis:
    """Projective measurement on qubit B, parametrized by two angles."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.theta <= math.pi):
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not (0.0 <= self.phi < 2 * math.pi):
            raise ValueError(f"phi must lie in [0, 2pi), got {self.phi}")

    @classmethod
    def normalized(cls, theta: float, phi: float) -> "MeasurementBasis":
        """Fold arbitrary angles into range; theta -> theta + pi only flips a ket's sign."""
        return cls(float(theta) % math.pi, float(phi) % (2 * math.pi))

    def vectors(self) -> tuple[np.ndarray, np.ndarray]:
        c, s = math.cos(self.theta), math.sin(self.theta)
        e = complex(math.cos(self.phi), math.sin(self.phi))
        return np.array([c, e * s]), np.array([s, -e * c])

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        v1, v2 = self.vectors()
        return np.outer(v1, v1.conj()), np.outer(v2, v2.conj())


class DiscordResult(NamedTuple):
    discord: float
    basis: MeasurementBasis
    conditional_entropy: float
    converged: bool


def _h2(x: float) -> float:
    """Binary Shannon entropy in bits."""
    x = min(max(x, 0.0), 1.0)
    return entropy_from_eigenvalues((x, 1.0 - x))


def _xlog2x(x):
    x = np.asarray(x, dtype=float)
    safe = np.where(x > ZERO_EIGEN, x, 1.0)
    return np.where(x > ZERO_EIGEN, x * np.log2(safe), 0.0)


def concurrence(rho) -> float:
    """Concurrence of a two-qubit state from the spin-flipped eigenvalues."""
    r = check_state(rho)
    flipped = _YY @ r.conj() @ _YY
    root = sqrtm_psd(r)
    values = jacobi_eigh(root @ flipped @ root)[0]
    values = np.where(values >= -1e-12, np.clip(values, 0.0, None), values)
    if np.any(values < 0):
        raise ValueError(f"rho * rho_tilde has a negative eigenvalue {values.min():.3e}")
    lams = np.sort(np.sqrt(values))[::-1]
    return float(max(0.0, lams[0] - lams[1] - lams[2] - lams[3]))


def concurrence_x(x: XState) -> float:
    """Concurrence of an X state from its six entries."""
    a = abs(x.rho23) - math.sqrt(max(x.rho11 * x.rho44, 0.0))
    b = abs(x.rho14) - math.sqrt(max(x.rho22 * x.rho33, 0.0))
    return 2.0 * max(0.0, a, b)


def mutual_information(rho) -> float:
    r = check_state(rho)
    s_a = von_neumann_entropy(partial_trace(r, "A"))
    s_b = von_neumann_entropy(partial_trace(r, "B"))
    return max(s_a + s_b - von_neumann_entropy(r), 0.0)


def _x_entropies(x: XState) -> tuple[float, float, float]:
    """S(rho_A), S(rho_B), S(rho_AB) for an X state (reduced states are diagonal)."""
    s_a = _h2(x.rho11 + x.rho22)
    s_b = _h2(x.rho11 + x.rho33)
    s_ab = entropy_from_eigenvalues(x.eigenvalues())
    return s_a, s_b, s_ab


def mutual_information_x(x: XState) -> float:
    s_a, s_b, s_ab = _x_entropies(x)
    return max(s_a + s_b - s_ab, 0.0)


def conditional_entropy_grid(rho, theta, phi) -> np.ndarray:
    """Post-measurement conditional entropy S(A | {Pi_B}) on arrays of angles.

    ``theta`` and ``phi`` broadcast against each other; the result has
    their broadcast shape.
    """
    t = np.asarray(rho, dtype=complex).reshape(2, 2, 2, 2)
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    c, s = np.cos(theta), np.sin(theta)
    e = np.exp(1j * phi)
    total = np.zeros(theta.shape)
    for v in (np.stack([c, e * s], axis=-1), np.stack([s, -e * c], axis=-1)):
        # sigma[a, a'] = <v|_B rho |v>_B, unnormalized conditional state of A
        sigma = np.einsum("...p,apcq,...q->...ac", v.conj(), t, v)
        d0 = sigma[..., 0, 0].real
        d1 = sigma[..., 1, 1].real
        prob = d0 + d1
        half = np.hypot(0.5 * (d0 - d1), np.abs(sigma[..., 0, 1]))
        lo = np.clip(0.5 * prob - half, 0.0, None)
        hi = 0.5 * prob + half
        # p * S(sigma/p) = p log p - sum e log e
        contrib = _xlog2x(prob) - _xlog2x(lo) - _xlog2x(hi)
        total += np.where(prob > PROB_FLOOR, contrib, 0.0)
    return np.clip(total, 0.0, None)


def conditional_entropy(rho, basis: MeasurementBasis) -> float:
    r = check_state(rho)
    return float(conditional_entropy_grid(r, basis.theta, basis.phi))


def minimize_conditional_entropy(rho, grid=DEFAULT_GRID, refine_tol: float = DEFAULT_REFINE_TOL
                                 ) -> tuple[float, MeasurementBasis, bool]:
    """Coarse (theta, phi) grid followed by Nelder-Mead refinement.

    theta only needs [0, pi/2]: beyond that the pair of projectors
    repeats with the roles of the two outcomes swapped.
    """
    n_theta, n_phi = grid
    thetas = np.linspace(0.0, math.pi / 2, n_theta)
    phis = np.linspace(0.0, 2 * math.pi, n_phi, endpoint=False)
    values = conditional_entropy_grid(rho, thetas[:, None], phis[None, :])
    i, j = np.unravel_index(np.argmin(values), values.shape)
    best = float(values[i, j])
    x0 = np.array([thetas[i], phis[j]])
    step = np.array([thetas[1] - thetas[0], phis[1] - phis[0]])
    simplex = np.array([x0, x0 + [step[0], 0.0], x0 + [0.0, step[1]]])

    def f(x):
        return float(conditional_entropy_grid(rho, x[0], x[1]))

    res = minimize(f, x0, method="Nelder-Mead",
                   options={"initial_simplex": simplex, "xatol": refine_tol,
                            "fatol": refine_tol, "maxiter": MAX_REFINE_ITER})
    converged = bool(res.success)
    if not converged:
        log.warning("discord refinement did not converge in %d iterations", MAX_REFINE_ITER)
    if res.fun < best:
        return float(res.fun), MeasurementBasis.normalized(*res.x), converged
    return best, MeasurementBasis.normalized(*x0), converged


def discord_numeric(rho, grid=DEFAULT_GRID, refine_tol: float = DEFAULT_REFINE_TOL) -> DiscordResult:
    """Quantum discord with measurement on B by direct minimization."""
    r = check_state(rho)
    cond, basis, converged = minimize_conditional_entropy(r, grid, refine_tol)
    s_b = von_neumann_entropy(partial_trace(r, "B"))
    value = s_b - von_neumann_entropy(r) + cond
    return DiscordResult(float(value), basis, float(cond), converged)


def classical_correlation(rho, grid=DEFAULT_GRID, refine_tol: float = DEFAULT_REFINE_TOL) -> float:
    r = check_state(rho)
    cond, _, _ = minimize_conditional_entropy(r, grid, refine_tol)
    return von_neumann_entropy(partial_trace(r, "A")) - cond


def discord_x_detail(x: XState) -> tuple[float, str]:
    """Closed-form X-state discord and which candidate won ('qd1', 'qd2' or 'tie')."""
    s_b = _h2(x.rho11 + x.rho33)
    neg_s_ab = float(np.sum(_xlog2x(x.eigenvalues())))
    z = 1.0 - 2.0 * (x.rho33 + x.rho44)
    eta = 0.5 * (1.0 + math.sqrt(z * z + 4.0 * (abs(x.rho14) + abs(x.rho23)) ** 2))
    d1 = _h2(eta)
    d2 = -float(np.sum(_xlog2x(x.populations))) - s_b
    qd1 = s_b + neg_s_ab + d1
    qd2 = s_b + neg_s_ab + d2
    if qd1 == qd2:
        return qd1, "tie"
    if qd1 < qd2:
        return qd1, "qd1"
    return qd2, "qd2"


def discord_x(x: XState) -> float:
    return discord_x_detail(x)[0]
