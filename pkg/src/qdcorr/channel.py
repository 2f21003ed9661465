"""Colored-noise dephasing channel driven by random telegraph noise.

Each qubit sees ``H(t) = hbar * a * n(t) * sigma_z`` where ``n(t)`` is a
+/-1 telegraph signal.  Time is measured in the dimensionless unit
``nu = t / (2 tau)``, in which the telegraph signal flips at unit rate.
Averaging over the noise leaves populations alone and multiplies every
single-flip coherence by the memory amplitude ``Lambda(nu)``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .qmat import I2, SIGMA_Z, as_matrix, check_hermitian, kron

OSCILLATORY = "oscillatory"
OVERDAMPED = "overdamped"
DEGENERATE = "degenerate"

MIN_TRAJECTORIES = 1000
RTN_BLOCK = 1 << 15


class InvalidAmplitudeError(ValueError):
    """Memory amplitude outside [-1, 1]."""


@dataclass(frozen=True)
class NoiseParams:
    """Telegraph-noise environment.

    ``a`` and ``tau`` are treated as a dimensionless pair; only ``4 a tau``
    enters the dynamics once time is expressed as ``nu``.
    """

    a: float
    tau: float

    def __post_init__(self):
        if not (self.a > 0 and self.tau > 0):
            raise ValueError(f"noise requires a > 0 and tau > 0, got a={self.a}, tau={self.tau}")

    @property
    def coupling(self) -> float:
        """4 a tau: the dimensionless noise strength per unit nu."""
        return 4.0 * self.a * self.tau

    @property
    def branch(self) -> str:
        k = self.coupling
        if k > 1.0:
            return OSCILLATORY
        if k < 1.0:
            return OVERDAMPED
        return DEGENERATE

    @property
    def mu(self) -> float:
        """|mu| with mu**2 = (4 a tau)**2 - 1; read together with ``branch``."""
        return math.sqrt(abs(self.coupling**2 - 1.0))

    def nu_from_time(self, t):
        return np.asarray(t) / (2.0 * self.tau)


def memory_amplitude(noise: NoiseParams, nu):
    """Coherence damping factor Lambda(nu) of the telegraph channel.

    Works on scalars and arrays.  The overdamped branch uses the real
    continuation (cosh/sinh) and ``4 a tau == 1`` its limit ``e^-nu (1+nu)``.
    """
    nu_arr = np.asarray(nu, dtype=float)
    if np.any(nu_arr < 0):
        raise ValueError("nu must be non-negative")
    mu = noise.mu
    branch = noise.branch
    if branch == OSCILLATORY:
        x = mu * nu_arr
        val = np.exp(-nu_arr) * (np.cos(x) + np.sin(x) / mu)
    elif branch == OVERDAMPED:
        x = mu * nu_arr
        # e^-nu (cosh x + sinh x / mu) = e^(x - nu) ((1 + e^-2x) + (1 - e^-2x) / mu) / 2,
        # finite for large nu and exactly 1 at nu = 0
        d = -np.expm1(-2.0 * x)
        val = np.exp(x - nu_arr) * (1.0 - 0.5 * d + 0.5 * d / mu)
    else:
        val = np.exp(-nu_arr) * (1.0 + nu_arr)
    if np.ndim(nu) == 0:
        return float(val)
    return val


def kraus_operators(lambda_nu: float) -> tuple[np.ndarray, np.ndarray]:
    """Single-qubit Kraus pair (M1, M2) for memory amplitude ``lambda_nu``."""
    lam = float(lambda_nu)
    if not abs(lam) <= 1.0:
        raise InvalidAmplitudeError(f"|Lambda| must not exceed 1, got {lam!r}")
    m1 = math.sqrt((1.0 + lam) / 2.0) * I2
    m2 = math.sqrt((1.0 - lam) / 2.0) * SIGMA_Z
    return m1, m2


def apply_dephasing(rho0, lambda_nu: float) -> np.ndarray:
    """Apply independent dephasing to both qubits of a 4x4 state.

    Sums the four products ``(M_i x M_j) rho (M_i x M_j)^dagger``.
    """
    rho = check_hermitian(as_matrix(rho0))
    if rho.shape != (4, 4):
        raise ValueError("apply_dephasing expects a two-qubit (4x4) state")
    ops = kraus_operators(lambda_nu)
    out = np.zeros((4, 4), dtype=complex)
    for ma in ops:
        for mb in ops:
            k = kron(ma, mb)
            out += k @ rho @ k.conj().T
    return out


def apply_dephasing_single(rho0, lambda_nu: float) -> np.ndarray:
    """Single-qubit version of :func:`apply_dephasing`."""
    rho = check_hermitian(as_matrix(rho0))
    out = np.zeros((2, 2), dtype=complex)
    for m in kraus_operators(lambda_nu):
        out += m @ rho @ m.conj().T
    return out


class RTNEstimate(NamedTuple):
    """Monte Carlo estimate of the dephased single-qubit state."""

    rho: np.ndarray
    coherence: float
    stderr: float


def _block_generator(seed: int, block: int) -> np.random.Generator:
    # counter-based stream keyed by (seed, block index)
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(block,))
    return np.random.Generator(np.random.Philox(ss))


def _rtn_block(args) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Integrate the telegraph phase for one block of trajectories.

    Returns per-target sums of cos(phase), sin(phase) and cos(phase)**2.
    """
    seed, block, size, coupling, targets = args
    rng = _block_generator(seed, block)
    sign = np.where(rng.random(size) < 0.5, -1.0, 1.0)
    t = np.zeros(size)
    integral = np.zeros(size)
    phase = np.zeros((len(targets), size))
    nu_max = targets[-1] if len(targets) else 0.0
    while True:
        alive = t < nu_max
        wait = rng.exponential(1.0, size)
        nxt = t + wait
        for k, target in enumerate(targets):
            hit = (t < target) & (target <= nxt)
            if np.any(hit):
                phase[k, hit] = integral[hit] + sign[hit] * (target - t[hit])
        if not np.any(alive):
            break
        integral = integral + sign * wait
        t = nxt
        sign = -sign
    phase *= coupling
    c = np.cos(phase)
    s = np.sin(phase)
    return c.sum(axis=1), s.sum(axis=1), (c * c).sum(axis=1)


def worker_count() -> int:
    """Worker count from ``QDCORR_WORKERS``; unset means one per CPU."""
    raw = os.environ.get("QDCORR_WORKERS", "").strip()
    if raw:
        return max(1, int(raw))
    return os.cpu_count() or 1


def rtn_coherence(noise: NoiseParams, nu_grid, n_traj: int, seed: int, workers: int | None = None):
    """Monte Carlo coherence factor on a grid of dimensionless times.

    Trajectories are split into fixed-size blocks, each with its own
    Philox stream keyed by ``(seed, block)``, and block sums are reduced
    in block order, so the result does not depend on ``workers``.

    Returns
    -------
    mean : ndarray
        Estimated ``<cos(phase)>`` at every ``nu``; compare to Lambda(nu).
    stderr : ndarray
        Standard error of the mean.
    mean_sin : ndarray
        Estimated ``<sin(phase)>`` (zero in expectation).
    """
    if n_traj < MIN_TRAJECTORIES:
        raise ValueError(f"n_traj must be at least {MIN_TRAJECTORIES}, got {n_traj}")
    grid = np.asarray(nu_grid, dtype=float).ravel()
    if np.any(grid < 0):
        raise ValueError("nu must be non-negative")
    order = np.argsort(grid, kind="stable")
    targets = grid[order]
    sizes = [RTN_BLOCK] * (n_traj // RTN_BLOCK)
    if n_traj % RTN_BLOCK:
        sizes.append(n_traj % RTN_BLOCK)
    tasks = [(seed, b, size, noise.coupling, targets) for b, size in enumerate(sizes)]
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_rtn_block, tasks))
    else:
        parts = [_rtn_block(task) for task in tasks]
    sum_c = np.zeros(len(targets))
    sum_s = np.zeros(len(targets))
    sum_cc = np.zeros(len(targets))
    for c, s, cc in parts:
        sum_c += c
        sum_s += s
        sum_cc += cc
    mean = sum_c / n_traj
    var = np.maximum(sum_cc / n_traj - mean**2, 0.0) * n_traj / (n_traj - 1)
    stderr = np.sqrt(var / n_traj)
    inverse = np.empty_like(order)
    inverse[order] = np.arange(len(order))
    return mean[inverse], stderr[inverse], (sum_s / n_traj)[inverse]


def simulate_rtn(rho0, noise: NoiseParams, nu: float, n_traj: int, seed: int,
                 workers: int | None = None) -> RTNEstimate:
    """Estimate the single-qubit state after telegraph dephasing up to ``nu``."""
    rho = check_hermitian(as_matrix(rho0))
    if rho.shape != (2, 2):
        raise ValueError("simulate_rtn expects a single-qubit (2x2) state")
    mean, stderr, mean_sin = rtn_coherence(noise, [nu], n_traj, seed, workers)
    # rho_01 picks up exp(-i phase)
    factor = complex(mean[0], -mean_sin[0])
    out = rho.copy()
    out[0, 1] = rho[0, 1] * factor
    out[1, 0] = rho[1, 0] * factor.conjugate()
    return RTNEstimate(out, float(mean[0]), float(stderr[0]))
