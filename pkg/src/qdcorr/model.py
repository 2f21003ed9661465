"""Two coupled quantum-dot excitons: parameters, Hamiltonian and states.

Two state sources are available:

``hamiltonian``
    Gibbs state of the two-dot Hamiltonian, then the dephasing channel.
``paper-closed-form``
    The printed closed-form X-state entries, evaluated verbatim and (by
    default) renormalized to unit trace.

The two do not coincide in general; :func:`source_discrepancy` reports
by how much.  Energies are joules internally.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import constants

from .channel import DEGENERATE, OSCILLATORY, NoiseParams, apply_dephasing, memory_amplitude
from .qmat import (
    EIGEN_FLOOR,
    I2,
    S_MINUS,
    S_PLUS,
    S_Z,
    check_hermitian,
    jacobi_eigh,
    kron,
    x_block_eigenvalues,
)

log = logging.getLogger(__name__)

K_B = constants.k  # 1.380649e-23 J/K
EV = constants.e  # 1.602176634e-19 J
COULOMB_K = 1.0 / (4.0 * math.pi * constants.epsilon_0)
NM = 1e-9

DEFAULT_OMEGA_EV = 1.3
CLOSED_FORM_SOURCE = "paper-closed-form"
HAMILTONIAN_SOURCE = "hamiltonian"
STATE_SOURCES = (CLOSED_FORM_SOURCE, HAMILTONIAN_SOURCE)

# |mu^2| below this switches the printed prefactor to its cancellation-free form
_SEAM = 1e-6


class InvalidParameterError(ValueError):
    pass


class InvalidGeometryError(ValueError):
    pass


@dataclass(frozen=True)
class ModelParams:
    """Physical configuration of the two-dot system (SI units).

    Attributes
    ----------
    omega : float
        Exciton energy hbar*omega in joules.
    Omega : float
        Field-coupling energy hbar*Omega in joules.
    Jz : float
        Dipolar coupling energy hbar*J_z in joules.
    lam : float
        Foerster coupling energy in joules.
    temperature : float
        Kelvin.
    """

    omega: float = DEFAULT_OMEGA_EV * EV
    Omega: float = 0.0
    Jz: float = 0.0
    lam: float = 0.0
    temperature: float = 25.0

    def __post_init__(self):
        for name in ("omega", "Omega", "Jz", "lam", "temperature"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")
        if self.temperature <= 0:
            raise InvalidParameterError(f"temperature must be positive, got {self.temperature}")
        if self.Jz < 0 or self.lam < 0:
            raise InvalidParameterError("Jz and lambda must be non-negative")

    @classmethod
    def from_ev(cls, omega_ev=DEFAULT_OMEGA_EV, Omega_ev=0.0, jz_ev=0.0, lambda_ev=0.0,
                temperature=25.0) -> "ModelParams":
        return cls(omega_ev * EV, Omega_ev * EV, jz_ev * EV, lambda_ev * EV, temperature)

    @property
    def beta(self) -> float:
        return 1.0 / (K_B * self.temperature)

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class XState:
    """Sparse X-shaped two-qubit state.

    Populations are in basis order |11>, |10>, |01>, |00>; ``rho23`` couples
    |10> and |01>, ``rho14`` couples |11> and |00>.
    """

    rho11: float
    rho22: float
    rho33: float
    rho44: float
    rho23: complex = 0.0
    rho14: complex = 0.0

    @property
    def populations(self) -> tuple[float, float, float, float]:
        return (self.rho11, self.rho22, self.rho33, self.rho44)

    @property
    def trace(self) -> float:
        return self.rho11 + self.rho22 + self.rho33 + self.rho44

    def to_matrix(self) -> np.ndarray:
        m = np.diag(np.array(self.populations, dtype=complex))
        m[1, 2] = self.rho23
        m[2, 1] = np.conj(self.rho23)
        m[0, 3] = self.rho14
        m[3, 0] = np.conj(self.rho14)
        return m

    @classmethod
    def from_matrix(cls, m, tol: float = 1e-12) -> "XState":
        a = check_hermitian(m)
        if a.shape != (4, 4):
            raise InvalidParameterError("XState needs a 4x4 matrix")
        off = a.copy()
        for i in range(4):
            off[i, i] = 0.0
            off[i, 3 - i] = 0.0
        if np.max(np.abs(off)) > tol:
            raise InvalidParameterError("matrix is not X-structured")
        return cls(float(a[0, 0].real), float(a[1, 1].real), float(a[2, 2].real),
                   float(a[3, 3].real), complex(a[1, 2]), complex(a[0, 3]))

    def eigenvalues(self) -> list[float]:
        return x_block_eigenvalues(self.to_matrix())

    def scaled(self, factor: float) -> "XState":
        return XState(self.rho11 * factor, self.rho22 * factor, self.rho33 * factor,
                      self.rho44 * factor, self.rho23 * factor, self.rho14 * factor)

    def dephased(self, lambda_nu: float) -> "XState":
        """Dephasing fast path: both X coherences flip two qubits, so scale by Lambda**2."""
        l2 = lambda_nu * lambda_nu
        return replace(self, rho23=self.rho23 * l2, rho14=self.rho14 * l2)

    def check(self, trace_tol: float = 1e-10, floor: float = EIGEN_FLOOR) -> "XState":
        if min(self.populations) < floor:
            raise InvalidParameterError(f"negative population in {self}")
        if abs(self.trace - 1.0) > trace_tol:
            raise InvalidParameterError(f"trace {self.trace!r} deviates from 1")
        if abs(self.rho23) ** 2 > self.rho22 * self.rho33 + 1e-12:
            raise InvalidParameterError("|rho23|^2 exceeds rho22*rho33")
        if abs(self.rho14) ** 2 > self.rho11 * self.rho44 + 1e-12:
            raise InvalidParameterError("|rho14|^2 exceeds rho11*rho44")
        return self


def omega_from_field(dipole_moment: float, field: float, angle: float = 0.0) -> float:
    """hbar*Omega = |d . E| in joules, for dipole (C m) and field (V/m)."""
    if dipole_moment < 0 or field < 0:
        raise InvalidParameterError("dipole moment and field magnitude must be non-negative")
    return dipole_moment * field * abs(math.cos(angle))


def jz_from_geometry(dipole_moment: float, separation: float, theta: float,
                     variant: str = "printed") -> float:
    """Dipole-dipole energy hbar*J_z in joules.

    ``variant="printed"`` uses the angular factor (1 - 3 cos theta);
    ``"conventional"`` uses (1 - 3 cos^2 theta).  The Coulomb constant
    1/(4 pi eps0) converts d^2/r^3 to SI energy.
    """
    if not separation > 0:
        raise InvalidGeometryError(f"separation must be positive, got {separation}")
    c = math.cos(theta)
    if variant == "printed":
        angular = 1.0 - 3.0 * c
    elif variant == "conventional":
        angular = 1.0 - 3.0 * c * c
    else:
        raise ValueError(f"unknown dipolar variant {variant!r}")
    return COULOMB_K * dipole_moment**2 * angular / separation**3


def build_hamiltonian(p: ModelParams) -> np.ndarray:
    """Two-dot Hamiltonian (joules) with identical dots.

    The pair sums run over ordered pairs i != j, so the |10> <-> |01>
    element is ``Jz + lam``.
    """
    n_op = S_Z + 0.5 * I2
    h = p.omega * (kron(n_op, I2) + kron(I2, n_op))
    h = h + p.Omega * (kron(S_Z, I2) + kron(I2, S_Z))
    hop = kron(S_PLUS, S_MINUS) + kron(S_MINUS, S_PLUS)
    h = h + p.Jz * hop
    # (S+^i S-^j + S-^j S+^i)/2 over both ordered pairs
    h = h + 0.5 * p.lam * (hop + hop)
    return h


def partition_function(energies, temperature: float, shift: float = 0.0) -> float:
    """Z = sum_i exp(-beta (E_i - shift)); degeneracies appear as repeats."""
    beta = 1.0 / (K_B * temperature)
    return float(sum(math.exp(-beta * (e - shift)) for e in energies))


def thermal_state(h, temperature: float) -> np.ndarray:
    """Gibbs state exp(-H/kT)/Z built in the eigenbasis of ``h``."""
    if not temperature > 0:
        raise InvalidParameterError("temperature must be positive")
    energies, vectors = jacobi_eigh(h)
    beta = 1.0 / (K_B * temperature)
    weights = np.exp(-beta * (energies - energies[0]))
    weights /= weights.sum()
    rho = (vectors * weights) @ vectors.conj().T
    return 0.5 * (rho + rho.conj().T)


def coherence_prefactor(noise: NoiseParams, nu):
    """nu-dependent factor multiplying the printed rho23 / rho32 entries.

    With s2 = 16 a^2 tau^2 - 1 this is
    e^{-2nu} (8a^2tau^2 + (8a^2tau^2 - 1) cos(2nu sqrt(s2)) + sqrt(s2) sin(2nu sqrt(s2))) / s2,
    continued to s2 < 0 with cosh/sinh and to s2 = 0 by its limit (1+nu)^2 e^{-2nu}.
    """
    nu = np.asarray(nu, dtype=float)
    a2t2 = noise.a**2 * noise.tau**2
    s2 = 16.0 * a2t2 - 1.0
    if abs(s2) < _SEAM or noise.branch == DEGENERATE:
        # same expression, rewritten with sin^2 and sinc so nothing cancels near s2 = 0
        mu = math.sqrt(abs(s2))
        x = mu * nu
        if s2 >= 0:
            sinc = np.sinc(x / math.pi)
            val = (nu * sinc) ** 2 + np.cos(x) ** 2 + nu * np.sinc(2 * x / math.pi) * 2.0
        else:
            shc = np.where(x == 0, 1.0, np.sinh(x) / np.where(x == 0, 1.0, x))
            sh2 = np.where(x == 0, 1.0, np.sinh(2 * x) / np.where(x == 0, 1.0, 2 * x))
            val = (nu * shc) ** 2 + np.cosh(x) ** 2 + 2.0 * nu * sh2
        out = np.exp(-2.0 * nu) * val
    elif noise.branch == OSCILLATORY:
        root = math.sqrt(s2)
        arg = 2.0 * nu * root
        out = np.exp(-2.0 * nu) * (8 * a2t2 + (-1 + 8 * a2t2) * np.cos(arg) + root * np.sin(arg)) / s2
    else:
        root = math.sqrt(-s2)
        arg = 2.0 * nu * root
        # cos(i y) = cosh y, sqrt(s2) sin(2 nu sqrt(s2)) = -root sinh(arg); exp(+/-arg) folded into e^{-2nu}
        ch = 0.5 * (np.exp(arg - 2 * nu) + np.exp(-arg - 2 * nu))
        sh = 0.5 * (np.exp(arg - 2 * nu) - np.exp(-arg - 2 * nu))
        out = (8 * a2t2 * np.exp(-2 * nu) + (-1 + 8 * a2t2) * ch - root * sh) / s2
    if out.ndim == 0:
        return float(out)
    return out


def _closed_form_entries(p: ModelParams, l2: float) -> tuple[float, float, float, float, float]:
    """Printed rho11, rho22, rho33, rho44, rho23 with coherence factor ``l2``.

    Every term is divided by exp(m), m the largest exponent in play, so
    the cosh/sinh of beta*(large energy) never overflow.
    """
    beta = p.beta
    jz, lam = p.Jz, p.lam
    radicand = jz * (lam + jz)
    if radicand < 0:
        raise InvalidParameterError("Jz*(lambda + Jz) must be non-negative")
    g = math.sqrt(radicand)
    x = beta * g
    y = beta * (p.omega + p.Omega)
    m = max(abs(x), abs(y))
    cosh_x = 0.5 * (math.exp(x - m) + math.exp(-x - m))
    sinh_x = 0.5 * (math.exp(x - m) - math.exp(-x - m))
    cosh_y = 0.5 * (math.exp(y - m) + math.exp(-y - m))
    denom = cosh_x + cosh_y
    rho11 = math.exp(-y - m) / (2.0 * denom)
    rho44 = math.exp(y - m) / (2.0 * denom)
    rho33 = cosh_x / denom
    if lam + jz == 0.0:
        # 0/0 on the lambda = 0 line; the symmetric-dot limit is 1
        ratio = 1.0
    else:
        ratio = jz / (lam + jz)
    rho22 = ratio * rho33
    if g == 0.0:
        # Jz/g * sinh(beta g) -> beta * Jz -> 0
        weight = 0.0
    else:
        weight = jz / g * sinh_x
    rho23 = -l2 * weight / denom
    return rho11, rho22, rho33, rho44, rho23


def closed_form_state(p: ModelParams, nu: float, noise: NoiseParams,
                      renormalize: bool = True) -> tuple[XState, float]:
    """Printed closed-form X state at dimensionless time ``nu``.

    Returns
    -------
    state : XState
        The entries as printed (``renormalize=False``) or divided by
        their trace (default).
    trace_deviation : float
        |trace - 1| of the printed entries before any renormalization.
    """
    if nu < 0:
        raise InvalidParameterError("nu must be non-negative")
    l2 = coherence_prefactor(noise, nu)
    r11, r22, r33, r44, r23 = _closed_form_entries(p, l2)
    state = XState(r11, r22, r33, r44, complex(r23), 0j)
    deviation = abs(state.trace - 1.0)
    if renormalize:
        log.debug("renormalizing printed closed form, trace - 1 = %.3e", state.trace - 1.0)
        state = state.scaled(1.0 / state.trace)
    return state, deviation


def thermal_x_state(p: ModelParams) -> XState:
    """Gibbs state of :func:`build_hamiltonian` as an X state."""
    return XState.from_matrix(thermal_state(build_hamiltonian(p), p.temperature))


def state_source(select: str, p: ModelParams, nu: float, noise: NoiseParams,
                 renormalize: bool = True) -> np.ndarray:
    """4x4 density matrix from the chosen source."""
    return x_state_source(select, p, nu, noise, renormalize).to_matrix()


def x_state_source(select: str, p: ModelParams, nu: float, noise: NoiseParams,
                   renormalize: bool = True) -> XState:
    if select == CLOSED_FORM_SOURCE:
        return closed_form_state(p, nu, noise, renormalize)[0]
    if select == HAMILTONIAN_SOURCE:
        rho0 = thermal_state(build_hamiltonian(p), p.temperature)
        return XState.from_matrix(apply_dephasing(rho0, memory_amplitude(noise, nu)))
    raise InvalidParameterError(f"unknown state source {select!r}; expected one of {STATE_SOURCES}")


def source_discrepancy(p: ModelParams, noise: NoiseParams, nu: float = 0.0) -> dict:
    """Compare the two state sources at one parameter point.

    Reports the block coupling each source implies, the trace deviation
    of the printed entries, and the largest entrywise gaps after
    renormalization.
    """
    printed, deviation = closed_form_state(p, nu, noise, renormalize=False)
    closed = printed.scaled(1.0 / printed.trace)
    gibbs = x_state_source(HAMILTONIAN_SOURCE, p, nu, noise)
    diag_gap = max(abs(u - v) for u, v in zip(closed.populations, gibbs.populations))
    return {
        "coupling_hamiltonian_J": p.Jz + p.lam,
        "coupling_closed_form_J": math.sqrt(p.Jz * (p.lam + p.Jz)),
        "printed_trace_deviation": deviation,
        "max_diagonal_gap": diag_gap,
        "coherence_gap": abs(closed.rho23 - gibbs.rho23),
        "rho22_rho33_asymmetry": abs(printed.rho22 - printed.rho33),
    }
