"""Quantum correlations of two excitonic qubits in coupled quantum dots
under colored-noise dephasing."""

__version__ = "0.1.0"

from .channel import NoiseParams, apply_dephasing, kraus_operators, memory_amplitude, simulate_rtn
from .correlations import (
    MeasurementBasis,
    classical_correlation,
    concurrence,
    concurrence_x,
    conditional_entropy,
    discord_numeric,
    discord_x,
    mutual_information,
)
from .model import (
    ModelParams,
    XState,
    build_hamiltonian,
    closed_form_state,
    state_source,
    thermal_state,
)

__all__ = [
    "MeasurementBasis",
    "ModelParams",
    "NoiseParams",
    "XState",
    "apply_dephasing",
    "build_hamiltonian",
    "classical_correlation",
    "closed_form_state",
    "concurrence",
    "concurrence_x",
    "conditional_entropy",
    "discord_numeric",
    "discord_x",
    "kraus_operators",
    "memory_amplitude",
    "mutual_information",
    "simulate_rtn",
    "state_source",
    "thermal_state",
]
