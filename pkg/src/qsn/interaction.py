"""The weak classical drive sensed by the network.

Each qubit evolves under the same single-qubit unitary

    U(delta, alpha) = [[cos d,                i e^{-i alpha} sin d],
                       [i e^{i alpha} sin d,  cos d]],

where delta is the accumulated phase (the estimation target, the product of
coupling strength and interrogation time) and alpha a fixed phase offset.
Equivalently U = exp(i delta G) with the Hermitian generator
G(alpha) = cos(alpha) sigma_x + sin(alpha) sigma_y, which makes the exact
delta-derivative of the sensed state i * sum_k G_k applied after the drive.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, sin

import numpy as np

from .errors import ConfigurationError
from .sim import PAULI_X, PAULI_Y, StateVector, apply_matrix_1q

__all__ = [
    "DMInteraction",
    "dm_unitary",
    "generator",
    "apply_interaction",
    "delta_derivative",
    "generator_sum_apply",
    "individual_baseline",
    "individual_baseline_exact",
]


@dataclass(frozen=True)
class DMInteraction:
    """Drive settings: accumulated phase ``delta`` and offset ``alpha``."""

    delta: float
    alpha: float = 0.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.delta) and np.isfinite(self.alpha)):
            raise ConfigurationError("delta and alpha must be finite reals")


def dm_unitary(delta: float, alpha: float) -> np.ndarray:
    """The 2x2 drive unitary cos(d) I + i sin(d) G(alpha)."""
    c, s = cos(delta), sin(delta)
    e_minus, e_plus = np.exp(-1j * alpha), np.exp(1j * alpha)
    return np.array([[c, 1j * e_minus * s], [1j * e_plus * s, c]], dtype=complex)


def generator(alpha: float) -> np.ndarray:
    """G(alpha) = cos(alpha) sigma_x + sin(alpha) sigma_y."""
    return cos(alpha) * PAULI_X + sin(alpha) * PAULI_Y


def apply_interaction(state: StateVector, dm: DMInteraction) -> StateVector:
    """Apply the drive unitary to every qubit of the register."""
    u = dm_unitary(dm.delta, dm.alpha)
    amps = state.amplitudes
    for q in range(state.n_qubits):
        amps = apply_matrix_1q(amps, state.n_qubits, q, u)
    return StateVector(state.n_qubits, amps)


def generator_sum_apply(state: StateVector, alpha: float) -> np.ndarray:
    """Raw amplitudes of (sum_k G_k) |state>."""
    g = generator(alpha)
    total = np.zeros_like(state.amplitudes)
    for q in range(state.n_qubits):
        total += apply_matrix_1q(state.amplitudes, state.n_qubits, q, g)
    return total


def delta_derivative(prepared: StateVector, dm: DMInteraction) -> StateVector:
    """Exact d/d delta of the sensed state, as an (unnormalized) vector.

    The drive commutes with its own generator, so
    d/d delta V|prepared> = i (sum_k G_k) V |prepared>.
    """
    sensed = apply_interaction(prepared, dm)
    return StateVector(prepared.n_qubits, 1j * generator_sum_apply(sensed, dm.alpha))


def individual_baseline(n_qubits: int, delta: float) -> float:
    """Small-phase excitation probability N * delta^2 of unentangled sensing."""
    if n_qubits < 1:
        raise ConfigurationError("need at least one qubit")
    return n_qubits * delta * delta


def individual_baseline_exact(n_qubits: int, delta: float) -> float:
    """Exact per-qubit excitation total N * sin(delta)^2."""
    if n_qubits < 1:
        raise ConfigurationError("need at least one qubit")
    return n_qubits * sin(delta) ** 2
