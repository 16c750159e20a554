"""Shared prepare / sense / measure plumbing used by the optimizers,
the Bayesian estimator, the noise sweeps, and the experiment drivers."""

from __future__ import annotations

import numpy as np

from .ansatz import AnsatzSpec, apply_ansatz
from .fisher import cfi, dprobs_wrt_delta, qfi_pure
from .interaction import DMInteraction, apply_interaction, delta_derivative
from .sim import StateVector, basis_probabilities, init_ground
from .topology import Topology


def prepare(topology: Topology, layers: int, params: np.ndarray) -> StateVector:
    """U(theta)|g...g>."""
    spec = AnsatzSpec(topology, layers, params)
    return apply_ansatz(init_ground(topology.n_qubits), spec)


def measurement_spec(topology: Topology, layers: int, params: np.ndarray) -> AnsatzSpec:
    """The daggered circuit family used on the measurement side."""
    return AnsatzSpec(topology, layers, params, daggered=True)


def sense(prepared: StateVector, dm: DMInteraction) -> tuple[StateVector, StateVector]:
    """Sensed state and its exact delta-derivative."""
    return apply_interaction(prepared, dm), delta_derivative(prepared, dm)


def probe_qfi(prepared: StateVector, dm: DMInteraction) -> float:
    """Quantum information carried by a prepared probe under the drive."""
    psi, dpsi = sense(prepared, dm)
    return qfi_pure(psi, dpsi)


def outcome_probs(
    prepared: StateVector, dm: DMInteraction, meas_spec: AnsatzSpec
) -> np.ndarray:
    """Outcome distribution of the full prepare-sense-measure pipeline."""
    return basis_probabilities(apply_ansatz(apply_interaction(prepared, dm), meas_spec))


def probe_cfi(prepared: StateVector, dm: DMInteraction, meas_spec: AnsatzSpec) -> float:
    """Classical information of the pipeline's outcome distribution."""
    probs = outcome_probs(prepared, dm, meas_spec)
    dprobs = dprobs_wrt_delta(prepared, dm, meas_spec)
    return cfi(probs, dprobs)
