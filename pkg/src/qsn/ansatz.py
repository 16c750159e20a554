"""Layered hardware-efficient circuits and reference probe states.

Circuit structure for a topology with edge set E and L layers:

* an initial rotation block U_rot on every qubit, then
* per layer, per edge (i, j) in canonical order: CZ(i, j) followed by a
  fresh U_rot on qubit i and a fresh U_rot on qubit j.

U_rot(x, y, z) = R_z(z) R_y(y) R_x(x), i.e. the x-rotation acts first, with
R_a(t) = exp(-i t sigma_a / 2).  Every rotation consumes its own parameter,
so the parameter count is 3 N + L * 6 |E|.  Parameters are angles in
radians, periodic in 2 pi up to global phase.

The daggered variant is the exact adjoint circuit (reversed gate order,
every gate inverted) evaluated on its own independent parameter vector; it
is the measurement-side circuit.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import cos, sin

import numpy as np

from .errors import ConfigurationError
from .sim import (
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    StateVector,
    apply_cz_amps,
    apply_matrix_1q,
    init_ground,
)
from .topology import Topology

_PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)

# Gate records: ("r", qubit, axis, param_index, sign) or ("cz", i, j).
# sign is +1 for forward rotations and -1 for their daggered counterparts,
# so the applied matrix is always exp(-i * sign * theta * sigma_axis / 2).
_Gate = tuple


def param_count(topology: Topology, layers: int) -> int:
    """Number of free angles in the circuit: 3N + layers * 6|E|."""
    if not isinstance(layers, (int, np.integer)) or layers < 0:
        raise ConfigurationError(f"layer count must be a non-negative integer, got {layers!r}")
    return 3 * topology.n_qubits + int(layers) * 6 * topology.n_edges


@dataclass(frozen=True)
class AnsatzSpec:
    """A circuit family member: topology, depth, parameters, direction."""

    topology: Topology
    layers: int
    params: np.ndarray
    daggered: bool = False

    def __post_init__(self) -> None:
        params = np.asarray(self.params, dtype=float)
        expected = param_count(self.topology, self.layers)
        if params.shape != (expected,):
            raise ConfigurationError(
                f"expected {expected} parameters for {self.topology.name!r} with "
                f"{self.layers} layer(s), got shape {params.shape}"
            )
        if not np.all(np.isfinite(params)):
            raise ConfigurationError("parameters must be finite")
        object.__setattr__(self, "params", params)


def rotation_matrix(axis: int, angle: float) -> np.ndarray:
    """exp(-i * angle * sigma_axis / 2) for axis 0=x, 1=y, 2=z."""
    c, s = cos(angle / 2.0), sin(angle / 2.0)
    if axis == 0:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if axis == 1:
        return np.array([[c, -s], [s, c]], dtype=complex)
    return np.array([[c - 1j * s, 0.0], [0.0, c + 1j * s]], dtype=complex)


def _gate_sequence(topology: Topology, layers: int, daggered: bool) -> list[_Gate]:
    gates: list[_Gate] = []
    k = 0
    for q in range(topology.n_qubits):
        for axis in (0, 1, 2):
            gates.append(("r", q, axis, k, 1.0))
            k += 1
    for _ in range(layers):
        for i, j in topology.edges:
            gates.append(("cz", i, j))
            for q in (i, j):
                for axis in (0, 1, 2):
                    gates.append(("r", q, axis, k, 1.0))
                    k += 1
    if daggered:
        gates = [
            ("r", g[1], g[2], g[3], -g[4]) if g[0] == "r" else g
            for g in reversed(gates)
        ]
    return gates


def _run(
    gates: list[_Gate],
    params: np.ndarray,
    amps: np.ndarray,
    n_qubits: int,
    insert_generator_at: int = -1,
) -> np.ndarray:
    """Fold the gate list over an amplitude array.

    With ``insert_generator_at = k`` the generator of the rotation holding
    parameter index k is applied right after that rotation, which turns the
    output into the exact partial derivative of the circuit action.
    """
    out = amps
    for gate in gates:
        if gate[0] == "r":
            _, q, axis, idx, sign = gate
            out = apply_matrix_1q(out, n_qubits, q, rotation_matrix(axis, sign * params[idx]))
            if idx == insert_generator_at:
                out = apply_matrix_1q(out, n_qubits, q, (-0.5j * sign) * _PAULIS[axis])
        else:
            out = apply_cz_amps(out, n_qubits, gate[1], gate[2])
    return out


def apply_ansatz(state: StateVector, spec: AnsatzSpec) -> StateVector:
    """Run the circuit on a state; daggered specs apply the exact adjoint."""
    if state.n_qubits != spec.topology.n_qubits:
        raise ConfigurationError(
            f"state has {state.n_qubits} qubits but topology "
            f"{spec.topology.name!r} expects {spec.topology.n_qubits}"
        )
    gates = _gate_sequence(spec.topology, spec.layers, spec.daggered)
    return StateVector(state.n_qubits, _run(gates, spec.params, state.amplitudes, state.n_qubits))


def derivative_state(state: StateVector, spec: AnsatzSpec, k: int) -> StateVector:
    """Exact d/d theta_k of the circuit action on ``state``.

    Computed by inserting the rotation generator (-i * sign * sigma_a / 2)
    at the position of the gate that consumes parameter k.  The result is a
    tangent vector and is not normalized.
    """
    if not isinstance(k, (int, np.integer)) or not 0 <= k < spec.params.size:
        raise ConfigurationError(
            f"parameter index {k!r} out of range for {spec.params.size} parameters"
        )
    if state.n_qubits != spec.topology.n_qubits:
        raise ConfigurationError("state and topology qubit counts differ")
    gates = _gate_sequence(spec.topology, spec.layers, spec.daggered)
    amps = _run(gates, spec.params, state.amplitudes, state.n_qubits, insert_generator_at=int(k))
    return StateVector(state.n_qubits, amps)


def adjoint_gradient(spec: AnsatzSpec, state: StateVector, cograd: np.ndarray) -> np.ndarray:
    """All parameter gradients of a circuit-output functional in one sweep.

    For Phi(theta) = circuit(theta)|state> and a fixed cogradient vector y
    (y_m = dC/d conj(Phi_m) for a real cost C), returns the length-P real
    vector g_k = 2 Re <d Phi / d theta_k | y>, which is exactly dC/d theta_k.

    Algebraically identical to assembling the gradient from
    ``derivative_state`` one parameter at a time, but costs O(P) gate
    applications instead of O(P^2): the forward state and the cogradient
    are rolled back through the circuit together, emitting one generator
    overlap per rotation.
    """
    n = state.n_qubits
    if n != spec.topology.n_qubits:
        raise ConfigurationError("state and topology qubit counts differ")
    y = np.asarray(cograd, dtype=complex)
    if y.shape != state.amplitudes.shape:
        raise ConfigurationError("cogradient shape does not match the state")

    gates = _gate_sequence(spec.topology, spec.layers, spec.daggered)
    phi = _run(gates, spec.params, state.amplitudes, n)
    lam = y.copy()
    grads = np.zeros(spec.params.size)
    for gate in reversed(gates):
        if gate[0] == "r":
            _, q, axis, idx, sign = gate
            gen = (-0.5j * sign) * _PAULIS[axis]
            grads[idx] = 2.0 * np.vdot(apply_matrix_1q(phi, n, q, gen), lam).real
            inv = rotation_matrix(axis, sign * spec.params[idx]).conj().T
            phi = apply_matrix_1q(phi, n, q, inv)
            lam = apply_matrix_1q(lam, n, q, inv)
        else:
            phi = apply_cz_amps(phi, n, gate[1], gate[2])
            lam = apply_cz_amps(lam, n, gate[1], gate[2])
    return grads


# ---------------------------------------------------------------------------
# Reference probes.
# ---------------------------------------------------------------------------

def ghz_state(n_qubits: int) -> StateVector:
    """(|g...g> + |e...e>) / sqrt(2)."""
    state = init_ground(n_qubits)
    amps = state.amplitudes.copy()
    amps[0] = amps[-1] = 1.0 / np.sqrt(2.0)
    return StateVector(n_qubits, amps)


def excited_state(n_qubits: int) -> StateVector:
    """|e>^n: all population in the top basis index."""
    state = init_ground(n_qubits)
    amps = np.zeros_like(state.amplitudes)
    amps[-1] = 1.0
    return StateVector(n_qubits, amps)


def optimal_state(n_qubits: int, alpha: float) -> StateVector:
    """Equal superposition of the two extreme product eigenstates.

    With psi_pm = (|g> +/- e^{i alpha} |e>) / sqrt(2), the returned state is
    (psi_+^n + psi_-^n) / sqrt(2); the two components are orthogonal so the
    1/sqrt(2) weight is exact.  This probe saturates the information ceiling
    for the sensing interaction at phase offset alpha.
    """
    _ = init_ground(n_qubits)  # range check
    plus = np.array([1.0, np.exp(1j * alpha)], dtype=complex) / np.sqrt(2.0)
    minus = np.array([1.0, -np.exp(1j * alpha)], dtype=complex) / np.sqrt(2.0)
    amps_plus = plus
    amps_minus = minus
    for _ in range(n_qubits - 1):
        amps_plus = np.kron(amps_plus, plus)
        amps_minus = np.kron(amps_minus, minus)
    return StateVector(n_qubits, (amps_plus + amps_minus) / np.sqrt(2.0))
