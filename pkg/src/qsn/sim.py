"""Exact dense simulation of small multi-qubit registers.

Conventions, fixed project-wide:

* Qubit 0 is the MOST significant bit of a computational-basis index.
  Basis index ``b`` therefore stores qubit ``k``'s bit at position
  ``n_qubits - 1 - k``, and ``|g...g>`` is index 0, ``|e...e>`` the last
  index.
* State vectors are dense ``complex128`` arrays of length ``2**n`` and
  density matrices dense ``2**n x 2**n`` arrays.  Registers are capped at
  ``MAX_QUBITS`` qubits; beyond that the dense representation is the wrong
  tool.
* Gate application is functional: inputs are never mutated.

State vectors are allowed to be unnormalized because derivative states
(which are tangent vectors, not physical states) share the type.  Operations
that require a physical state check the norm themselves.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, NumericValidationError
from .tolerances import (
    HERMITIAN_TOL,
    KRAUS_TOL,
    MAX_QUBITS,
    NORM_TOL,
    PSD_TOL,
    TRACE_TOL,
    UNITARY_TOL,
)

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


def _check_qubit_count(n_qubits: int) -> None:
    if not isinstance(n_qubits, (int, np.integer)) or not 1 <= n_qubits <= MAX_QUBITS:
        raise ConfigurationError(
            f"qubit count must be an integer in [1, {MAX_QUBITS}], got {n_qubits!r}"
        )


@dataclass(frozen=True)
class StateVector:
    """Dense amplitude vector over the computational basis."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        _check_qubit_count(self.n_qubits)
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (1 << self.n_qubits,):
            raise ConfigurationError(
                f"expected {1 << self.n_qubits} amplitudes for {self.n_qubits} "
                f"qubits, got shape {amps.shape}"
            )
        if not np.all(np.isfinite(amps.view(float))):
            raise NumericValidationError("amplitudes must be finite")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class DensityMatrix:
    """Dense density operator over the computational basis."""

    n_qubits: int
    elements: np.ndarray

    def __post_init__(self) -> None:
        _check_qubit_count(self.n_qubits)
        mat = np.asarray(self.elements, dtype=complex)
        dim = 1 << self.n_qubits
        if mat.shape != (dim, dim):
            raise ConfigurationError(
                f"expected a {dim}x{dim} matrix for {self.n_qubits} qubits, "
                f"got shape {mat.shape}"
            )
        if not np.all(np.isfinite(mat.view(float))):
            raise NumericValidationError("matrix elements must be finite")
        object.__setattr__(self, "elements", mat)


@dataclass(frozen=True)
class KrausSet:
    """A complete set of single-qubit Kraus operators.

    Completeness (sum K^dagger K = I within KRAUS_TOL) is enforced at
    construction so a KrausSet in hand is always a valid channel.
    """

    operators: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        ops = tuple(np.asarray(op, dtype=complex) for op in self.operators)
        if not ops:
            raise ConfigurationError("a Kraus set needs at least one operator")
        for op in ops:
            if op.shape != (2, 2):
                raise ConfigurationError("Kraus operators must be 2x2")
        total = sum(op.conj().T @ op for op in ops)
        if np.max(np.abs(total - IDENTITY_2)) > KRAUS_TOL:
            raise NumericValidationError(
                "Kraus set is not complete: sum K^dagger K deviates from identity "
                f"by {np.max(np.abs(total - IDENTITY_2)):.3e}"
            )
        object.__setattr__(self, "operators", ops)


def init_ground(n_qubits: int) -> StateVector:
    """|g>^n: all population in basis index 0."""
    _check_qubit_count(n_qubits)
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


# ---------------------------------------------------------------------------
# Low-level amplitude kernels.  These skip validation and are the hot path
# for the circuit and gradient code; the public wrappers below validate.
# ---------------------------------------------------------------------------

def apply_matrix_1q(amps: np.ndarray, n_qubits: int, qubit: int, mat: np.ndarray) -> np.ndarray:
    """Apply an arbitrary 2x2 matrix to one qubit of a raw amplitude array."""
    pre = 1 << qubit                 # qubit 0 is the MSB, so it is the leftmost axis
    post = 1 << (n_qubits - 1 - qubit)
    a = amps.reshape(pre, 2, post)
    out = np.empty_like(a)
    out[:, 0, :] = mat[0, 0] * a[:, 0, :] + mat[0, 1] * a[:, 1, :]
    out[:, 1, :] = mat[1, 0] * a[:, 0, :] + mat[1, 1] * a[:, 1, :]
    return out.reshape(-1)


@lru_cache(maxsize=None)
def _cz_mask(n_qubits: int, i: int, j: int) -> np.ndarray:
    idx = np.arange(1 << n_qubits)
    bit_i = (idx >> (n_qubits - 1 - i)) & 1
    bit_j = (idx >> (n_qubits - 1 - j)) & 1
    mask = (bit_i & bit_j).astype(bool)
    mask.setflags(write=False)
    return mask


def apply_cz_amps(amps: np.ndarray, n_qubits: int, i: int, j: int) -> np.ndarray:
    out = amps.copy()
    mask = _cz_mask(n_qubits, i, j)
    out[mask] = -out[mask]
    return out


# ---------------------------------------------------------------------------
# Public, validating operations.
# ---------------------------------------------------------------------------

def _check_qubit_index(state_qubits: int, qubit: int) -> None:
    if not isinstance(qubit, (int, np.integer)) or not 0 <= qubit < state_qubits:
        raise ConfigurationError(
            f"qubit index {qubit!r} out of range for {state_qubits} qubits"
        )


def apply_1q(state: StateVector, qubit: int, u: np.ndarray) -> StateVector:
    """Apply a single-qubit unitary to one qubit of the register."""
    _check_qubit_index(state.n_qubits, qubit)
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ConfigurationError(f"expected a 2x2 gate, got shape {u.shape}")
    if np.max(np.abs(u.conj().T @ u - IDENTITY_2)) > UNITARY_TOL:
        raise NumericValidationError("gate matrix is not unitary")
    return StateVector(state.n_qubits, apply_matrix_1q(state.amplitudes, state.n_qubits, qubit, u))


def apply_cz(state: StateVector, i: int, j: int) -> StateVector:
    """Controlled-Z between two distinct qubits (symmetric in i, j)."""
    _check_qubit_index(state.n_qubits, i)
    _check_qubit_index(state.n_qubits, j)
    if i == j:
        raise ConfigurationError("controlled-Z needs two distinct qubits")
    return StateVector(state.n_qubits, apply_cz_amps(state.amplitudes, state.n_qubits, i, j))


def to_density(state: StateVector) -> DensityMatrix:
    """|psi><psi| for a normalized state."""
    amps = state.amplitudes
    if abs(np.vdot(amps, amps).real - 1.0) > max(NORM_TOL, 1e-10):
        raise NumericValidationError(
            f"state is not normalized (norm deviation {abs(state.norm - 1.0):.3e})"
        )
    return DensityMatrix(state.n_qubits, np.outer(amps, amps.conj()))


def apply_channel(rho: DensityMatrix, qubit: int, kraus: KrausSet) -> DensityMatrix:
    """Apply a single-qubit channel rho -> sum_i K_i rho K_i^dagger."""
    _check_qubit_index(rho.n_qubits, qubit)
    n = rho.n_qubits
    pre = 1 << qubit
    post = 1 << (n - 1 - qubit)
    r = rho.elements.reshape(pre, 2, post, pre, 2, post)
    out = np.zeros_like(r)
    for op in kraus.operators:
        t = np.einsum("xa,parqbs->pxrqbs", op, r)
        out += np.einsum("pxrqbs,yb->pxrqys", t, op.conj())
    dim = 1 << n
    return DensityMatrix(n, out.reshape(dim, dim))


def basis_probabilities(obj: StateVector | DensityMatrix) -> np.ndarray:
    """Computational-basis outcome distribution of a state."""
    if isinstance(obj, StateVector):
        return np.abs(obj.amplitudes) ** 2
    if isinstance(obj, DensityMatrix):
        return np.clip(np.real(np.diag(obj.elements)), 0.0, None)
    raise ConfigurationError(f"expected StateVector or DensityMatrix, got {type(obj).__name__}")


def validate_density(rho: DensityMatrix) -> None:
    """Raise unless rho is Hermitian, unit-trace, and PSD within tolerances."""
    mat = rho.elements
    if np.max(np.abs(mat - mat.conj().T)) > HERMITIAN_TOL:
        raise NumericValidationError("density matrix is not Hermitian")
    if abs(np.trace(mat).real - 1.0) > TRACE_TOL:
        raise NumericValidationError(f"trace is {np.trace(mat).real!r}, expected 1")
    eigvals = np.linalg.eigvalsh(mat)
    if eigvals.min() < -PSD_TOL:
        raise NumericValidationError(f"negative eigenvalue {eigvals.min():.3e}")
