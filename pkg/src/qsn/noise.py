"""Robustness of the optimized probe against single-qubit dephasing.

The channel (Kraus form)

    K0 = [[1, 0], [0, sqrt(1 - lam)]],   K1 = [[0, 0], [0, sqrt(lam)]]

acts independently on every qubit after the sensing drive and before the
measurement.  The sensed pure state and its exact delta-derivative are
promoted to density-matrix form, pushed through the channel (which is
linear, so the derivative maps the same way), and the variance bound is
recomputed from the mixed-state information.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .errors import DomainError
from .fisher import qfi_mixed
from .interaction import DMInteraction
from .pipeline import prepare, sense
from .sim import DensityMatrix, KrausSet, apply_channel, to_density
from .topology import Topology


def dephasing_kraus(lam: float) -> KrausSet:
    """Kraus pair of the single-qubit dephasing channel with strength lam."""
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"dephasing strength must lie in [0, 1], got {lam!r}")
    k0 = np.array([[1.0, 0.0], [0.0, sqrt(1.0 - lam)]], dtype=complex)
    k1 = np.array([[0.0, 0.0], [0.0, sqrt(lam)]], dtype=complex)
    return KrausSet((k0, k1))


def apply_dephasing_all(rho: DensityMatrix, lam: float) -> DensityMatrix:
    """Apply the dephasing channel to every qubit (qubit order is irrelevant:
    channels on distinct qubits commute)."""
    kraus = dephasing_kraus(lam)
    out = rho
    for q in range(rho.n_qubits):
        out = apply_channel(out, q, kraus)
    return out


def _apply_dephasing_matrix(mat: np.ndarray, n_qubits: int, lam: float) -> np.ndarray:
    """Channel action on a raw (not necessarily unit-trace) matrix."""
    kraus = dephasing_kraus(lam)
    current = mat
    dim = mat.shape[0]
    for q in range(n_qubits):
        pre = 1 << q
        post = 1 << (n_qubits - 1 - q)
        r = current.reshape(pre, 2, post, pre, 2, post)
        acc = np.zeros_like(r)
        for op in kraus.operators:
            t = np.einsum("xa,parqbs->pxrqbs", op, r)
            acc += np.einsum("pxrqbs,yb->pxrqys", t, op.conj())
        current = acc.reshape(dim, dim)
    return current


def qb_under_noise(
    theta_star: np.ndarray,
    topology: Topology,
    layers: int,
    dm: DMInteraction,
    lam: float,
) -> float:
    """Variance bound of the fixed probe when each qubit dephases with lam."""
    prepared = prepare(topology, layers, np.asarray(theta_star, dtype=float))
    psi, dpsi = sense(prepared, dm)
    rho = to_density(psi).elements
    drho = np.outer(dpsi.amplitudes, psi.amplitudes.conj())
    drho = drho + drho.conj().T
    n = topology.n_qubits
    rho_noisy = _apply_dephasing_matrix(rho, n, lam)
    drho_noisy = _apply_dephasing_matrix(drho, n, lam)
    q = qfi_mixed(DensityMatrix(n, rho_noisy), drho_noisy)
    return 1.0 / q if q > 0.0 else float("inf")


@dataclass(frozen=True)
class DephasingSweep:
    """Variance bounds over a grid of dephasing strengths."""

    lambdas: tuple[float, ...]
    qb_values: tuple[float, ...]

    @property
    def delta_vs_noiseless(self) -> float:
        """Bound at the strongest dephasing minus the noiseless bound."""
        return self.qb_values[-1] - self.qb_values[0]


def dephasing_sweep(
    theta_star: np.ndarray,
    topology: Topology,
    layers: int,
    dm: DMInteraction,
    lambdas: tuple[float, ...] = tuple(np.round(np.arange(0.0, 1.0, 0.1), 10)),
) -> DephasingSweep:
    """QB as a function of dephasing strength for a fixed probe."""
    values = tuple(
        qb_under_noise(theta_star, topology, layers, dm, lam) for lam in lambdas
    )
    return DephasingSweep(lambdas=tuple(float(l) for l in lambdas), qb_values=values)
