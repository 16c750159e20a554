"""Quantum and classical information measures and the estimation bound chain.

For a pure sensed state |Psi(delta)> the quantum information is

    Q = 4 ( <dPsi|dPsi> - |<Psi|dPsi>|^2 ),

for a mixed state it is assembled from the eigendecomposition of rho, and
for a measured outcome distribution the classical information is
F = sum_m (dp_m)^2 / p_m.  The bound chain nu * Var(delta) >= 1/F >= 1/Q
turns either quantity into a variance floor for nu repetitions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .ansatz import AnsatzSpec, apply_ansatz
from .errors import ConfigurationError, DomainError, NumericValidationError
from .interaction import DMInteraction, apply_interaction, delta_derivative
from .sim import DensityMatrix, StateVector
from .tolerances import (
    DPROB_SUM_TOL,
    EIG_TOL,
    HERMITIAN_TOL,
    P_FLOOR,
    PROB_SUM_TOL,
    TRACE_TOL,
)

_QFI_CLAMP = 1e-10  # tiny negative values from roundoff are clamped to zero


def _require_normalized(psi: StateVector) -> None:
    norm_sq = np.vdot(psi.amplitudes, psi.amplitudes).real
    if abs(norm_sq - 1.0) > 1e-10:
        raise NumericValidationError(
            f"state must be normalized; squared norm is {norm_sq!r}"
        )


def qfi_pure(psi: StateVector, dpsi: StateVector) -> float:
    """Quantum information of a pure state from its exact derivative."""
    _require_normalized(psi)
    if psi.n_qubits != dpsi.n_qubits:
        raise ConfigurationError("state and derivative qubit counts differ")
    dd = np.vdot(dpsi.amplitudes, dpsi.amplitudes).real
    overlap = np.vdot(psi.amplitudes, dpsi.amplitudes)
    q = 4.0 * (dd - abs(overlap) ** 2)
    if q < -_QFI_CLAMP:
        raise NumericValidationError(f"information came out negative ({q:.3e})")
    return max(q, 0.0)


def qfi_mixed(rho: DensityMatrix, drho: np.ndarray, eig_tol: float = EIG_TOL) -> float:
    """Quantum information of a mixed state via its eigendecomposition.

    Q = sum over eigenpairs (i, j) with lambda_i + lambda_j > eig_tol of
    2 |<i| drho |j>|^2 / (lambda_i + lambda_j).  Eigenvalue pairs below the
    cutoff carry no information and would otherwise divide by zero.
    """
    d = np.asarray(drho, dtype=complex)
    if d.shape != rho.elements.shape:
        raise ConfigurationError("drho shape does not match rho")
    if np.max(np.abs(d - d.conj().T)) > HERMITIAN_TOL:
        raise NumericValidationError("drho must be Hermitian")
    if abs(np.trace(d)) > TRACE_TOL:
        raise NumericValidationError("drho must be traceless (derivative of unit trace)")

    eigvals, eigvecs = np.linalg.eigh(rho.elements)
    d_eig = eigvecs.conj().T @ d @ eigvecs
    denom = eigvals[:, None] + eigvals[None, :]
    mask = denom > eig_tol
    q = 2.0 * float(np.sum((np.abs(d_eig[mask]) ** 2) / denom[mask]))
    return max(q, 0.0)


def cfi(probs: np.ndarray, dprobs: np.ndarray, p_floor: float = P_FLOOR) -> float:
    """Classical information sum_m (dp_m)^2 / p_m over outcomes above the floor.

    Outcomes with p_m <= p_floor are skipped: for exact derivatives of a
    smooth model, dp_m vanishes at least as fast as sqrt(p_m), so the cutoff
    cannot inflate the result.
    """
    p = np.asarray(probs, dtype=float)
    dp = np.asarray(dprobs, dtype=float)
    if p.shape != dp.shape:
        raise ConfigurationError("probs and dprobs must have the same shape")
    if np.min(p) < -PROB_SUM_TOL:
        raise NumericValidationError(f"negative probability {np.min(p):.3e}")
    if abs(p.sum() - 1.0) > PROB_SUM_TOL:
        raise NumericValidationError(f"probabilities sum to {p.sum()!r}")
    if abs(dp.sum()) > DPROB_SUM_TOL:
        raise NumericValidationError(
            f"derivative of a normalized distribution must sum to ~0, got {dp.sum()!r}"
        )
    mask = p > p_floor
    return float(np.sum(dp[mask] ** 2 / p[mask]))


def crb(nu: int, info: float) -> float:
    """Variance bound 1 / (nu * info) for nu independent repetitions."""
    if not isinstance(nu, (int, np.integer)) or nu < 1:
        raise ConfigurationError(f"repetition count must be a positive integer, got {nu!r}")
    if not np.isfinite(info) or info <= 0.0:
        raise DomainError(f"information must be positive and finite, got {info!r}")
    return 1.0 / (float(nu) * info)


def dprobs_wrt_delta(
    prepared: StateVector, dm: DMInteraction, meas_spec: AnsatzSpec
) -> np.ndarray:
    """Exact d p(m) / d delta for the full prepare-sense-measure pipeline.

    The measurement circuit is linear, so it maps the sensed state's
    derivative to the output state's derivative, and
    dp(m) = 2 Re[ conj(Phi_m) dPhi_m ].
    """
    phi = apply_ansatz(apply_interaction(prepared, dm), meas_spec)
    dphi = apply_ansatz(delta_derivative(prepared, dm), meas_spec)
    return 2.0 * np.real(np.conj(phi.amplitudes) * dphi.amplitudes)


class ReportContext(NamedTuple):
    """Where a Fisher report came from."""

    topology: str
    l1: int
    l2: int | None
    delta: float
    alpha: float
    lam: float = 0.0


@dataclass(frozen=True)
class FisherReport:
    """Information values with their variance bounds for one configuration."""

    qfi: float
    qb: float
    cfi: float | None
    cb: float | None
    context: ReportContext

    def __post_init__(self) -> None:
        if self.cfi is not None and self.cfi > self.qfi + 1e-9:
            raise NumericValidationError(
                f"classical information {self.cfi} exceeds quantum bound {self.qfi}"
            )


def make_report(
    qfi: float, cfi: float | None = None, context: ReportContext | None = None
) -> FisherReport:
    """Bundle information values, using +inf for the bound of a zero probe."""
    qb = 1.0 / qfi if qfi > 0.0 else float("inf")
    cb = None
    if cfi is not None:
        cb = 1.0 / cfi if cfi > 0.0 else float("inf")
    if context is None:
        context = ReportContext("?", 0, None, 0.0, 0.0)
    return FisherReport(qfi=qfi, qb=qb, cfi=cfi, cb=cb, context=context)
