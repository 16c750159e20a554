"""Variational optimization of the preparation and measurement circuits.

Both stages minimize an inverse-information cost with Adam and exact
gradients:

* preparation: C(theta) = 1 / Q(theta), the inverse quantum information of
  the sensed probe;
* measurement: C(mu) = 1 / F(mu), the inverse classical information of the
  outcome distribution, with the probe held fixed.

Adam follows the standard update with bias correction
(beta1 = 0.9, beta2 = 0.999, eps = 1e-8):

    m_t = beta1 m_{t-1} + (1 - beta1) g_t
    v_t = beta2 v_{t-1} + (1 - beta2) g_t^2
    theta <- theta - eta * (m_t / (1 - beta1^t)) / (sqrt(v_t / (1 - beta2^t)) + eps)

Gradients come from exact generator insertion (see ansatz.adjoint_gradient,
which assembles the same quantities as ansatz.derivative_state, factored
into a single reverse sweep) and the chain rule d(1/X) = -dX / X^2.

Runs restart from fresh uniform [0, 2*pi) draws; every restart and the
whole run are deterministic given the seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ansatz import AnsatzSpec, adjoint_gradient, apply_ansatz, param_count
from .errors import (
    ConfigurationError,
    DegenerateProbeError,
    OptimizationFailure,
)
from .interaction import DMInteraction, generator_sum_apply
from .io_utils import atomic_write_json
from .pipeline import measurement_spec, prepare, probe_qfi, sense
from .sim import StateVector, init_ground
from .tolerances import CONVERGENCE_TOL, CONVERGENCE_WINDOW, P_FLOOR, Q_FLOOR
from .topology import Topology

DEFAULT_ETA = 0.01
DEFAULT_RESTARTS = 5
DEFAULT_MAX_ITERS = 2000

# Sub-stream tags so preparation and measurement restarts never share draws.
_STREAM_PREP = 0
_STREAM_MEAS = 1


@dataclass(frozen=True)
class AdamState:
    """First/second moment accumulators of the Adam optimizer."""

    m: np.ndarray
    v: np.ndarray
    t: int
    eta: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def fresh(cls, dim: int, eta: float = DEFAULT_ETA) -> "AdamState":
        return cls(m=np.zeros(dim), v=np.zeros(dim), t=0, eta=eta)


def adam_step(
    state: AdamState, params: np.ndarray, grad: np.ndarray
) -> tuple[AdamState, np.ndarray]:
    """One bias-corrected Adam update; purely functional."""
    params = np.asarray(params, dtype=float)
    grad = np.asarray(grad, dtype=float)
    if params.shape != grad.shape or params.shape != state.m.shape:
        raise ConfigurationError("params, grad, and Adam moments must share a shape")
    t = state.t + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * grad
    v = state.beta2 * state.v + (1.0 - state.beta2) * grad * grad
    m_hat = m / (1.0 - state.beta1**t)
    v_hat = v / (1.0 - state.beta2**t)
    new_params = params - state.eta * m_hat / (np.sqrt(v_hat) + state.eps)
    new_state = AdamState(
        m=m, v=v, t=t, eta=state.eta, beta1=state.beta1, beta2=state.beta2, eps=state.eps
    )
    return new_state, new_params


# ---------------------------------------------------------------------------
# Costs and exact gradients.
# ---------------------------------------------------------------------------

def cost_theta(spec: AnsatzSpec, dm: DMInteraction) -> float:
    """Inverse quantum information of the probe prepared by ``spec``."""
    prepared = prepare(spec.topology, spec.layers, spec.params)
    q = probe_qfi(prepared, dm)
    if q <= Q_FLOOR:
        raise DegenerateProbeError(f"probe information {q:.3e} is below the floor")
    return 1.0 / q


def _theta_value_and_grad(spec: AnsatzSpec, dm: DMInteraction) -> tuple[float, np.ndarray]:
    n = spec.topology.n_qubits
    prepared = prepare(spec.topology, spec.layers, spec.params)
    q = probe_qfi(prepared, dm)
    if q <= Q_FLOOR:
        raise DegenerateProbeError(f"probe information {q:.3e} is below the floor")

    # The drive commutes with its generator sum G, so with |u> = U(theta)|0>:
    # Q = 4(<u|G^2|u> - <u|G|u>^2) and dQ/dtheta_k = 2 Re <d_k u | y> with
    # y = 4 G^2 |u> - 8 <u|G|u> G |u>.
    w1 = generator_sum_apply(prepared, dm.alpha)
    w2 = generator_sum_apply(StateVector(n, w1), dm.alpha)
    b = np.vdot(prepared.amplitudes, w1).real
    y = 4.0 * w2 - 8.0 * b * w1
    grad_q = adjoint_gradient(spec, init_ground(n), y)
    return 1.0 / q, -grad_q / (q * q)


def grad_cost_theta(spec: AnsatzSpec, dm: DMInteraction) -> np.ndarray:
    """Exact gradient of 1/Q with respect to every circuit parameter."""
    return _theta_value_and_grad(spec, dm)[1]


def _measured_info(
    meas: AnsatzSpec, psi: StateVector, dpsi: StateVector
) -> tuple[float, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Classical information of the measured probe plus its ingredients."""
    phi = apply_ansatz(psi, meas).amplitudes
    dphi = apply_ansatz(dpsi, meas).amplitudes
    p = np.abs(phi) ** 2
    d = 2.0 * np.real(np.conj(phi) * dphi)
    mask = p > P_FLOOR
    f = float(np.sum(d[mask] ** 2 / p[mask]))
    if f <= Q_FLOOR:
        raise DegenerateProbeError(f"measurement information {f:.3e} is below the floor")
    return f, phi, dphi, p, d


def _mu_value_and_grad(
    meas: AnsatzSpec, psi: StateVector, dpsi: StateVector
) -> tuple[float, np.ndarray]:
    """Cost 1/F and its exact mu-gradient for a fixed sensed probe."""
    f, phi, dphi, p, d = _measured_info(meas, psi, dpsi)
    mask = p > P_FLOOR

    # Cogradients y = dF/d(conj(Phi)) for the two circuit outputs.
    y_phi = np.zeros_like(phi)
    y_dphi = np.zeros_like(phi)
    ratio = d[mask] / p[mask]
    y_phi[mask] = 2.0 * ratio * dphi[mask] - ratio**2 * phi[mask]
    y_dphi[mask] = 2.0 * ratio * phi[mask]
    grad_f = adjoint_gradient(meas, psi, y_phi) + adjoint_gradient(meas, dpsi, y_dphi)
    return 1.0 / f, -grad_f / (f * f)


def cost_mu(meas: AnsatzSpec, psi: StateVector, dpsi: StateVector) -> float:
    """Inverse classical information of measuring the sensed probe with ``meas``."""
    return 1.0 / _measured_info(meas, psi, dpsi)[0]


def grad_cost_mu(meas: AnsatzSpec, psi: StateVector, dpsi: StateVector) -> np.ndarray:
    """Exact gradient of 1/F with respect to every measurement parameter."""
    return _mu_value_and_grad(meas, psi, dpsi)[1]


# ---------------------------------------------------------------------------
# The Adam driver, checkpointing, and restart orchestration.
# ---------------------------------------------------------------------------

@dataclass
class Checkpoint:
    """Everything needed to continue an Adam run bit-for-bit."""

    params: np.ndarray
    adam: AdamState
    best_params: np.ndarray
    best_cost: float
    trace: list[tuple[int, float]]
    rng_state: dict | None = None
    restart: int = 0


@dataclass
class AdamRun:
    params: np.ndarray
    adam: AdamState
    best_params: np.ndarray
    best_cost: float
    trace: list[tuple[int, float]]
    converged: bool


@dataclass
class OptimizationResult:
    """Outcome of a multi-restart optimization."""

    best_params: np.ndarray
    best_cost: float
    cost_trace: list[tuple[int, float]]
    restarts_used: int
    seed: int
    restart_best_costs: list[float] = field(default_factory=list)

    @property
    def best_information(self) -> float:
        return 1.0 / self.best_cost


def minimize_adam(
    value_and_grad,
    params0: np.ndarray,
    eta: float = DEFAULT_ETA,
    max_iters: int = DEFAULT_MAX_ITERS,
    window: int = CONVERGENCE_WINDOW,
    tol: float = CONVERGENCE_TOL,
    resume_from: Checkpoint | None = None,
) -> AdamRun:
    """Minimize with Adam until the cost window flattens or iterations run out.

    ``max_iters`` counts total evaluations including any consumed before a
    checkpoint, so resuming never extends the overall budget.
    """
    if resume_from is not None:
        params = np.array(resume_from.params, dtype=float)
        state = resume_from.adam
        trace = list(resume_from.trace)
        best_cost = resume_from.best_cost
        best_params = np.array(resume_from.best_params, dtype=float)
    else:
        params = np.array(params0, dtype=float)
        state = AdamState.fresh(params.size, eta)
        trace = []
        best_cost = np.inf
        best_params = params.copy()

    converged = False
    while state.t < max_iters:
        cost, grad = value_and_grad(params)
        trace.append((state.t, float(cost)))
        if cost < best_cost:
            best_cost = float(cost)
            best_params = params.copy()
        recent = [c for _, c in trace[-window:]]
        if len(recent) == window and max(recent) - min(recent) < tol:
            converged = True
            break
        state, params = adam_step(state, params, grad)
    return AdamRun(params, state, best_params, best_cost, trace, converged)


def save_checkpoint(path: str | Path, checkpoint: Checkpoint) -> None:
    payload = {
        "params": checkpoint.params.tolist(),
        "adam": {
            "m": checkpoint.adam.m.tolist(),
            "v": checkpoint.adam.v.tolist(),
            "t": checkpoint.adam.t,
            "eta": checkpoint.adam.eta,
            "beta1": checkpoint.adam.beta1,
            "beta2": checkpoint.adam.beta2,
            "eps": checkpoint.adam.eps,
        },
        "best_params": checkpoint.best_params.tolist(),
        "best_cost": checkpoint.best_cost,
        "trace": [[t, c] for t, c in checkpoint.trace],
        "rng_state": checkpoint.rng_state,
        "restart": checkpoint.restart,
    }
    atomic_write_json(path, payload)


def load_checkpoint(path: str | Path) -> Checkpoint:
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot load checkpoint {path}: {exc}") from exc
    adam = payload["adam"]
    return Checkpoint(
        params=np.array(payload["params"], dtype=float),
        adam=AdamState(
            m=np.array(adam["m"], dtype=float),
            v=np.array(adam["v"], dtype=float),
            t=int(adam["t"]),
            eta=float(adam["eta"]),
            beta1=float(adam["beta1"]),
            beta2=float(adam["beta2"]),
            eps=float(adam["eps"]),
        ),
        best_params=np.array(payload["best_params"], dtype=float),
        best_cost=float(payload["best_cost"]),
        trace=[(int(t), float(c)) for t, c in payload["trace"]],
        rng_state=payload.get("rng_state"),
        restart=int(payload.get("restart", 0)),
    )


def _run_restarts(
    value_and_grad,
    dim: int,
    stream: int,
    restarts: int,
    max_iters: int,
    seed: int,
    eta: float,
    checkpoint_path: str | Path | None,
    init_scale: float | None = None,
) -> OptimizationResult:
    best_run: AdamRun | None = None
    restart_best: list[float] = []
    survivors = 0
    for r in range(restarts):
        rng = np.random.default_rng((seed, r, stream))
        if init_scale is None:
            params0 = rng.uniform(0.0, 2.0 * np.pi, dim)
        else:
            params0 = rng.uniform(-init_scale, init_scale, dim)
        try:
            run = minimize_adam(value_and_grad, params0, eta=eta, max_iters=max_iters)
        except DegenerateProbeError:
            restart_best.append(np.inf)
            continue
        survivors += 1
        restart_best.append(run.best_cost)
        if best_run is None or run.best_cost < best_run.best_cost:
            best_run = run
        if checkpoint_path is not None:
            save_checkpoint(
                checkpoint_path,
                Checkpoint(
                    params=run.params,
                    adam=run.adam,
                    best_params=best_run.best_params,
                    best_cost=best_run.best_cost,
                    trace=run.trace,
                    rng_state=rng.bit_generator.state,
                    restart=r,
                ),
            )
    if best_run is None:
        raise OptimizationFailure(f"all {restarts} restarts ended degenerate")
    return OptimizationResult(
        best_params=best_run.best_params,
        best_cost=best_run.best_cost,
        cost_trace=best_run.trace,
        restarts_used=survivors,
        seed=seed,
        restart_best_costs=restart_best,
    )


def optimize_preparation(
    topology: Topology,
    layers: int,
    delta0: float,
    alpha0: float,
    restarts: int = DEFAULT_RESTARTS,
    max_iters: int = DEFAULT_MAX_ITERS,
    seed: int = 0,
    eta: float = DEFAULT_ETA,
    checkpoint_path: str | Path | None = None,
    init_scale: float | None = None,
) -> OptimizationResult:
    """Find preparation parameters maximizing the probe's quantum information.

    Restarts draw initial parameters uniformly from [0, 2pi).  For deep
    circuits that tends to land in poor local basins; passing ``init_scale``
    switches to uniform draws from [-init_scale, init_scale], i.e. a circuit
    near the identity (consecutive CZ layers cancel there), which empirically
    finds the ceiling where full-range starts stall.
    """
    if restarts < 1:
        raise ConfigurationError("need at least one restart")
    dm = DMInteraction(delta0, alpha0)
    dim = param_count(topology, layers)

    def value_and_grad(params: np.ndarray) -> tuple[float, np.ndarray]:
        return _theta_value_and_grad(AnsatzSpec(topology, layers, params), dm)

    return _run_restarts(
        value_and_grad,
        dim,
        _STREAM_PREP,
        restarts,
        max_iters,
        seed,
        eta,
        checkpoint_path,
        init_scale=init_scale,
    )


def refine_preparation(
    theta0: np.ndarray,
    topology: Topology,
    delta0: float,
    alpha0: float,
    max_iters: int = 4000,
    eta: float = 1e-3,
) -> AdamRun:
    """Polish an already-optimized preparation with a small fixed step size.

    The plateau rule in :func:`minimize_adam` stops once the cost window
    flattens to 1e-10, which leaves a residual of order 1e-7 in the
    information itself.  A short warm-started run at a reduced step grinds
    that residual down several more orders of magnitude; useful when two
    separately optimized configurations must agree to tight tolerance.
    The polish never runs the plateau rule (tol=0), so it always spends
    ``max_iters`` evaluations.
    """
    theta0 = np.asarray(theta0, dtype=float)
    layers = infer_layers(topology, theta0.size)
    dm = DMInteraction(delta0, alpha0)

    def value_and_grad(params: np.ndarray) -> tuple[float, np.ndarray]:
        return _theta_value_and_grad(AnsatzSpec(topology, layers, params), dm)

    return minimize_adam(value_and_grad, theta0, eta=eta, max_iters=max_iters, tol=0.0)


def infer_layers(topology: Topology, n_params: int) -> int:
    """Recover the layer count of a parameter vector for a given topology."""
    base = 3 * topology.n_qubits
    if n_params == base:
        return 0
    per_layer = 6 * topology.n_edges
    if per_layer == 0 or (n_params - base) % per_layer != 0 or n_params < base:
        raise ConfigurationError(
            f"{n_params} parameters do not fit topology {topology.name!r} "
            f"(3N = {base}, per-layer = {per_layer})"
        )
    return (n_params - base) // per_layer


def optimize_measurement(
    theta_star: np.ndarray,
    topology: Topology,
    layers_meas: int,
    delta0: float,
    alpha0: float,
    restarts: int = DEFAULT_RESTARTS,
    max_iters: int = DEFAULT_MAX_ITERS,
    seed: int = 0,
    eta: float = DEFAULT_ETA,
    checkpoint_path: str | Path | None = None,
) -> OptimizationResult:
    """Find measurement parameters maximizing the classical information.

    The probe is fixed: ``theta_star`` (whose layer count is inferred from
    its length) prepares it, the drive at (delta0, alpha0) senses it, and
    only the daggered measurement circuit with ``layers_meas`` layers is
    optimized.
    """
    if restarts < 1:
        raise ConfigurationError("need at least one restart")
    theta_star = np.asarray(theta_star, dtype=float)
    layers_prep = infer_layers(topology, theta_star.size)
    dm = DMInteraction(delta0, alpha0)
    prepared = prepare(topology, layers_prep, theta_star)
    psi, dpsi = sense(prepared, dm)
    dim = param_count(topology, layers_meas)

    def value_and_grad(params: np.ndarray) -> tuple[float, np.ndarray]:
        return _mu_value_and_grad(measurement_spec(topology, layers_meas, params), psi, dpsi)

    return _run_restarts(
        value_and_grad, dim, _STREAM_MEAS, restarts, max_iters, seed, eta, checkpoint_path
    )
