"""Brute-force oracles used across the test modules.

Everything here is deliberately slow and obvious: full Kronecker products,
dense linear solves, central finite differences.  The library must agree
with these on small systems.
"""

from __future__ import annotations

import numpy as np

from qsn.interaction import generator
from qsn.sim import IDENTITY_2, StateVector
from qsn.topology import Topology, make_topology


def embed_1q(u: np.ndarray, n_qubits: int, qubit: int) -> np.ndarray:
    """Full 2^n operator for a single-qubit gate; qubit 0 is the leftmost factor."""
    factors = [IDENTITY_2] * n_qubits
    factors[qubit] = u
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def cz_full(n_qubits: int, i: int, j: int) -> np.ndarray:
    dim = 1 << n_qubits
    diag = np.ones(dim)
    for idx in range(dim):
        bit_i = (idx >> (n_qubits - 1 - i)) & 1
        bit_j = (idx >> (n_qubits - 1 - j)) & 1
        if bit_i and bit_j:
            diag[idx] = -1.0
    return np.diag(diag)


def generator_sum_full(n_qubits: int, alpha: float) -> np.ndarray:
    g = generator(alpha)
    total = np.zeros((1 << n_qubits, 1 << n_qubits), dtype=complex)
    for q in range(n_qubits):
        total += embed_1q(g, n_qubits, q)
    return total


def variance_qfi(state: StateVector, alpha: float) -> float:
    """4 * Var(sum of per-qubit generators) — exact QFI for this drive."""
    big_g = generator_sum_full(state.n_qubits, alpha)
    amps = state.amplitudes
    mean = np.vdot(amps, big_g @ amps).real
    second = np.vdot(amps, big_g @ big_g @ amps).real
    return 4.0 * (second - mean**2)


def sld_qfi(rho: np.ndarray, drho: np.ndarray) -> float:
    """Mixed-state QFI by solving the SLD equation as a dense linear system.

    Vectorizing L rho + rho L = 2 drho gives
    (I kron rho + rho^T kron I) vec(L) = 2 vec(drho); the QFI is tr(rho L^2).
    Uses a least-squares solve so rank-deficient (pure) states work too.
    """
    dim = rho.shape[0]
    eye = np.eye(dim)
    a = np.kron(eye, rho) + np.kron(rho.T, eye)
    # The kron identity above assumes column-stacked vec, hence order="F".
    vec_l, *_ = np.linalg.lstsq(a, 2.0 * drho.reshape(-1, order="F"), rcond=None)
    sld = vec_l.reshape(dim, dim, order="F")
    return float(np.trace(rho @ sld @ sld).real)


def central_difference(fn, x: float, h: float = 1e-6):
    return (np.asarray(fn(x + h)) - np.asarray(fn(x - h))) / (2.0 * h)


def grad_by_fd(cost, params: np.ndarray, h: float = 1e-6) -> np.ndarray:
    grad = np.empty(params.size)
    for k in range(params.size):
        step = np.zeros_like(params)
        step[k] = h
        grad[k] = (cost(params + step) - cost(params - step)) / (2.0 * h)
    return grad


def random_state(n_qubits: int, rng: np.random.Generator) -> StateVector:
    amps = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    return StateVector(n_qubits, amps / np.linalg.norm(amps))


def random_density(n_qubits: int, rng: np.random.Generator, rank: int = 3) -> np.ndarray:
    dim = 1 << n_qubits
    a = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_topology(n_qubits: int, rng: np.random.Generator, max_edges: int = 5) -> Topology:
    pairs = [(i, j) for i in range(n_qubits) for j in range(i + 1, n_qubits)]
    count = int(rng.integers(1, min(max_edges, len(pairs)) + 1))
    chosen = rng.choice(len(pairs), size=count, replace=False)
    return make_topology("RND", n_qubits, tuple(pairs[k] for k in chosen))


def reference_adam(grads: list[np.ndarray], x0: np.ndarray, eta: float) -> np.ndarray:
    """Textbook Adam with bias correction, independent of the library."""
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    x = x0.astype(float).copy()
    m = np.zeros_like(x)
    v = np.zeros_like(x)
    for t, g in enumerate(grads, start=1):
        m = beta1 * m + (1 - beta1) * g
        v = beta2 * v + (1 - beta2) * g * g
        m_hat = m / (1 - beta1**t)
        v_hat = v / (1 - beta2**t)
        x = x - eta * m_hat / (np.sqrt(v_hat) + eps)
    return x
