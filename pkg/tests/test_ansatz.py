import numpy as np
import numpy.testing as npt
import pytest
from scipy.linalg import expm

import helpers
from qsn.ansatz import (
    AnsatzSpec,
    adjoint_gradient,
    apply_ansatz,
    derivative_state,
    excited_state,
    ghz_state,
    optimal_state,
    param_count,
    rotation_matrix,
)
from qsn.errors import ConfigurationError
from qsn.sim import PAULI_X, PAULI_Y, PAULI_Z, init_ground
from qsn.topology import builtin, make_topology

RNG = np.random.default_rng(7)
TRIANGLE = make_topology("tri", 3, ((0, 1), (1, 2), (0, 2)))


def test_param_count_formula():
    assert param_count(builtin("F4"), 1) == 3 * 4 + 6 * 6
    assert param_count(builtin("F4"), 0) == 12
    assert param_count(builtin("GHZ4"), 3) == 12  # no edges, layers are free
    assert param_count(builtin("F9"), 2) == 27 + 2 * 6 * 36


def test_spec_rejects_wrong_length_and_nan():
    with pytest.raises(ConfigurationError):
        AnsatzSpec(TRIANGLE, 1, np.zeros(5))
    bad = np.zeros(param_count(TRIANGLE, 1))
    bad[0] = np.inf
    with pytest.raises(ConfigurationError):
        AnsatzSpec(TRIANGLE, 1, bad)


@pytest.mark.parametrize("axis, sigma", [(0, PAULI_X), (1, PAULI_Y), (2, PAULI_Z)])
def test_rotation_matrix_is_matrix_exponential(axis, sigma):
    for angle in (0.0, 0.3, -1.7, np.pi):
        npt.assert_allclose(
            rotation_matrix(axis, angle), expm(-0.5j * angle * sigma), atol=1e-12
        )


def test_initial_block_order_is_rx_first():
    """The per-qubit block must act as Rz Ry Rx on a single qubit."""
    topo = make_topology("one", 1, ())
    params = np.array([0.4, -0.9, 1.3])  # (x, y, z) slots
    state = apply_ansatz(init_ground(1), AnsatzSpec(topo, 0, params))
    want = (
        rotation_matrix(2, 1.3) @ rotation_matrix(1, -0.9) @ rotation_matrix(0, 0.4)
    ) @ np.array([1.0, 0.0], dtype=complex)
    npt.assert_allclose(state.amplitudes, want, atol=1e-14)


def test_apply_ansatz_preserves_norm():
    params = RNG.uniform(0, 2 * np.pi, param_count(TRIANGLE, 2))
    state = apply_ansatz(init_ground(3), AnsatzSpec(TRIANGLE, 2, params))
    npt.assert_allclose(np.linalg.norm(state.amplitudes), 1.0, atol=1e-12)


def test_daggered_spec_inverts_the_circuit():
    params = RNG.uniform(0, 2 * np.pi, param_count(TRIANGLE, 2))
    forward = apply_ansatz(init_ground(3), AnsatzSpec(TRIANGLE, 2, params))
    back = apply_ansatz(forward, AnsatzSpec(TRIANGLE, 2, params, daggered=True))
    expected = np.zeros(8, dtype=complex)
    expected[0] = 1.0
    npt.assert_allclose(back.amplitudes, expected, atol=1e-12)


@pytest.mark.parametrize("daggered", [False, True])
def test_derivative_state_matches_finite_differences(daggered):
    params = RNG.uniform(0, 2 * np.pi, param_count(TRIANGLE, 1))
    start = helpers.random_state(3, RNG)
    for k in (0, 4, params.size - 1):

        def state_at(x):
            shifted = params.copy()
            shifted[k] = x
            spec = AnsatzSpec(TRIANGLE, 1, shifted, daggered=daggered)
            return apply_ansatz(start, spec).amplitudes

        spec = AnsatzSpec(TRIANGLE, 1, params, daggered=daggered)
        got = derivative_state(start, spec, k).amplitudes
        want = helpers.central_difference(state_at, params[k])
        npt.assert_allclose(got, want, atol=1e-8)


def test_adjoint_gradient_matches_generator_insertion():
    """The O(P) reverse sweep must equal assembling 2 Re <d_k Phi | y> per slot."""
    params = RNG.uniform(0, 2 * np.pi, param_count(TRIANGLE, 2))
    spec = AnsatzSpec(TRIANGLE, 2, params)
    start = helpers.random_state(3, RNG)
    cograd = RNG.normal(size=8) + 1j * RNG.normal(size=8)
    fast = adjoint_gradient(spec, start, cograd)
    slow = np.array(
        [
            2.0 * np.vdot(derivative_state(start, spec, k).amplitudes, cograd).real
            for k in range(params.size)
        ]
    )
    npt.assert_allclose(fast, slow, atol=1e-11)


def test_ghz_state_amplitudes():
    state = ghz_state(3)
    expected = np.zeros(8, dtype=complex)
    expected[0] = expected[7] = 1 / np.sqrt(2)
    npt.assert_allclose(state.amplitudes, expected)


def test_excited_state_is_last_basis_vector():
    state = excited_state(2)
    npt.assert_allclose(state.amplitudes, [0, 0, 0, 1])


def test_optimal_state_two_qubits_reduces_to_ghz():
    """Superposing the two extreme product states at alpha=0 gives GHZ-like form."""
    state = optimal_state(2, 0.0)
    npt.assert_allclose(state.amplitudes, [1 / np.sqrt(2), 0, 0, 1 / np.sqrt(2)], atol=1e-12)


def test_optimal_state_normalized_for_odd_alpha():
    state = optimal_state(3, 1.234)
    npt.assert_allclose(np.linalg.norm(state.amplitudes), 1.0, atol=1e-12)
