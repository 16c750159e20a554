import numpy as np
import numpy.testing as npt
import pytest
from scipy.linalg import expm

import helpers
from qsn.errors import ConfigurationError
from qsn.interaction import (
    DMInteraction,
    apply_interaction,
    delta_derivative,
    dm_unitary,
    generator,
    individual_baseline,
    individual_baseline_exact,
)
from qsn.pipeline import probe_qfi
from qsn.sim import PAULI_X, PAULI_Y

RNG = np.random.default_rng(99)


def test_drive_unitary_is_generator_exponential():
    for delta, alpha in [(0.05, 0.0), (0.3, 1.1), (1.0, -2.4), (2.0, np.pi)]:
        npt.assert_allclose(
            dm_unitary(delta, alpha),
            expm(1j * delta * generator(alpha)),
            atol=1e-12,
        )


def test_drive_unitary_limits():
    npt.assert_allclose(dm_unitary(0.0, 0.7), np.eye(2), atol=1e-15)
    want = np.cos(0.4) * np.eye(2) + 1j * np.sin(0.4) * PAULI_X
    npt.assert_allclose(dm_unitary(0.4, 0.0), want, atol=1e-14)


def test_generator_interpolates_pauli_axes():
    npt.assert_allclose(generator(0.0), PAULI_X)
    npt.assert_allclose(generator(np.pi / 2), PAULI_Y, atol=1e-15)
    for alpha in (0.0, 0.9, 2.2):
        npt.assert_allclose(generator(alpha) @ generator(alpha), np.eye(2), atol=1e-14)


def test_interaction_rejects_nonfinite_phase():
    with pytest.raises(ConfigurationError):
        DMInteraction(np.nan, 0.0)


def test_apply_interaction_matches_kron_product():
    state = helpers.random_state(3, RNG)
    dm = DMInteraction(0.21, 0.8)
    got = apply_interaction(state, dm)
    u = dm_unitary(0.21, 0.8)
    full = (
        helpers.embed_1q(u, 3, 0)
        @ helpers.embed_1q(u, 3, 1)
        @ helpers.embed_1q(u, 3, 2)
    )
    npt.assert_allclose(got.amplitudes, full @ state.amplitudes, atol=1e-12)


def test_delta_derivative_matches_finite_differences():
    state = helpers.random_state(2, RNG)
    alpha = 0.37

    def evolved(d):
        return apply_interaction(state, DMInteraction(d, alpha)).amplitudes

    got = delta_derivative(state, DMInteraction(0.6, alpha)).amplitudes
    want = helpers.central_difference(evolved, 0.6)
    npt.assert_allclose(got, want, atol=1e-9)


def test_information_is_independent_of_delta():
    """The drive commutes with its generator, so delta drops out of the QFI."""
    state = helpers.random_state(3, RNG)
    values = [probe_qfi(state, DMInteraction(d, 0.5)) for d in (1e-3, 1e-1, 1.0)]
    npt.assert_allclose(values, values[0], rtol=1e-12)


def test_individual_baselines():
    assert individual_baseline(7, 0.05) == pytest.approx(7 * 0.05**2)
    assert individual_baseline_exact(7, 0.05) == pytest.approx(7 * np.sin(0.05) ** 2)
    # they agree to second order in delta
    assert individual_baseline(3, 1e-4) == pytest.approx(
        individual_baseline_exact(3, 1e-4), rel=1e-7
    )
