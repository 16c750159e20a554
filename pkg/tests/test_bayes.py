import numpy as np
import numpy.testing as npt
import pytest

from qsn.bayes import (
    Posterior,
    credible_interval,
    estimate,
    likelihood_table,
    make_grid,
    sample_outcomes,
    uniform_posterior,
    update_posterior,
    update_posterior_counts,
    update_posterior_outcomes,
)
from qsn.errors import (
    ConfigurationError,
    DegenerateLikelihoodError,
    NumericValidationError,
)
from qsn.optimize import optimize_measurement, optimize_preparation
from qsn.topology import make_topology

TRIANGLE = make_topology("tri", 3, ((0, 1), (1, 2), (0, 2)))


def _synthetic_table(grid: np.ndarray) -> np.ndarray:
    """Two-outcome likelihood p(1|delta) rising linearly across the grid."""
    p1 = 0.05 + 0.9 * (grid - grid[0]) / (grid[-1] - grid[0])
    return np.column_stack([1.0 - p1, p1])


def test_make_grid_endpoints():
    grid = make_grid(0.0, 0.15, 1001)
    assert grid[0] == 0.0
    assert grid[-1] == pytest.approx(0.15)
    assert grid.size == 1001
    with pytest.raises(ConfigurationError):
        make_grid(0.2, 0.1, 100)
    with pytest.raises(ConfigurationError):
        make_grid(0.0, 0.1, 1)


def test_uniform_posterior_moments():
    post = uniform_posterior(make_grid(0.0, 0.15, 1001))
    report = estimate(post, delta_true=0.075)
    assert report.mean == pytest.approx(0.075)
    # Discrete uniform on n equispaced points: Var = R^2/12 * (n+1)/(n-1).
    assert report.variance == pytest.approx(0.15**2 / 12 * 1002 / 1000, rel=1e-9)
    assert report.bias == pytest.approx(0.0, abs=1e-12)


def test_posterior_validates_weights():
    grid = make_grid(0.0, 1.0, 5)
    with pytest.raises(NumericValidationError):
        Posterior(grid, np.array([0.5, 0.5, 0.5, 0.5, 0.5]), 0)
    with pytest.raises(NumericValidationError):
        Posterior(grid, np.array([0.5, -0.1, 0.2, 0.2, 0.2]), 0)


def test_flat_likelihood_leaves_posterior_unchanged():
    grid = make_grid(0.0, 0.15, 101)
    table = np.full((101, 2), 0.5)
    before = uniform_posterior(grid)
    after = update_posterior(before, 1, table)
    npt.assert_allclose(after.weights, before.weights, atol=1e-15)
    assert after.nu_used == 1


def test_batched_update_equals_sequential():
    grid = make_grid(0.0, 0.15, 101)
    table = _synthetic_table(grid)
    outcomes = [1, 0, 1, 1, 0, 1, 1, 1]
    sequential = uniform_posterior(grid)
    for o in outcomes:
        sequential = update_posterior(sequential, o, table)
    batched = update_posterior_counts(
        uniform_posterior(grid), {0: outcomes.count(0), 1: outcomes.count(1)}, table
    )
    npt.assert_allclose(batched.weights, sequential.weights, atol=1e-12)
    assert batched.nu_used == sequential.nu_used == len(outcomes)


def test_update_order_does_not_matter():
    grid = make_grid(0.0, 0.15, 101)
    table = _synthetic_table(grid)
    a = update_posterior_outcomes(uniform_posterior(grid), np.array([0, 1, 1]), table)
    b = update_posterior_outcomes(uniform_posterior(grid), np.array([1, 1, 0]), table)
    npt.assert_allclose(a.weights, b.weights, atol=1e-15)


def test_posterior_concentrates_near_truth():
    grid = make_grid(0.0, 0.15, 301)
    table = _synthetic_table(grid)
    true_idx = 200
    rng = np.random.default_rng(0)
    draws = rng.choice(2, size=20_000, p=table[true_idx])
    post = update_posterior_outcomes(uniform_posterior(grid), draws, table)
    report = estimate(post, grid[true_idx])
    assert abs(report.bias) < 0.005
    assert post.weights.argmax() == pytest.approx(true_idx, abs=12)


def test_impossible_outcome_raises():
    grid = make_grid(0.0, 0.15, 11)
    table = np.column_stack([np.zeros(11), np.ones(11)])  # outcome 0 never happens
    with pytest.raises(DegenerateLikelihoodError):
        update_posterior(uniform_posterior(grid), 0, table)


def test_update_validates_shapes_and_counts():
    grid = make_grid(0.0, 0.15, 11)
    table = _synthetic_table(grid)
    with pytest.raises(ConfigurationError):
        update_posterior(uniform_posterior(grid), 5, table)  # outcome out of range
    with pytest.raises(ConfigurationError):
        update_posterior_counts(uniform_posterior(grid), {0: -1}, table)
    with pytest.raises(ConfigurationError):
        update_posterior(uniform_posterior(make_grid(0, 1, 7)), 0, table)


def test_sample_outcomes_reproducible():
    probs = np.array([0.25, 0.75])
    a = sample_outcomes(probs, 100, seed=3)
    b = sample_outcomes(probs, 100, seed=3)
    npt.assert_array_equal(a, b)
    assert not np.array_equal(a, sample_outcomes(probs, 100, seed=4))
    assert set(np.unique(a)) <= {0, 1}


def test_sample_outcomes_validates():
    with pytest.raises(ConfigurationError):
        sample_outcomes(np.array([0.5, 0.5]), 0, seed=0)
    with pytest.raises(NumericValidationError):
        sample_outcomes(np.array([0.9, 0.2]), 10, seed=0)


def test_credible_interval_on_uniform():
    post = uniform_posterior(make_grid(0.0, 0.15, 1001))
    lo, hi = credible_interval(post, 0.95)
    assert lo == pytest.approx(0.00375, abs=1e-3)
    assert hi == pytest.approx(0.14625, abs=1e-3)


def test_likelihood_table_rows_are_distributions():
    """End-to-end table from a small optimized pipeline."""
    prep = optimize_preparation(TRIANGLE, 1, 0.05, 0.0, restarts=1, max_iters=150, seed=0)
    meas = optimize_measurement(
        prep.best_params, TRIANGLE, 1, 0.05, 0.0, restarts=1, max_iters=150, seed=0
    )
    grid = make_grid(0.0, 0.15, 21)
    table = likelihood_table(prep.best_params, meas.best_params, TRIANGLE, 1, 1, 0.0, grid)
    assert table.shape == (21, 8)
    npt.assert_allclose(table.sum(axis=1), 1.0, atol=1e-10)
    assert table.min() >= 0.0
