"""Grid-based Bayesian estimation of the sensed phase.

The posterior lives on a uniform grid of candidate phases.  Likelihoods of
observed measurement outcomes multiply a (by default uniform) prior; weight
accumulation happens in log space so that runs with 1e5 updates cannot
underflow.  Outcomes repeated within a batch are merged exactly through
likelihood powers (count * log p), which is order-independent.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ConfigurationError, DegenerateLikelihoodError, NumericValidationError
from .interaction import DMInteraction
from .pipeline import measurement_spec, outcome_probs, prepare
from .tolerances import PROB_SUM_TOL
from .topology import Topology

DEFAULT_GRID_MIN = 0.0
DEFAULT_GRID_MAX = 0.15
DEFAULT_GRID_POINTS = 1001

_SAMPLER_STREAM = 2  # keeps outcome sampling off the optimizer seed streams


def make_grid(
    lo: float = DEFAULT_GRID_MIN,
    hi: float = DEFAULT_GRID_MAX,
    points: int = DEFAULT_GRID_POINTS,
) -> np.ndarray:
    if not (np.isfinite(lo) and np.isfinite(hi)) or hi <= lo:
        raise ConfigurationError(f"bad grid range [{lo}, {hi}]")
    if points < 2:
        raise ConfigurationError("grid needs at least two points")
    return np.linspace(lo, hi, points)


@dataclass(frozen=True)
class Posterior:
    """Normalized weights over a strictly increasing phase grid."""

    grid: np.ndarray
    weights: np.ndarray
    nu_used: int = 0

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if grid.ndim != 1 or grid.shape != weights.shape:
            raise ConfigurationError("grid and weights must be 1-D and congruent")
        if np.any(np.diff(grid) <= 0.0):
            raise ConfigurationError("grid must be strictly increasing")
        if np.min(weights) < 0.0:
            raise NumericValidationError("posterior weights must be non-negative")
        total = weights.sum()
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise NumericValidationError(f"posterior weights sum to {total!r}")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "weights", weights)


@dataclass(frozen=True)
class EstimateReport:
    """Posterior summary against a known true phase."""

    mean: float
    variance: float
    bias: float
    nu: int


def uniform_posterior(grid: np.ndarray) -> Posterior:
    grid = np.asarray(grid, dtype=float)
    return Posterior(grid, np.full(grid.shape, 1.0 / grid.size), nu_used=0)


def likelihood_table(
    theta_star: np.ndarray,
    mu_star: np.ndarray,
    topology: Topology,
    layers_prep: int,
    layers_meas: int,
    alpha: float,
    grid: np.ndarray,
) -> np.ndarray:
    """Outcome distributions p(m | delta) for every grid phase.

    Returns a (grid points) x (2^N) matrix whose rows are the pipeline's
    exact outcome probabilities with the preparation and measurement
    parameters held fixed.
    """
    grid = np.asarray(grid, dtype=float)
    prepared = prepare(topology, layers_prep, theta_star)
    meas = measurement_spec(topology, layers_meas, mu_star)
    table = np.empty((grid.size, 1 << topology.n_qubits))
    for g, delta in enumerate(grid):
        table[g] = outcome_probs(prepared, DMInteraction(delta, alpha), meas)
    return table


def sample_outcomes(probs: np.ndarray, nu: int, seed: int) -> np.ndarray:
    """Draw nu outcome indices from one outcome distribution, reproducibly."""
    if nu < 1:
        raise ConfigurationError(f"sample count must be >= 1, got {nu}")
    p = np.asarray(probs, dtype=float)
    if np.min(p) < -PROB_SUM_TOL or abs(p.sum() - 1.0) > PROB_SUM_TOL:
        raise NumericValidationError("not a probability vector")
    p = np.clip(p, 0.0, None)
    rng = np.random.default_rng((seed, _SAMPLER_STREAM))
    return rng.choice(p.size, size=nu, p=p / p.sum())


def _posterior_from_log(grid: np.ndarray, log_w: np.ndarray, nu_used: int) -> Posterior:
    peak = np.max(log_w)
    if not np.isfinite(peak):
        raise DegenerateLikelihoodError("all grid points have zero likelihood")
    w = np.exp(log_w - peak)
    return Posterior(grid, w / w.sum(), nu_used=nu_used)


def _log_weights(post: Posterior) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(post.weights)


def update_posterior(post: Posterior, outcome: int, table: np.ndarray) -> Posterior:
    """Condition the posterior on a single observed outcome."""
    if not 0 <= outcome < table.shape[1]:
        raise ConfigurationError(f"outcome {outcome} out of range")
    if table.shape[0] != post.grid.size:
        raise ConfigurationError("likelihood table does not match the grid")
    with np.errstate(divide="ignore"):
        log_w = _log_weights(post) + np.log(table[:, outcome])
    return _posterior_from_log(post.grid, log_w, post.nu_used + 1)


def update_posterior_counts(
    post: Posterior, counts: Mapping[int, int], table: np.ndarray
) -> Posterior:
    """Condition on a batch of outcomes given as outcome -> count.

    Exactly equivalent to applying ``update_posterior`` once per draw, in
    any order, but costs one pass per distinct outcome.
    """
    if table.shape[0] != post.grid.size:
        raise ConfigurationError("likelihood table does not match the grid")
    log_w = _log_weights(post)
    total = 0
    for outcome, count in counts.items():
        if count < 0:
            raise ConfigurationError("outcome counts must be non-negative")
        if count == 0:
            continue
        if not 0 <= outcome < table.shape[1]:
            raise ConfigurationError(f"outcome {outcome} out of range")
        with np.errstate(divide="ignore"):
            log_w = log_w + count * np.log(table[:, outcome])
        total += count
    return _posterior_from_log(post.grid, log_w, post.nu_used + total)


def update_posterior_outcomes(
    post: Posterior, outcomes: np.ndarray, table: np.ndarray
) -> Posterior:
    """Condition on an array of raw outcome draws (batched internally)."""
    return update_posterior_counts(post, Counter(int(o) for o in outcomes), table)


def estimate(post: Posterior, delta_true: float) -> EstimateReport:
    """Posterior mean/variance and the bias against the true phase."""
    mean = float(np.dot(post.weights, post.grid))
    variance = float(np.dot(post.weights, (post.grid - mean) ** 2))
    return EstimateReport(
        mean=mean,
        variance=max(variance, 0.0),
        bias=mean - float(delta_true),
        nu=post.nu_used,
    )


def credible_interval(post: Posterior, level: float = 0.95) -> tuple[float, float]:
    """Central credible interval from the discrete posterior."""
    if not 0.0 < level < 1.0:
        raise ConfigurationError("credibility level must be in (0, 1)")
    tail = (1.0 - level) / 2.0
    cdf = np.cumsum(post.weights)
    lo = post.grid[int(np.searchsorted(cdf, tail))]
    hi = post.grid[min(int(np.searchsorted(cdf, 1.0 - tail)), post.grid.size - 1)]
    return float(lo), float(hi)
