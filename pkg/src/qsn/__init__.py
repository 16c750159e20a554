"""qsn: simulation and variational optimization of networked quantum sensors.

The package prepares an entangled probe over a sensor network with a
layered circuit, senses a weak global drive, measures with a second
(daggered) circuit, and quantifies performance through quantum/classical
information and the resulting phase-variance bounds.  Includes Adam-based
optimization of both circuits, grid-Bayesian phase estimation, and
dephasing robustness sweeps.
"""

from .ansatz import (
    AnsatzSpec,
    apply_ansatz,
    derivative_state,
    excited_state,
    ghz_state,
    optimal_state,
    param_count,
)
from .bayes import (
    EstimateReport,
    Posterior,
    estimate,
    likelihood_table,
    make_grid,
    sample_outcomes,
    uniform_posterior,
    update_posterior,
    update_posterior_counts,
)
from .errors import (
    ConfigurationError,
    DegenerateLikelihoodError,
    DegenerateProbeError,
    DomainError,
    NumericValidationError,
    OptimizationFailure,
    QsnError,
)
from .fisher import FisherReport, cfi, crb, dprobs_wrt_delta, qfi_mixed, qfi_pure
from .interaction import (
    DMInteraction,
    apply_interaction,
    delta_derivative,
    dm_unitary,
    generator,
    individual_baseline,
    individual_baseline_exact,
)
from .noise import DephasingSweep, dephasing_kraus, dephasing_sweep, qb_under_noise
from .optimize import (
    AdamState,
    OptimizationResult,
    adam_step,
    optimize_measurement,
    optimize_preparation,
    refine_preparation,
)
from .sim import (
    DensityMatrix,
    KrausSet,
    StateVector,
    apply_1q,
    apply_channel,
    apply_cz,
    basis_probabilities,
    init_ground,
    to_density,
)
from .topology import BUILTIN_NAMES, Topology, builtin, load_topology, make_topology, validate

__version__ = "0.1.0"

__all__ = [
    "AnsatzSpec",
    "AdamState",
    "BUILTIN_NAMES",
    "ConfigurationError",
    "DMInteraction",
    "DegenerateLikelihoodError",
    "DegenerateProbeError",
    "DensityMatrix",
    "DephasingSweep",
    "DomainError",
    "EstimateReport",
    "FisherReport",
    "KrausSet",
    "NumericValidationError",
    "OptimizationFailure",
    "OptimizationResult",
    "Posterior",
    "QsnError",
    "StateVector",
    "Topology",
    "adam_step",
    "apply_1q",
    "apply_ansatz",
    "apply_channel",
    "apply_cz",
    "apply_interaction",
    "basis_probabilities",
    "builtin",
    "cfi",
    "crb",
    "delta_derivative",
    "dephasing_kraus",
    "dephasing_sweep",
    "derivative_state",
    "dm_unitary",
    "dprobs_wrt_delta",
    "estimate",
    "excited_state",
    "generator",
    "ghz_state",
    "individual_baseline",
    "individual_baseline_exact",
    "init_ground",
    "likelihood_table",
    "load_topology",
    "make_grid",
    "make_topology",
    "optimal_state",
    "optimize_measurement",
    "optimize_preparation",
    "refine_preparation",
    "param_count",
    "qb_under_noise",
    "qfi_mixed",
    "qfi_pure",
    "sample_outcomes",
    "to_density",
    "uniform_posterior",
    "update_posterior",
    "update_posterior_counts",
    "validate",
    "__version__",
]
