"""Experiment drivers behind the command-line interface.

Each driver takes a fully resolved :class:`ExperimentConfig`, runs one study
(topology comparison, depth scan, parameter sweep, Bayesian estimation,
dephasing sweep), and writes its results as comma-delimited tables plus a
JSON manifest that echoes the configuration.  Outputs are deterministic
given the seed: re-running a driver with the same config produces
byte-identical tables.  Nothing here prints; the CLI layer owns stdout.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .ansatz import excited_state, ghz_state, param_count
from .bayes import (
    DEFAULT_GRID_MAX,
    DEFAULT_GRID_MIN,
    DEFAULT_GRID_POINTS,
    estimate,
    likelihood_table,
    make_grid,
    sample_outcomes,
    uniform_posterior,
    update_posterior_outcomes,
)
from .errors import ConfigurationError
from .fisher import qfi_pure
from .interaction import DMInteraction
from .io_utils import atomic_write_json, atomic_write_text
from .noise import dephasing_sweep
from .optimize import (
    DEFAULT_ETA,
    DEFAULT_MAX_ITERS,
    DEFAULT_RESTARTS,
    OptimizationResult,
    optimize_measurement,
    optimize_preparation,
)
from .pipeline import measurement_spec, outcome_probs, prepare, probe_cfi, probe_qfi, sense
from .topology import BUILTIN_NAMES, Topology, builtin, load_topology

EXPERIMENTS = (
    "qb-compare",
    "qb-depth",
    "qb-sweep",
    "cb-depth",
    "cb-sweep",
    "bayes",
    "noise-sweep",
    "topology-list",
)

#: Analytic reference probes accepted alongside topology names in qb-compare.
BASELINE_TAGS = ("GHZ", "E")

_DEFAULT_LAMBDA_GRID = tuple(round(0.1 * k, 1) for k in range(10))
_DEFAULT_DELTA_GRID = tuple(float(x) for x in np.logspace(-3.0, 0.0, 13))
_DEFAULT_ALPHA_GRID = tuple(float(x) for x in np.linspace(0.0, 2.0 * np.pi, 17))


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully resolved settings for one experiment run."""

    experiment: str
    topology: str = "F4"
    topologies: tuple[str, ...] | None = None
    n: int = 4
    l1: int = 1
    l2: int = 1
    delta: float = 0.05
    alpha: float = 0.0
    restarts: int = DEFAULT_RESTARTS
    max_iters: int = DEFAULT_MAX_ITERS
    eta: float = DEFAULT_ETA
    init_scale: float | None = None
    nu: int = 10_000
    lambda_grid: tuple[float, ...] = _DEFAULT_LAMBDA_GRID
    delta_grid: tuple[float, ...] = _DEFAULT_DELTA_GRID
    alpha_grid: tuple[float, ...] = _DEFAULT_ALPHA_GRID
    seed: int = 0
    output_dir: str = "results"
    plot: bool = True
    emit_plot_script: bool = False
    allow_overdegree: bool = False

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigurationError(f"unknown experiment {self.experiment!r}")
        if self.l1 < 0 or self.l2 < 0:
            raise ConfigurationError("layer counts must be non-negative")
        if self.nu < 1:
            raise ConfigurationError(f"nu must be a positive shot count, got {self.nu}")
        if self.restarts < 1:
            raise ConfigurationError("need at least one restart")
        if self.max_iters < 1:
            raise ConfigurationError("max_iters must be positive")


def config_from_mapping(payload: dict, experiment: str) -> ExperimentConfig:
    """Build a config from a JSON payload (plain config or manifest).

    Manifests wrap the config under a ``"config"`` key; plain files hold the
    fields directly.  Unknown keys are rejected so typos fail loudly.
    """
    if "config" in payload and isinstance(payload["config"], dict):
        payload = payload["config"]
    known = set(ExperimentConfig.__dataclass_fields__)
    extra = set(payload) - known
    if extra:
        raise ConfigurationError(f"unknown config keys: {sorted(extra)}")
    stated = payload.get("experiment", experiment)
    if stated != experiment:
        raise ConfigurationError(
            f"config is for experiment {stated!r}, not {experiment!r}"
        )
    coerced = dict(payload)
    coerced["experiment"] = experiment
    for key in ("topologies", "lambda_grid", "delta_grid", "alpha_grid"):
        if coerced.get(key) is not None:
            coerced[key] = tuple(coerced[key])
    return ExperimentConfig(**coerced)


# ---------------------------------------------------------------------------
# output helpers


def _fmt(value: object) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_table(
    path: Path, columns: Sequence[str], units: Sequence[str], rows: Sequence[Sequence]
) -> None:
    """Write a comma-delimited table with a units comment above the header."""
    if len(columns) != len(units):
        raise ConfigurationError("each column needs a unit annotation")
    lines = ["# units: " + ", ".join(f"{c}={u}" for c, u in zip(columns, units))]
    lines.append(",".join(columns))
    for row in rows:
        if len(row) != len(columns):
            raise ConfigurationError("row width does not match header")
        lines.append(",".join(_fmt(v) for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_manifest(cfg: ExperimentConfig, artifacts: Sequence[Path]) -> Path:
    out = Path(cfg.output_dir)
    payload = {
        "version": __version__,
        "experiment": cfg.experiment,
        "seed": cfg.seed,
        "config": asdict(cfg),
        "artifacts": sorted(p.name for p in artifacts),
    }
    path = out / f"{cfg.experiment}.manifest.json"
    atomic_write_json(path, payload)
    return path


# ---------------------------------------------------------------------------
# shared resolution steps


def resolve_topology(cfg: ExperimentConfig) -> Topology:
    """Interpret ``cfg.topology`` as a builtin name or an edge-file path."""
    name = cfg.topology
    if name in BUILTIN_NAMES:
        return builtin(name)
    path = Path(name)
    if path.suffix or path.exists():
        return load_topology(path, allow_overdegree=cfg.allow_overdegree)
    raise ConfigurationError(
        f"unknown topology {name!r}; choose one of {', '.join(BUILTIN_NAMES)} "
        "or pass an edge-file path"
    )


def _default_comparison(n: int) -> tuple[str, ...]:
    if n == 4:
        return ("L4", "R4", "S4", "F4", "GHZ", "E")
    if n == 9:
        return ("L9", "S9", "RS9", "F9", "GHZ", "E")
    raise ConfigurationError(f"no default topology set for n={n}; pass --topologies")


def _baseline_qfi(tag: str, n: int, dm: DMInteraction) -> float:
    state = ghz_state(n) if tag == "GHZ" else excited_state(n)
    psi, dpsi = sense(state, dm)
    return qfi_pure(psi, dpsi)


def _optimize(cfg: ExperimentConfig, topo: Topology, layers: int) -> OptimizationResult:
    return optimize_preparation(
        topo,
        layers,
        cfg.delta,
        cfg.alpha,
        restarts=cfg.restarts,
        max_iters=cfg.max_iters,
        seed=cfg.seed,
        eta=cfg.eta,
        init_scale=cfg.init_scale,
    )


# ---------------------------------------------------------------------------
# drivers (one per experiment)


def run_qb_compare(cfg: ExperimentConfig) -> list[Path]:
    """Quantum bound per topology, plus GHZ / excited analytic baselines."""
    tags = cfg.topologies or _default_comparison(cfg.n)
    dm = DMInteraction(cfg.delta, cfg.alpha)
    rows = []
    for tag in tags:
        if tag in BASELINE_TAGS:
            qfi = _baseline_qfi(tag, cfg.n, dm)
            rows.append((tag, cfg.n, 0, 0, qfi, 1.0 / qfi, 0))
            continue
        topo = builtin(tag) if tag in BUILTIN_NAMES else load_topology(
            Path(tag), allow_overdegree=cfg.allow_overdegree
        )
        if topo.n_qubits != cfg.n:
            raise ConfigurationError(
                f"topology {tag!r} has {topo.n_qubits} qubits, expected n={cfg.n}"
            )
        res = _optimize(cfg, topo, cfg.l1)
        qfi = 1.0 / res.best_cost
        rows.append(
            (topo.name, topo.n_qubits, cfg.l1, param_count(topo, cfg.l1), qfi,
             res.best_cost, res.restarts_used)
        )
    rows.sort(key=lambda r: r[5])
    out = Path(cfg.output_dir)
    table = out / "qb_compare.csv"
    write_table(
        table,
        ("topology", "n_qubits", "l1", "n_params", "qfi", "qb", "restarts_used"),
        ("name", "count", "layers", "count", "1", "1", "count"),
        rows,
    )
    return [table]


def run_qb_depth(cfg: ExperimentConfig) -> list[Path]:
    """Quantum bound versus preparation depth, 1..l1."""
    topo = resolve_topology(cfg)
    rows = []
    for layers in range(1, cfg.l1 + 1):
        res = _optimize(cfg, topo, layers)
        rows.append(
            (layers, param_count(topo, layers), 1.0 / res.best_cost, res.best_cost,
             res.restarts_used, len(res.cost_trace))
        )
    out = Path(cfg.output_dir)
    table = out / "qb_depth.csv"
    write_table(
        table,
        ("l1", "n_params", "qfi", "qb", "restarts_used", "iterations"),
        ("layers", "count", "1", "1", "count", "count"),
        rows,
    )
    return [table]


def run_qb_sweep(cfg: ExperimentConfig) -> list[Path]:
    """Quantum bound of one fixed optimized probe across delta and alpha."""
    topo = resolve_topology(cfg)
    res = _optimize(cfg, topo, cfg.l1)
    prepared = prepare(topo, cfg.l1, res.best_params)

    def qfi_at(delta: float, alpha: float) -> float:
        psi, dpsi = sense(prepared, DMInteraction(delta, alpha))
        return qfi_pure(psi, dpsi)

    delta_rows = [
        (d, cfg.alpha, (q := qfi_at(d, cfg.alpha)), 1.0 / q) for d in cfg.delta_grid
    ]
    alpha_rows = [
        (cfg.delta, a, (q := qfi_at(cfg.delta, a)), 1.0 / q) for a in cfg.alpha_grid
    ]
    out = Path(cfg.output_dir)
    columns = ("delta", "alpha", "qfi", "qb")
    units = ("radians", "radians", "1", "1")
    t_delta = out / "qb_vs_delta.csv"
    t_alpha = out / "qb_vs_alpha.csv"
    write_table(t_delta, columns, units, delta_rows)
    write_table(t_alpha, columns, units, alpha_rows)
    return [t_delta, t_alpha]


def _fixed_probe(cfg: ExperimentConfig, topo: Topology):
    res = _optimize(cfg, topo, cfg.l1)
    return res, prepare(topo, cfg.l1, res.best_params)


def run_cb_depth(cfg: ExperimentConfig) -> list[Path]:
    """Classical bound versus measurement depth for one optimized probe."""
    topo = resolve_topology(cfg)
    res = _optimize(cfg, topo, cfg.l1)
    qfi = 1.0 / res.best_cost
    rows = []
    for layers in range(1, cfg.l2 + 1):
        mres = optimize_measurement(
            res.best_params,
            topo,
            layers,
            cfg.delta,
            cfg.alpha,
            restarts=cfg.restarts,
            max_iters=cfg.max_iters,
            seed=cfg.seed,
            eta=cfg.eta,
        )
        rows.append(
            (layers, param_count(topo, layers), 1.0 / mres.best_cost, mres.best_cost,
             qfi, 1.0 / qfi, mres.restarts_used)
        )
    out = Path(cfg.output_dir)
    table = out / "cb_depth.csv"
    write_table(
        table,
        ("l2", "n_params", "cfi", "cb", "qfi", "qb", "restarts_used"),
        ("layers", "count", "1", "1", "1", "1", "count"),
        rows,
    )
    return [table]


def run_cb_sweep(cfg: ExperimentConfig) -> list[Path]:
    """Classical bound of one fixed probe + measurement across delta and alpha."""
    topo = resolve_topology(cfg)
    res, prepared = _fixed_probe(cfg, topo)
    mres = optimize_measurement(
        res.best_params,
        topo,
        cfg.l2,
        cfg.delta,
        cfg.alpha,
        restarts=cfg.restarts,
        max_iters=cfg.max_iters,
        seed=cfg.seed,
        eta=cfg.eta,
    )
    meas = measurement_spec(topo, cfg.l2, mres.best_params)

    def bounds_at(delta: float, alpha: float) -> tuple[float, float]:
        dm = DMInteraction(delta, alpha)
        return probe_cfi(prepared, dm, meas), probe_qfi(prepared, dm)

    delta_rows = []
    for d in cfg.delta_grid:
        f, q = bounds_at(d, cfg.alpha)
        delta_rows.append((d, cfg.alpha, f, 1.0 / f, q, 1.0 / q))
    alpha_rows = []
    for a in cfg.alpha_grid:
        f, q = bounds_at(cfg.delta, a)
        alpha_rows.append((cfg.delta, a, f, 1.0 / f, q, 1.0 / q))
    out = Path(cfg.output_dir)
    columns = ("delta", "alpha", "cfi", "cb", "qfi", "qb")
    units = ("radians", "radians", "1", "1", "1", "1")
    t_delta = out / "cb_vs_delta.csv"
    t_alpha = out / "cb_vs_alpha.csv"
    write_table(t_delta, columns, units, delta_rows)
    write_table(t_alpha, columns, units, alpha_rows)
    return [t_delta, t_alpha]


def _decade_checkpoints(nu: int) -> list[int]:
    points = [10**k for k in range(1, 12) if 10**k < nu]
    points.append(nu)
    return points


def run_bayes(cfg: ExperimentConfig) -> list[Path]:
    """Posterior estimation of delta from simulated outcomes.

    The probe and measurement are optimized at (delta, alpha); ``delta``
    plays the role of the unknown true value.  Outcomes are drawn once and
    consumed in order, with summary statistics recorded at decade
    checkpoints 10, 100, ... up to nu.
    """
    topo = resolve_topology(cfg)
    res, prepared = _fixed_probe(cfg, topo)
    mres = optimize_measurement(
        res.best_params,
        topo,
        cfg.l2,
        cfg.delta,
        cfg.alpha,
        restarts=cfg.restarts,
        max_iters=cfg.max_iters,
        seed=cfg.seed,
        eta=cfg.eta,
    )
    meas = measurement_spec(topo, cfg.l2, mres.best_params)
    dm = DMInteraction(cfg.delta, cfg.alpha)
    probs = outcome_probs(prepared, dm, meas)
    f = probe_cfi(prepared, dm, meas)
    q = probe_qfi(prepared, dm)

    grid = make_grid(DEFAULT_GRID_MIN, DEFAULT_GRID_MAX, DEFAULT_GRID_POINTS)
    table = likelihood_table(
        res.best_params, mres.best_params, topo, cfg.l1, cfg.l2, cfg.alpha, grid
    )
    outcomes = sample_outcomes(probs, cfg.nu, cfg.seed)

    summary_rows = []
    posterior_rows = []
    post = uniform_posterior(grid)
    consumed = 0
    for checkpoint in _decade_checkpoints(cfg.nu):
        post = update_posterior_outcomes(post, outcomes[consumed:checkpoint], table)
        consumed = checkpoint
        report = estimate(post, cfg.delta)
        summary_rows.append(
            (checkpoint, report.mean, report.variance, report.bias,
             1.0 / (checkpoint * q), 1.0 / (checkpoint * f))
        )
        posterior_rows.extend(
            (checkpoint, g, w) for g, w in zip(post.grid, post.weights)
        )
    out = Path(cfg.output_dir)
    t_summary = out / "bayes_summary.csv"
    t_post = out / "bayes_posteriors.csv"
    write_table(
        t_summary,
        ("nu", "mean", "variance", "bias", "qb_over_nu", "cb_over_nu"),
        ("count", "radians", "radians^2", "radians", "radians^2", "radians^2"),
        summary_rows,
    )
    write_table(
        t_post,
        ("nu", "delta", "weight"),
        ("count", "radians", "probability"),
        posterior_rows,
    )
    return [t_summary, t_post]


def run_noise_sweep(cfg: ExperimentConfig) -> list[Path]:
    """Quantum bound of the noiseless optimum under growing dephasing."""
    topo = resolve_topology(cfg)
    res = _optimize(cfg, topo, cfg.l1)
    dm = DMInteraction(cfg.delta, cfg.alpha)
    sweep = dephasing_sweep(res.best_params, topo, cfg.l1, dm, lambdas=cfg.lambda_grid)
    qb0 = sweep.qb_values[0]
    rows = [
        (lam, 1.0 / qb, qb, qb - qb0)
        for lam, qb in zip(sweep.lambdas, sweep.qb_values)
    ]
    out = Path(cfg.output_dir)
    table = out / "noise_sweep.csv"
    write_table(
        table,
        ("lambda", "qfi", "qb", "delta_vs_noiseless"),
        ("probability", "1", "1", "1"),
        rows,
    )
    return [table]


def run_topology_list(cfg: ExperimentConfig) -> list[Path]:
    """Catalog of builtin sensor-network layouts."""
    rows = []
    for name in BUILTIN_NAMES:
        topo = builtin(name)
        rows.append(
            (topo.name, topo.n_qubits, topo.n_edges, max(topo.degrees(), default=0),
             ";".join(f"{i}-{j}" for i, j in topo.edges))
        )
    out = Path(cfg.output_dir)
    table = out / "topologies.csv"
    write_table(
        table,
        ("name", "n_qubits", "n_edges", "max_degree", "edges"),
        ("name", "count", "count", "count", "pairs"),
        rows,
    )
    return [table]


_DRIVERS: dict[str, Callable[[ExperimentConfig], list[Path]]] = {
    "qb-compare": run_qb_compare,
    "qb-depth": run_qb_depth,
    "qb-sweep": run_qb_sweep,
    "cb-depth": run_cb_depth,
    "cb-sweep": run_cb_sweep,
    "bayes": run_bayes,
    "noise-sweep": run_noise_sweep,
    "topology-list": run_topology_list,
}


def run(cfg: ExperimentConfig) -> list[Path]:
    """Execute one experiment: tables, manifest, optional figures and script.

    Returns every artifact path written, manifest included.
    """
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    tables = _DRIVERS[cfg.experiment](cfg)
    artifacts = list(tables)
    if cfg.plot:
        from . import report

        artifacts.extend(report.render(cfg.experiment, tables))
    if cfg.emit_plot_script:
        from . import report

        artifacts.append(report.emit_plot_script(out))
    artifacts.append(write_manifest(cfg, artifacts))
    return artifacts
