"""Command-line entry points.

Thin argument-parsing shell around :mod:`qsn.experiments`: every subcommand
builds an :class:`ExperimentConfig` (config file first, explicit flags on
top), hands it to the driver, and prints the artifact paths it wrote.

Exit codes: 0 success, 2 invalid configuration or flags, 3 optimization
failure (every restart degenerate).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import __version__
from .errors import ConfigurationError, DomainError, OptimizationFailure
from .experiments import ExperimentConfig, config_from_mapping, run


class _OptimizationExit(click.ClickException):
    exit_code = 3


def _comma_floats(_ctx, _param, value):
    if value is None:
        return None
    try:
        return tuple(float(x) for x in value.split(","))
    except ValueError as exc:
        raise click.UsageError(f"expected comma-separated reals, got {value!r}") from exc


def _comma_names(_ctx, _param, value):
    if value is None:
        return None
    return tuple(x.strip() for x in value.split(",") if x.strip())


def _collect(ctx: click.Context, experiment: str, **values) -> ExperimentConfig:
    """Merge config file < explicit flags/env into one ExperimentConfig."""
    config_path = values.pop("config", None)
    explicit = {}
    for name, value in values.items():
        if value is None:
            continue
        source = ctx.get_parameter_source(name)
        if source in (
            click.core.ParameterSource.COMMANDLINE,
            click.core.ParameterSource.ENVIRONMENT,
        ):
            explicit[name] = value
    payload: dict = {}
    if config_path is not None:
        try:
            payload = json.loads(Path(config_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise click.UsageError(f"cannot read config {config_path}: {exc}") from exc
        if "config" in payload and isinstance(payload["config"], dict):
            payload = payload["config"]
    merged = {**payload, **explicit}
    try:
        return config_from_mapping(merged, experiment)
    except (ConfigurationError, DomainError) as exc:
        raise click.UsageError(str(exc)) from exc


def _execute(cfg: ExperimentConfig) -> None:
    try:
        artifacts = run(cfg)
    except (ConfigurationError, DomainError) as exc:
        raise click.UsageError(str(exc)) from exc
    except OptimizationFailure as exc:
        raise _OptimizationExit(str(exc)) from exc
    for path in artifacts:
        click.echo(path)


def _common(f):
    """Options shared by every experiment subcommand."""
    for deco in reversed(
        (
            click.option("--seed", type=int, envvar="QSN_SEED", default=None,
                         help="RNG seed; falls back to $QSN_SEED, then 0."),
            click.option("--output-dir", "output_dir", type=click.Path(), default=None,
                         help="Directory for tables, figures, and the manifest."),
            click.option("--config", type=click.Path(exists=True, dir_okay=False),
                         default=None,
                         help="JSON config or a previous run's manifest; flags override."),
            click.option("--plot/--no-plot", "plot", default=None,
                         help="Render figures next to the tables (default on)."),
            click.option("--emit-plot-script", "emit_plot_script", is_flag=True,
                         default=None, help="Also write a standalone plot.py."),
        )
    ):
        f = deco(f)
    return f


def _optimizer(f):
    for deco in reversed(
        (
            click.option("--restarts", type=int, default=None,
                         help="Independent optimizer restarts (default 5)."),
            click.option("--max-iters", "max_iters", type=int, default=None,
                         help="Cost evaluations per restart (default 2000)."),
            click.option("--eta", type=float, default=None,
                         help="Adam step size (default 0.01)."),
            click.option("--init-scale", "init_scale", type=float, default=None,
                         help="Start restarts uniformly in [-s, s] (near the "
                              "identity) instead of [0, 2pi); helps deep circuits."),
        )
    ):
        f = deco(f)
    return f


def _drive(f):
    for deco in reversed(
        (
            click.option("--delta", type=float, default=None,
                         help="Interaction phase in radians (default 0.05)."),
            click.option("--alpha", type=float, default=None,
                         help="Drive phase offset in radians (default 0)."),
        )
    ):
        f = deco(f)
    return f


_topology = click.option(
    "--topology", default=None,
    help="Builtin layout name (see topology-list) or an edge-file path.",
)
_overdegree = click.option(
    "--allow-overdegree", "allow_overdegree", is_flag=True, default=None,
    help="Permit nodes with more than four connections in topology files.",
)
_l1 = click.option("--L1", "l1", type=int, default=None,
                   help="Preparation circuit layers.")
_l2 = click.option("--L2", "l2", type=int, default=None,
                   help="Measurement circuit layers.")


@click.group()
@click.version_option(__version__, prog_name="qsn")
def main() -> None:
    """Optimize and study entangled sensor networks for weak phase drives."""


@main.command("qb-compare")
@click.option("--n", type=int, default=None,
              help="Network size; selects the default topology set (4 or 9).")
@click.option("--topologies", callback=_comma_names, default=None,
              help="Comma list of layouts and baselines, e.g. L4,R4,S4,F4,GHZ,E.")
@_l1
@_drive
@_optimizer
@_overdegree
@_common
@click.pass_context
def qb_compare(ctx, **values):
    """Rank topologies by the quantum bound they reach after optimization."""
    _execute(_collect(ctx, "qb-compare", **values))


@main.command("qb-depth")
@_topology
@_l1
@_drive
@_optimizer
@_overdegree
@_common
@click.pass_context
def qb_depth(ctx, **values):
    """Quantum bound as preparation depth grows from 1 to L1."""
    _execute(_collect(ctx, "qb-depth", **values))


@main.command("qb-sweep")
@_topology
@_l1
@_drive
@click.option("--delta-grid", "delta_grid", callback=_comma_floats, default=None,
              help="Comma list of interaction phases to scan.")
@click.option("--alpha-grid", "alpha_grid", callback=_comma_floats, default=None,
              help="Comma list of drive phase offsets to scan.")
@_optimizer
@_overdegree
@_common
@click.pass_context
def qb_sweep(ctx, **values):
    """Quantum bound of one optimized probe across delta and alpha."""
    _execute(_collect(ctx, "qb-sweep", **values))


@main.command("cb-depth")
@_topology
@_l1
@_l2
@_drive
@_optimizer
@_overdegree
@_common
@click.pass_context
def cb_depth(ctx, **values):
    """Classical bound as measurement depth grows from 1 to L2."""
    _execute(_collect(ctx, "cb-depth", **values))


@main.command("cb-sweep")
@_topology
@_l1
@_l2
@_drive
@click.option("--delta-grid", "delta_grid", callback=_comma_floats, default=None,
              help="Comma list of interaction phases to scan.")
@click.option("--alpha-grid", "alpha_grid", callback=_comma_floats, default=None,
              help="Comma list of drive phase offsets to scan.")
@_optimizer
@_overdegree
@_common
@click.pass_context
def cb_sweep(ctx, **values):
    """Classical bound of one optimized probe + measurement across delta, alpha."""
    _execute(_collect(ctx, "cb-sweep", **values))


@main.command("bayes")
@_topology
@_l1
@_l2
@_drive
@click.option("--nu", type=int, default=None,
              help="Total measurement shots to simulate (default 10000).")
@_optimizer
@_overdegree
@_common
@click.pass_context
def bayes(ctx, **values):
    """Grid-posterior estimation of delta from simulated outcomes."""
    _execute(_collect(ctx, "bayes", **values))


@main.command("noise-sweep")
@_topology
@_l1
@_drive
@click.option("--lambda-grid", "lambda_grid", callback=_comma_floats, default=None,
              help="Comma list of dephasing strengths in [0, 1].")
@_optimizer
@_overdegree
@_common
@click.pass_context
def noise_sweep(ctx, **values):
    """Quantum bound of the noiseless optimum under per-qubit dephasing."""
    _execute(_collect(ctx, "noise-sweep", **values))


@main.command("topology-list")
@_common
@click.pass_context
def topology_list(ctx, **values):
    """Write (and show) the catalog of builtin network layouts."""
    cfg = _collect(ctx, "topology-list", **values)
    _execute(cfg)
    from .topology import BUILTIN_NAMES, builtin

    for name in BUILTIN_NAMES:
        topo = builtin(name)
        click.echo(f"{name:>5}  n={topo.n_qubits}  edges={topo.n_edges}")


if __name__ == "__main__":
    sys.exit(main())
