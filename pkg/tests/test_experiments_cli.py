import json
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from qsn.cli import main
from qsn.errors import ConfigurationError, OptimizationFailure
from qsn.experiments import ExperimentConfig, config_from_mapping, write_table

FAST = ["--restarts", "1", "--max-iters", "40"]


def _invoke(*args, env=None):
    return CliRunner().invoke(main, [str(a) for a in args], env=env)


# ---------------------------------------------------------------------------
# table and config plumbing


def test_write_table_layout(tmp_path):
    path = tmp_path / "t.csv"
    write_table(path, ("a", "b"), ("radians", "1"), [(0.5, 2), (1.5, 3)])
    lines = path.read_text().splitlines()
    assert lines[0] == "# units: a=radians, b=1"
    assert lines[1] == "a,b"
    assert lines[2] == "0.5,2"


def test_write_table_validates_widths(tmp_path):
    with pytest.raises(ConfigurationError):
        write_table(tmp_path / "t.csv", ("a", "b"), ("1",), [])
    with pytest.raises(ConfigurationError):
        write_table(tmp_path / "t.csv", ("a",), ("1",), [(1, 2)])


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigurationError):
        config_from_mapping({"experiment": "bayes", "mystery": 1}, "bayes")


def test_config_rejects_experiment_mismatch():
    with pytest.raises(ConfigurationError):
        config_from_mapping({"experiment": "bayes"}, "qb-compare")


def test_config_unwraps_manifests():
    cfg = config_from_mapping(
        {"version": "0.1.0", "config": {"experiment": "qb-depth", "l1": 2}},
        "qb-depth",
    )
    assert cfg.l1 == 2


def test_config_validates_values():
    with pytest.raises(ConfigurationError):
        ExperimentConfig("bayes", nu=0)
    with pytest.raises(ConfigurationError):
        ExperimentConfig("qb-depth", l1=-1)
    with pytest.raises(ConfigurationError):
        ExperimentConfig("nonsense")


# ---------------------------------------------------------------------------
# CLI behaviour


def test_qb_compare_ranks_by_bound(tmp_path):
    result = _invoke(
        "qb-compare", "--n", 4, "--topologies", "F4,GHZ,E", "--L1", 1,
        "--seed", 7, "--output-dir", tmp_path, "--no-plot", *FAST,
    )
    assert result.exit_code == 0, result.output
    lines = (tmp_path / "qb_compare.csv").read_text().splitlines()
    assert lines[1].startswith("topology,")
    names = [row.split(",")[0] for row in lines[2:]]
    qbs = [float(row.split(",")[5]) for row in lines[2:]]
    assert names[0] == "F4"  # optimized full network beats both baselines
    assert qbs == sorted(qbs)
    assert set(names) == {"F4", "GHZ", "E"}


def test_same_seed_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        result = _invoke(
            "noise-sweep", "--topology", "F4", "--L1", 1, "--seed", 3,
            "--lambda-grid", "0,0.5,0.9", "--output-dir", out, "--no-plot", *FAST,
        )
        assert result.exit_code == 0, result.output
    assert (a / "noise_sweep.csv").read_bytes() == (b / "noise_sweep.csv").read_bytes()


def test_manifest_rerun_reproduces_outputs(tmp_path):
    result = _invoke(
        "qb-depth", "--topology", "F4", "--L1", 1, "--seed", 5,
        "--output-dir", tmp_path, "--no-plot", *FAST,
    )
    assert result.exit_code == 0, result.output
    first = (tmp_path / "qb_depth.csv").read_bytes()
    (tmp_path / "qb_depth.csv").unlink()
    rerun = _invoke("qb-depth", "--config", tmp_path / "qb-depth.manifest.json")
    assert rerun.exit_code == 0, rerun.output
    assert (tmp_path / "qb_depth.csv").read_bytes() == first


def test_flags_override_config_file(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"experiment": "qb-depth", "seed": 1, "l1": 1}))
    out = tmp_path / "out"
    result = _invoke(
        "qb-depth", "--config", cfg_path, "--seed", 9, "--topology", "F4",
        "--output-dir", out, "--no-plot", *FAST,
    )
    assert result.exit_code == 0, result.output
    manifest = json.loads((out / "qb-depth.manifest.json").read_text())
    assert manifest["seed"] == 9
    assert manifest["config"]["l1"] == 1  # untouched flag keeps config value


def test_env_seed_fallback(tmp_path):
    result = _invoke(
        "qb-depth", "--topology", "F4", "--L1", 1, "--output-dir", tmp_path,
        "--no-plot", *FAST, env={"QSN_SEED": "123"},
    )
    assert result.exit_code == 0, result.output
    manifest = json.loads((tmp_path / "qb-depth.manifest.json").read_text())
    assert manifest["seed"] == 123


def test_zero_shots_is_usage_error(tmp_path):
    result = _invoke("bayes", "--nu", 0, "--output-dir", tmp_path)
    assert result.exit_code == 2
    assert "nu" in result.output


def test_unknown_topology_is_usage_error(tmp_path):
    result = _invoke("qb-depth", "--topology", "F16", "--output-dir", tmp_path, *FAST)
    assert result.exit_code == 2
    assert "F16" in result.output


def test_optimization_failure_maps_to_exit_3(tmp_path, monkeypatch):
    import qsn.cli

    def explode(cfg):
        raise OptimizationFailure("all 1 restarts ended degenerate")

    monkeypatch.setattr(qsn.cli, "run", explode)
    result = _invoke("qb-depth", "--topology", "F4", "--output-dir", tmp_path, *FAST)
    assert result.exit_code == 3
    assert "degenerate" in result.output


def test_figures_rendered_by_default(tmp_path):
    result = _invoke(
        "noise-sweep", "--topology", "F4", "--L1", 1, "--lambda-grid", "0,0.9",
        "--output-dir", tmp_path, *FAST,
    )
    assert result.exit_code == 0, result.output
    assert (tmp_path / "noise_sweep.png").exists()


def test_no_plot_suppresses_figures(tmp_path):
    result = _invoke(
        "noise-sweep", "--topology", "F4", "--L1", 1, "--lambda-grid", "0,0.9",
        "--output-dir", tmp_path, "--no-plot", *FAST,
    )
    assert result.exit_code == 0, result.output
    assert not list(Path(tmp_path).glob("*.png"))


def test_emit_plot_script(tmp_path):
    result = _invoke(
        "qb-sweep", "--topology", "F4", "--L1", 1, "--delta-grid", "0.01,0.1",
        "--alpha-grid", "0,1.5", "--output-dir", tmp_path, "--no-plot",
        "--emit-plot-script", *FAST,
    )
    assert result.exit_code == 0, result.output
    script = tmp_path / "plot.py"
    assert script.exists()
    assert "csv" in script.read_text()


def test_custom_topology_file_and_degree_gate(tmp_path):
    overdegree = tmp_path / "star6.edges"
    overdegree.write_text("6 5\n" + "".join(f"0 {k}\n" for k in range(1, 6)))
    refused = _invoke(
        "qb-depth", "--topology", overdegree, "--L1", 1,
        "--output-dir", tmp_path / "no", "--no-plot", *FAST,
    )
    assert refused.exit_code == 2
    allowed = _invoke(
        "qb-depth", "--topology", overdegree, "--L1", 1, "--allow-overdegree",
        "--output-dir", tmp_path / "yes", "--no-plot", *FAST,
    )
    assert allowed.exit_code == 0, allowed.output
    rows = (tmp_path / "yes" / "qb_depth.csv").read_text().splitlines()
    assert rows[2].split(",")[1] == str(3 * 6 + 6 * 5)


def test_topology_list_catalog(tmp_path):
    result = _invoke("topology-list", "--output-dir", tmp_path)
    assert result.exit_code == 0, result.output
    text = (tmp_path / "topologies.csv").read_text()
    for name in ("L4", "R4", "S4", "F4", "L9", "S9", "RS9", "F9"):
        assert f"\n{name}," in text
    assert "F9" in result.output


def test_bayes_summary_written(tmp_path):
    result = _invoke(
        "bayes", "--topology", "F4", "--L1", 1, "--L2", 1, "--nu", 200,
        "--seed", 2, "--output-dir", tmp_path, "--no-plot", *FAST,
    )
    assert result.exit_code == 0, result.output
    lines = (tmp_path / "bayes_summary.csv").read_text().splitlines()
    assert lines[1] == "nu,mean,variance,bias,qb_over_nu,cb_over_nu"
    checkpoints = [int(row.split(",")[0]) for row in lines[2:]]
    assert checkpoints == [10, 100, 200]
    assert (tmp_path / "bayes_posteriors.csv").exists()


def test_sweep_grids_echoed_in_manifest(tmp_path):
    result = _invoke(
        "qb-sweep", "--topology", "F4", "--L1", 1, "--delta-grid", "0.001,0.01",
        "--alpha-grid", "0,0.5,1.0", "--output-dir", tmp_path, "--no-plot", *FAST,
    )
    assert result.exit_code == 0, result.output
    manifest = json.loads((tmp_path / "qb-sweep.manifest.json").read_text())
    assert manifest["config"]["delta_grid"] == [0.001, 0.01]
    assert manifest["config"]["alpha_grid"] == [0, 0.5, 1.0]
    rows = (tmp_path / "qb_vs_alpha.csv").read_text().splitlines()
    assert len(rows) == 2 + 3
