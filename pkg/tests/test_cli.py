import json
import logging
from pathlib import Path

import numpy as np
import pytest
import yaml

from projlab.cli import main
from projlab.cli.config import ConfigError, expand_grid, parse_config
from projlab.cli.report import RunReport, columns_for
from projlab.cli.runner import execute
from projlab.dynamics import StepFailure

GOLDEN = Path(__file__).parent / "golden"


def write(tmp_path, name, data):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(data))
    return str(p)


def test_flat_columns():
    assert columns_for("flat_r2", [0.5, 1.0, 2.0]) == ["n", "u_n", "step_norm", "S_0.5", "S_1", "S_2", "ratio"]


def test_flat_golden_csv(tmp_path):
    assert main(["run", str(GOLDEN / "flat_r2.yaml"), "--output-dir", str(tmp_path)]) == 0
    assert (tmp_path / "flat_r2.csv").read_bytes() == (GOLDEN / "flat_r2.csv").read_bytes()


def test_invalid_u0_exits_2(tmp_path, caplog):
    cfg = write(tmp_path, "c.yaml", {"kind": "flat_r2", "parameters": {"u0": 0.9}})
    with caplog.at_level(logging.ERROR, logger="projlab"):
        assert main(["run", cfg, "--output-dir", str(tmp_path)]) == 2
    assert "delta" in caplog.text and "u0" in caplog.text


@pytest.mark.parametrize("data", [
    {"kind": "nope"},
    {"kind": "flat_r2", "parameters": {"bogus": 1}},
    {"kind": "flat_r2", "checkpoints": [100, 10]},
    {"kind": "flat_r2", "parameters": {"n_steps": 50}, "checkpoints": [10, 100]},
    {"kind": "flat_r2", "output": {"format": "xml"}},
    {"kind": "flat_r2", "gammas": [-1]},
    {"kind": "conified_r3", "parameters": {"b0": 1.2}},
    {"kind": "l2_counterexample", "parameters": {"tiers": 0}},
    {"kind": "custom", "parameters": {"x0": [1, 0]}},
])
def test_config_errors(data):
    with pytest.raises(ConfigError):
        parse_config(data)


def test_malformed_yaml_exits_2(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("kind: [unclosed\n")
    assert main(["run", str(p)]) == 2
    assert main(["run", str(tmp_path / "missing.yaml")]) == 2


def test_seed_mandatory_for_randomized_kinds(tmp_path):
    cfg = write(tmp_path, "p.yaml", {"kind": "positive_polyhedral", "parameters": {"n_steps": 20}})
    assert main(["run", cfg, "--output-dir", str(tmp_path)]) == 2
    assert main(["run", cfg, "--output-dir", str(tmp_path), "--seed", "5"]) == 0
    custom = {"kind": "custom", "parameters": {
        "x0": [1.0, 0.0], "n_steps": 5, "sets": [{"type": "subspace", "vectors": [[1, 1]]}],
        "policy": {"type": "random"}}}
    with pytest.raises(ConfigError):
        parse_config(custom)
    assert parse_config(custom, seed_override=1).seed == 1


def test_zero_steps_gives_empty_series(tmp_path):
    cfg = write(tmp_path, "z.yaml", {"kind": "flat_r2", "parameters": {"n_steps": 0}, "output": {"format": "json"}})
    assert main(["run", cfg, "--output-dir", str(tmp_path)]) == 0
    rep = RunReport.from_json((tmp_path / "flat_r2.json").read_text())
    assert rep.rows == [] and rep.checkpoints == [] and rep.n_steps == 0


@pytest.mark.parametrize("data", [
    {"kind": "flat_r2", "parameters": {"n_steps": 300}},
    {"kind": "conified_r3", "parameters": {"n_steps": 50}},
    {"kind": "l2_counterexample", "parameters": {"tiers": 6, "n_steps": 40}},
    {"kind": "positive_polyhedral", "seed": 2, "parameters": {"n_steps": 100}},
    {"kind": "custom", "parameters": {
        "x0": [1.0, 2.0], "n_steps": 12,
        "sets": [{"type": "polyhedron", "A": [[1, 0]], "beta": [0]}, {"type": "affine", "vectors": [[1, 1]], "offset": [0, 1]}],
        "policy": {"type": "explicit", "schedule": [[0, 1.0], [1, 1.5]] * 6}}},
])
def test_json_round_trip(data):
    rep = execute(parse_config(data))
    back = RunReport.from_json(rep.to_json())
    assert back == rep
    assert back.columns == columns_for(rep.kind, rep.gammas)
    assert all(len(r) == len(rep.columns) for r in rep.rows)


def test_report_numbers_trace_to_diagnostics():
    from projlab.experiments import FlatRunSpec, flat_gamma_sums, flat_recurrence_run
    from projlab.projectors import FlatFamily

    rep = execute(parse_config({"kind": "flat_r2", "parameters": {"n_steps": 200}}))
    run = flat_recurrence_run(FlatRunSpec(FlatFamily(), 0.5, 200))
    sums = flat_gamma_sums(run, [0.5, 1.0, 2.0], rep.checkpoints)
    assert np.array_equal(np.array(rep.partial_sums), sums.partial_sums)
    assert rep.final_point[0] == run.u[-1]
    assert rep.residuals["max_recurrence_residual"] == run.residuals.max()


def test_csv_determinism(tmp_path):
    cfg = write(tmp_path, "p.yaml", {"kind": "positive_polyhedral", "seed": 11, "parameters": {"n_steps": 300}})
    outs = []
    for d in ("a", "b"):
        assert main(["run", cfg, "--output-dir", str(tmp_path / d)]) == 0
        outs.append((tmp_path / d / "positive_polyhedral.csv").read_bytes())
    assert outs[0] == outs[1]
    assert b"\r" not in outs[0]


def test_long_runs_emit_checkpoint_rows():
    rep = execute(parse_config({"kind": "flat_r2", "parameters": {"n_steps": 20000}, "checkpoints": [5, 500, 20000]}))
    assert [r[0] for r in rep.rows] == [5, 500, 20000]
    short = execute(parse_config({"kind": "flat_r2", "parameters": {"n_steps": 30}}))
    assert [r[0] for r in short.rows] == list(range(1, 31))


def test_numeric_failure_exits_3(tmp_path, monkeypatch):
    import projlab.cli as cli

    def boom(cfg):
        raise StepFailure(17, FloatingPointError("overflow"))

    monkeypatch.setattr(cli, "execute", boom)
    cfg = write(tmp_path, "c.yaml", {"kind": "flat_r2"})
    assert main(["run", cfg]) == 3


def test_sweep_two_families(tmp_path):
    cfg = write(tmp_path, "s.yaml", {"kind": "flat_r2", "parameters": {"n_steps": 20000},
                                     "checkpoints": [100, 1000, 10000, 20000], "grid": {"r": [2, 4]}})
    out = tmp_path / "out"
    assert main(["sweep", cfg, "--output-dir", str(out), "--jobs", "2"]) == 0
    index = json.loads((out / "index.json").read_text())
    assert index["n_points"] == 2
    for entry, r in zip(index["points"], (2, 4)):
        assert entry["status"] == "ok" and entry["parameters"]["r"] == r
        lines = (out / entry["report"]).read_text().splitlines()
        ratios = [float(line.split(",")[-1]) for line in lines[2:]]
        assert all(abs(b - 1) < abs(a - 1) for a, b in zip(ratios, ratios[1:]))


def test_sweep_empty_grid_and_duplicates(tmp_path, caplog):
    empty = write(tmp_path, "e.yaml", {"kind": "flat_r2", "grid": {}})
    assert main(["sweep", empty, "--output-dir", str(tmp_path)]) == 2
    points, dups = expand_grid({"parameters": {"n_steps": 5}, "grid": {"r": [2, 2, 4]}})
    assert dups == 1 and [p["r"] for p in points] == [2, 4]
    cfg = write(tmp_path, "d.yaml", {"kind": "flat_r2", "parameters": {"n_steps": 10}, "grid": {"r": [2, 2]}})
    with caplog.at_level(logging.WARNING, logger="projlab"):
        assert main(["sweep", cfg, "--output-dir", str(tmp_path / "d"), "--jobs", "1"]) == 0
    assert "duplicate" in caplog.text


def test_sweep_point_failure_is_recorded(tmp_path):
    cfg = write(tmp_path, "f.yaml", {"kind": "flat_r2", "parameters": {"n_steps": 10}, "grid": {"u0": [0.5, 0.9]}})
    out = tmp_path / "f"
    assert main(["sweep", cfg, "--output-dir", str(out), "--jobs", "1"]) != 0
    index = json.loads((out / "index.json").read_text())
    assert [p["status"] for p in index["points"]] == ["ok", "config_error"]


def test_verify_subset_and_negative_control(capsys):
    assert main(["verify", "--only", "l2"]) == 0
    out = capsys.readouterr().out
    assert "[  1]" in out and "[  2]" in out and "[ 10]" not in out
    assert main(["verify", "--only", "psi", "--root-tol", "1e-2"]) == 1
    assert "FAIL" in capsys.readouterr().out
