import json
from importlib import resources
from pathlib import Path

import jsonschema
import pytest

from expbergman.cli import main
from expbergman.config import RunConfig, load_config
from expbergman.reports import clean, rows_to_csv

ROOT = Path(__file__).resolve().parents[1]
SMALL = {"n_r": 400, "n_theta": 256, "degree": 128, "rmax": 0.7}


def write(tmp_path, name, d):
    path = tmp_path / name
    path.write_text(json.dumps(d))
    return str(path)


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, (json.loads(out.out) if code == 0 and out.out else None), out.err


def test_config_round_trip(tmp_path):
    cfg = RunConfig(command="opnorm", op="GI", phi=((0.1, 0.0), (0.5, 0.0)), g=((0.0, 1.0),),
                    p=float("inf"), q=3, delta=0.02, out="x.json")
    back = RunConfig.from_json(cfg.to_json())
    assert back == cfg and back.to_json() == cfg.to_json()
    assert json.loads(cfg.to_json())["p"] == "inf"
    assert load_config(write(tmp_path, "c.json", cfg.to_dict())) == cfg


def test_dump_config_matches_overrides(capsys):
    code, d, _ = run_json(capsys, ["lattice", "--seed", "4", "--rmax", "0.8", "--dump-config"])
    assert code == 0
    assert d["command"] == "lattice" and d["seed"] == 4 and d["rmax"] == 0.8


def test_schema_copy_in_docs():
    packaged = json.loads(resources.files("expbergman").joinpath("run_config.schema.json").read_text())
    shipped = json.loads((ROOT / "docs" / "run_config.schema.json").read_text())
    assert packaged == shipped


@pytest.mark.parametrize("bad", [{"p": -1}, {"op": "Cphi"}, {"n_theta": 63}, {"colour": 1},
                                 {"rmin": 0.8, "rmax": 0.5}, {"phi": [[1.0]]}])
def test_invalid_config_exit_code(tmp_path, capsys, bad):
    code = main(["criterion", "--config", write(tmp_path, "bad.json", bad)])
    err = capsys.readouterr().err
    assert code == 2 and "invalid configuration" in err


def test_missing_config_file(capsys):
    assert main(["criterion", "--config", "/nonexistent/run.json"]) == 2


def test_numerical_failure_names_module(tmp_path, capsys):
    # 64 moments cannot represent kernels out to 0.9
    cfg = write(tmp_path, "c.json", {"degree": 64, "rmax": 0.9, "n_theta": 256})
    code = main(["criterion", "--config", cfg])
    err = capsys.readouterr().err
    assert code == 3 and "expbergman.kernel" in err and "N >=" in err and "GB0-sup" in err


def test_non_self_map_fails(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", SMALL | {"phi": [[0.0, 0.0], [1.5, 0.0]]})
    assert main(["criterion", "--config", cfg]) == 3
    assert "expbergman.operators" in capsys.readouterr().err


def test_criterion_zero_symbol(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", SMALL | {"g": [[0.0, 0.0]]})
    code, rep, _ = run_json(capsys, ["criterion", "--config", cfg])
    assert code == 0
    assert rep["statistic"] == 0 and rep["verdict"] == "bounded-indicated"
    assert rep["diagnostics"]["grid"]["r_max"] > 0.99
    assert {"criterion", "params", "sweep", "statistic", "verdict", "diagnostics"} <= set(rep)


def test_criterion_csv(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", SMALL)
    out = tmp_path / "sweep.csv"
    assert main(["criterion", "--config", cfg, "--format", "csv", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "z_re,z_im,value,running" and len(lines) > 5


def test_lattice_command(tmp_path, capsys):
    csv_path = tmp_path / "lat.csv"
    cfg = write(tmp_path, "c.json", {"delta": 0.1, "lattice_csv": str(csv_path)})
    code, rep, _ = run_json(capsys, ["lattice", "--config", cfg, "--rmax", "0.9"])
    assert code == 0
    assert rep["separation_ok"] and rep["coverage_ok"] and rep["multiplicity_max"] <= 256
    assert rep["passed"]
    assert len(csv_path.read_text().splitlines()) == rep["n_centers"] + 1


def test_weight_info(capsys):
    code, rep, _ = run_json(capsys, ["weight-info"])
    assert code == 0 and rep["class_L"]["passed"] and rep["tau_comparability"]["passed"]
    assert len(rep["rows"]) == 11


def test_lp_check(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {"n_theta": 256, "family_size": 20})
    code, rep, _ = run_json(capsys, ["lp-check", "--config", cfg])
    assert code == 0 and rep["passed"]
    assert [s["p"] for s in rep["summary"]] == [1.0, 2.0, "inf"]


def test_xcheck_volterra(capsys):
    code, rep, _ = run_json(capsys, ["xcheck"])
    assert code == 0
    assert rep["verdict"] == "bounded-indicated" and rep["opnorm_stable"] and rep["consistent"]
    assert 0 < rep["opnorm_over_statistic"] < 10


def test_determinism(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", {"op": "GI", "phi": [[0.0, 0.0], [0.5, 0.0]], "family_size": 6})
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        assert main(["opnorm", "--config", cfg, "--seed", "11", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_report_helpers():
    d = clean({"a": 1 / 3, "b": float("inf"), "c": 1 + 2j, "d": [float("nan")]})
    assert d == {"a": 0.333333333333, "b": "inf", "c": [1.0, 2.0], "d": ["nan"]}
    assert rows_to_csv([{"x": 1, "y": "a"}]).splitlines() == ["x,y", "1,a"]
    with pytest.raises(jsonschema.ValidationError):
        RunConfig(step=2.0)
