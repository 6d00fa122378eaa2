import csv
import json
from pathlib import Path

import jsonschema

from bbm_modlab import cli
from bbm_modlab.estimates import KINDS
from bbm_modlab.harness import OUTDIR_ENV, SCHEMA, resolve, run_config, run_id

SMALL = {"grid": {"L": "16pi", "N": 1024}, "decomposition": {"k_max": 12}}


def write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return p


def test_unknown_key_names_its_path(tmp_path, capsys):
    p = write(tmp_path, {"experiment": "exponents", "pack": {"lambda": 1, "sigmaa": -2}})
    assert cli.main(["run", str(p), "--outdir", str(tmp_path)]) == 2
    assert "pack" in capsys.readouterr().err


def test_unknown_experiment(tmp_path):
    out = run_config(write(tmp_path, {"experiment": "nope"}), tmp_path)
    assert out.status == 2 and out.run_dir is None


def test_exponents_run(tmp_path):
    p = write(tmp_path, {"experiment": "exponents", "pack": {"lambda": 1, "sigma": -2, "theta": 0.5}})
    out = run_config(p, tmp_path / "runs")
    assert out.status == 0
    summary = json.loads((out.run_dir / "summary.json").read_text())
    assert summary["passed"]
    manifest = json.loads((out.run_dir / "manifest.json").read_text())
    assert manifest["config"]["family"]["seed"] == 20240917  # defaults are echoed
    assert {o["file"] for o in manifest["outputs"]} >= {"summary.json"}


def test_hypothesis_violation_exit(tmp_path):
    p = write(tmp_path, {"experiment": "exponents", "pack": {"lambda": 1, "sigma": -0.5, "theta": 0.5}})
    out = run_config(p, tmp_path)
    assert out.status == 3
    assert "sigma < -1" in out.message


def test_divergence_exit(tmp_path):
    cfg = {"experiment": "picard", **SMALL, "params": {"amplitude": 5.0, "T": 10.0}}
    out = run_config(write(tmp_path, cfg), tmp_path)
    assert out.status == 4


def test_list_and_schema(capsys):
    assert cli.main(["list"]) == 0
    first = capsys.readouterr().out
    cli.main(["list"])
    assert capsys.readouterr().out == first
    for kind in KINDS:
        assert kind in first
    assert cli.main(["schema"]) == 0
    schema = json.loads(capsys.readouterr().out)
    jsonschema.Draft202012Validator.check_schema(schema)
    assert schema == json.loads(json.dumps(SCHEMA))


def test_run_id_ignores_output_dir():
    a = resolve({"experiment": "exponents"})
    b = resolve({"experiment": "exponents", "output_dir": "elsewhere"})
    assert run_id(a) == run_id(b)
    assert run_id(a) != run_id(resolve({"experiment": "exponents", "pack": {"theta": 0.25}}))


def test_environment_overrides_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTDIR_ENV, str(tmp_path / "env"))
    out = run_config(write(tmp_path, {"experiment": "exponents"}))
    assert out.run_dir.parent == tmp_path / "env"


def test_reruns_are_byte_identical(tmp_path):
    p = write(tmp_path, {"experiment": "convolution-bound"})
    a, b = run_config(p, tmp_path / "a"), run_config(p, tmp_path / "b")
    for f in sorted(a.run_dir.iterdir()):
        assert f.read_bytes() == (b.run_dir / f.name).read_bytes()


def header(path: Path):
    with path.open(newline="") as fh:
        return next(csv.reader(fh))


def test_csv_headers(tmp_path):
    conv = run_config(write(tmp_path, {"experiment": "convolution-bound"}), tmp_path)
    (qfile,) = conv.run_dir.glob("quotients_*.csv")
    assert header(qfile) == ["kind", "member_id", "t", "quotient", "numerator", "denominator"]
    cfg = {"experiment": "picard", **SMALL,
           "params": {"local_lambdas": [1], "xspace": {"T": 2.0, "time_samples": 33}}}
    pic = run_config(write(tmp_path, cfg, "p.json"), tmp_path)
    assert header(pic.run_dir / "trajectory.csv") == ["t", "x", "u"]
