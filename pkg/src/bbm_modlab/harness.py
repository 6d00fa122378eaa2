"""Config ingestion, deterministic orchestration and persistence of run outputs."""
from __future__ import annotations

import copy
import csv
import hashlib
import io
import json
import math
import os
import re
import tempfile
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import jsonschema

from . import __version__
from .estimates import KINDS, STRICHARTZ_KINDS, Window
from .experiments import EXPERIMENTS, KIND_NOTES, ExperimentResult
from .families import KINDS as FAMILY_KINDS, TestFamily
from .grid import GridSpec
from .group import CUSTOM_SYMBOLS, ExponentPack, HypothesisError, exponent_pack
from .modspace import PROFILES, UniformDecomposition, build_decomposition
from .solver import EvolutionBlowUp, PicardDivergence

SCHEMA_VERSION = 1
OUTDIR_ENV = "BBM_MODLAB_OUTDIR"

EXIT_OK, EXIT_CHECKS, EXIT_CONFIG, EXIT_HYPOTHESIS, EXIT_DIVERGENCE = 0, 1, 2, 3, 4

ALL_EXPERIMENTS = tuple(EXPERIMENTS) + ("determinism",)

# --------------------------------------------------------------------------- schema

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_int = {"type": "integer"}
_posint = {"type": "integer", "minimum": 1}
_exp = {"oneOf": [{"type": "number", "minimum": 1}, {"const": "inf"}]}
_length = {"oneOf": [_pos, {"type": "string", "pattern": r"^[0-9]+(\.[0-9]+)?\*?pi$"}]}


def _obj(props: dict, required: tuple = ()) -> dict:
    return {"type": "object", "properties": props, "additionalProperties": False, "required": list(required)}


_pair = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}
_symbol = _obj({"name": {"enum": ["bbm", *CUSTOM_SYMBOLS]}, "mu": _pos, "delta": {"type": "number", "minimum": 0},
                "T": _pos, "dt": _pos, "forcing_duration": _pos})
_tuples = _obj({k: {"type": "array", "items": {"type": "object"}, "minItems": 1}
                for k in ("product_bilinear", "product_power", "product_m")})

PARAM_SCHEMAS = {
    "exponents": _obj({"sweep_points": _posint, "beta_grid_points": _posint, "seed": _int,
                       "global_sigma_lambdas": {"type": "array", "items": _posint}}),
    "verify-partition": _obj({"fields": _posint, "seed": _int, "band": {"type": ["number", "null"]}}),
    "group": _obj({"fields": _posint, "time_pairs": _posint, "seed": _int, "band": _pos}),
    "kernel": _obj({"sigmas": {"type": "array", "items": _num, "minItems": 1},
                    "points": {"type": "array", "items": _pair, "minItems": 1}, "smoothing": _pos}),
    "decay-fit": _obj({"sigmas": {"type": "array", "items": _num, "minItems": 1}, "p": _exp,
                       "fit_t_min": _pos, "check_p2": {"type": "boolean"}}),
    "envelope": _obj({"sigmas": {"type": "array", "items": _num, "minItems": 1}}),
    "quotient": _obj({"kinds": {"type": "array", "items": {"enum": list(KINDS)}, "minItems": 1},
                      "r_compact": _exp, "forcing_duration": _pos, "symbol": _symbol,
                      "product_tuples": _tuples}),
    "strichartz": _obj({"kinds": {"type": "array", "items": {"enum": list(STRICHARTZ_KINDS)}, "minItems": 1},
                        "forcing_duration": _pos, "custom": {"oneOf": [{"type": "null"}, _symbol]},
                        "r_compact": _exp}),
    "picard": _obj({"lambda": _posint, "amplitude": _num, "T": _pos, "time_samples": {"type": "integer", "minimum": 9},
                    "tol": _pos, "max_iter": _posint, "reference_dt": _pos, "scaling_alpha": _pos,
                    "local_lambdas": {"type": "array", "items": _posint},
                    "xspace": {"oneOf": [{"type": "null"}, _obj({
                        "lambda": _posint, "sigma": _num, "theta": _pos, "q": _num, "s": _num, "amplitude": _num,
                        "T": _pos, "time_samples": {"type": "integer", "minimum": 9}})]},
                    "snapshot_stride": _posint, "x_stride": _posint,
                    "threshold_bisections": {"type": "integer", "minimum": 0}}),
    "solitary": _obj({"pairs": {"type": "array", "items": _pair, "minItems": 1}, "c": _num, "lambda": _posint,
                      "T": _pos, "dt": _pos, "snapshot_every": _pos, "x_stride": _posint}),
    "convolution-bound": _obj({"rho": _pos, "lambda": {"type": "integer", "minimum": 0}, "t_min": _pos,
                               "t_max": _pos, "samples": _posint,
                               "reject": _obj({"rho": _pos, "lambda": {"type": "integer", "minimum": 0}})}),
    "determinism": _obj({"configs": {"type": "array", "items": {"type": "string"}, "minItems": 1}}),
}

TOLERANCE_NAMES = ("identity", "partition", "reconstruction", "group", "realness", "kernel", "slope_slack",
                   "unitarity", "refinement", "drift", "contraction", "residual", "reference", "scaling_factor",
                   "ode", "propagation", "invariant")

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "bbm-modlab run config",
    "type": "object",
    "additionalProperties": False,
    "required": ["experiment"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "experiment": {"enum": list(ALL_EXPERIMENTS)},
        "grid": _obj({"L": _length, "N": {"type": "integer", "minimum": 4}}),
        "decomposition": _obj({"k_max": _posint, "profile": {"enum": list(PROFILES)}}),
        "pack": _obj({"lambda": _posint, "sigma": _num, "theta": _num, "p": _exp, "q": _num, "s": _num}),
        "family": _obj({"seed": _int, "count": _posint, "kind": {"enum": list(FAMILY_KINDS)},
                        "real": {"type": "boolean"}, "width": _pair, "center": _pair, "modulation": _pair,
                        "band": _pos}),
        "windows": _obj({"t_min": _pos, "t_max": _pos, "samples": {"type": "integer", "minimum": 2},
                         "T": _pos, "dt": _pos}),
        "tolerances": _obj({k: _pos for k in TOLERANCE_NAMES}),
        "params": {"type": "object"},
        "output_dir": {"type": "string"},
    },
    "allOf": [{"if": {"properties": {"experiment": {"const": name}}},
               "then": {"properties": {"params": schema}}} for name, schema in PARAM_SCHEMAS.items()],
}

COMMON_DEFAULTS = {
    "schema_version": SCHEMA_VERSION,
    "grid": {"L": "64pi", "N": 8192},
    "decomposition": {"k_max": 48, "profile": "smooth-bump"},
    "pack": {"lambda": 1, "sigma": -2.0, "theta": 0.5, "q": 2.0, "s": 0.0},
    "family": {"seed": 20240917, "count": 32, "kind": "gaussian-packets", "real": False,
               "width": [0.5, 3.0], "center": [-20.0, 20.0], "modulation": [-4.0, 4.0], "band": 6.0},
    "windows": {"t_min": 1.0, "t_max": 100.0, "samples": 24, "T": 40.0, "dt": 0.25},
    "tolerances": {"identity": 1e-12, "partition": 1e-12, "reconstruction": 1e-10, "group": 1e-12,
                   "realness": 1e-10, "kernel": 1e-6, "slope_slack": 0.05, "unitarity": 1e-12,
                   "refinement": 0.02, "drift": 0.05, "contraction": 0.5, "residual": 1e-8, "reference": 1e-5,
                   "scaling_factor": 2.0, "ode": 1e-8, "propagation": 1e-3, "invariant": 1e-8},
    "output_dir": "runs",
}

PARAM_DEFAULTS = {
    "exponents": {"sweep_points": 200, "beta_grid_points": 10000, "seed": 7, "global_sigma_lambdas": [6, 7, 8]},
    "verify-partition": {"fields": 100, "seed": 11, "band": None},
    "group": {"fields": 20, "time_pairs": 5, "seed": 13, "band": 6.0},
    "kernel": {"sigmas": [-2.0, -4.0], "smoothing": 0.25,
               "points": [[0, 1], [0.5, 1], [1, 5], [-2, 5], [0, 10], [3, 10], [-5, 20], [10, 20], [0, 50],
                          [20, 50]]},
    "decay-fit": {"sigmas": [-2.0, -4.0], "p": "inf", "fit_t_min": 10.0, "check_p2": True},
    "envelope": {"sigmas": [-2.0, -4.0]},
    "quotient": {"kinds": ["mod_decay", "compact_interval", "phiD_growth", "phiD_smooth"], "r_compact": "inf",
                 "forcing_duration": 8.0, "symbol": {"name": "bbm"}},
    "strichartz": {"kinds": list(STRICHARTZ_KINDS), "forcing_duration": 8.0, "r_compact": "inf",
                   "custom": {"name": "schrodinger", "mu": 0.5, "delta": 0.0, "T": 8.0, "dt": 0.25,
                              "forcing_duration": 4.0}},
    "picard": {"lambda": 1, "amplitude": 0.01, "T": 1.0, "time_samples": 33, "tol": 1e-12, "max_iter": 60,
               "reference_dt": 0.03125, "scaling_alpha": 0.5, "local_lambdas": [1, 2, 3],
               "xspace": {"lambda": 3, "sigma": -2.0, "theta": 0.5, "q": 2.0, "s": 0.0, "amplitude": 0.01,
                          "T": 20.0, "time_samples": 321},
               "snapshot_stride": 8, "x_stride": 16, "threshold_bisections": 8},
    "solitary": {"pairs": [[1.5, 1], [2.0, 1], [2.0, 2]], "c": 1.5, "lambda": 1, "T": 10.0, "dt": 0.05,
                 "snapshot_every": 1.0, "x_stride": 16},
    "convolution-bound": {"rho": 0.3, "lambda": 3, "t_min": 1.0, "t_max": 200.0, "samples": 64,
                          "reject": {"rho": 0.3, "lambda": 0}},
    "determinism": {"configs": []},
}


class ConfigError(ValueError):
    """Config failed validation; ``problems`` lists ``(field path, message)`` pairs."""

    def __init__(self, problems: list[tuple[str, str]]):
        self.problems = problems
        super().__init__("; ".join(f"{p}: {m}" for p, m in problems))


def validate(raw: dict) -> None:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        raise ConfigError([("/".join(map(str, e.absolute_path)) or "<root>", e.message) for e in errors])


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k not in ("product_tuples",):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def resolve(raw: dict) -> dict:
    """Validate and fill every default; the result is what gets echoed into the manifest."""
    validate(raw)
    exp = raw["experiment"]
    full = _merge({**COMMON_DEFAULTS, "experiment": exp, "params": PARAM_DEFAULTS[exp]}, raw)
    validate(full)
    return full


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def run_id(resolved: dict) -> str:
    body = {k: v for k, v in resolved.items() if k != "output_dir"}
    return hashlib.sha256(canonical(body).encode()).hexdigest()[:12]


# --------------------------------------------------------------------------- run config

def _length_value(v) -> float:
    if isinstance(v, str):
        m = re.fullmatch(r"([0-9]+(?:\.[0-9]+)?)\*?pi", v)
        return float(m.group(1)) * math.pi
    return float(v)


@dataclass
class RunConfig:
    resolved: dict
    base_dir: Path

    @property
    def experiment(self) -> str:
        return self.resolved["experiment"]

    @property
    def params(self) -> dict:
        return self.resolved["params"]

    def tol(self, name: str) -> float:
        return float(self.resolved["tolerances"][name])

    @staticmethod
    def number(v) -> float:
        return math.inf if v == "inf" else float(v)

    @cached_property
    def grid(self) -> GridSpec:
        g = self.resolved["grid"]
        return GridSpec(_length_value(g["L"]), int(g["N"]))

    def decomposition(self) -> UniformDecomposition:
        if not hasattr(self, "_dec"):
            d = self.resolved["decomposition"]
            self._dec = build_decomposition(self.grid, PROFILES[d["profile"]], int(d["k_max"]))
        return self._dec

    def pack(self) -> ExponentPack:
        p = self.resolved["pack"]
        pp = self.number(p["p"]) if "p" in p else None
        return exponent_pack(p["lambda"], float(p["sigma"]), float(p["theta"]), q=float(p["q"]),
                             s=float(p["s"]), p=pp)

    @cached_property
    def family(self) -> TestFamily:
        f = self.resolved["family"]
        return TestFamily(seed=int(f["seed"]), count=int(f["count"]), kind=f["kind"], real=bool(f["real"]),
                          width=tuple(f["width"]), center=tuple(f["center"]), modulation=tuple(f["modulation"]),
                          band=float(f["band"]))

    @cached_property
    def window(self) -> Window:
        w = self.resolved["windows"]
        return Window(float(w["t_min"]), float(w["t_max"]), int(w["samples"]), float(w["T"]), float(w["dt"]))


# --------------------------------------------------------------------------- persistence

def _clean(obj):
    """JSON-safe copy: non-finite floats become strings, numpy scalars become Python numbers."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def _json_bytes(obj) -> bytes:
    return (json.dumps(_clean(obj), sort_keys=True, indent=2, ensure_ascii=True) + "\n").encode()


def _csv_bytes(header, rows) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, float) else v for v in _clean(list(row))])
    return buf.getvalue().encode()


def output_root(resolved: dict) -> Path:
    return Path(os.environ.get(OUTDIR_ENV) or resolved["output_dir"])


@dataclass
class RunOutcome:
    status: int
    run_dir: Path | None
    summary: dict
    message: str = ""


def _write_outputs(run_dir: Path, resolved: dict, config_bytes: bytes, result: ExperimentResult, status: int,
                   message: str) -> dict:
    run_dir.mkdir(parents=True, exist_ok=True)
    files: dict[str, bytes] = {}
    for name, (header, rows) in sorted(result.tables.items()):
        files[name] = _csv_bytes(header, rows)
    summary = {
        "experiment": resolved["experiment"],
        "run_id": run_id(resolved),
        "status": status,
        "passed": status == EXIT_OK,
        "checks": result.checks,
        "results": result.results,
    }
    if message:
        summary["message"] = message
    files["summary.json"] = _json_bytes(summary)
    for name, data in files.items():
        (run_dir / name).write_bytes(data)
    manifest = {
        "artifact": "bbm-modlab",
        "artifact_version": __version__,
        "config": resolved,
        "input_hashes": {"config_file_sha256": hashlib.sha256(config_bytes).hexdigest(),
                         "resolved_config_sha256": hashlib.sha256(canonical(resolved).encode()).hexdigest()},
        "outputs": [{"file": n, "sha256": hashlib.sha256(d).hexdigest()} for n, d in sorted(files.items())],
        "checks": result.checks,
        "status": status,
    }
    (run_dir / "manifest.json").write_bytes(_json_bytes(manifest))
    return summary


def _run_determinism(cfg: RunConfig) -> ExperimentResult:
    res = ExperimentResult()
    for rel in cfg.params["configs"]:
        path = (cfg.base_dir / rel).resolve()
        digests = []
        for _ in range(2):
            with tempfile.TemporaryDirectory() as tmp:
                out = run_config(path, outdir=Path(tmp))
                digests.append(_digest_tree(out.run_dir) if out.run_dir else None)
        same = digests[0] is not None and digests[0] == digests[1]
        res.checks[f"byte-identical rerun: {rel}"] = same
        res.results[rel] = {"digest": digests[0]}
    return res


def _digest_tree(run_dir: Path) -> str:
    h = hashlib.sha256()
    for p in sorted(run_dir.iterdir()):
        h.update(p.name.encode())
        h.update(hashlib.sha256(p.read_bytes()).digest())
    return h.hexdigest()


def run_config(path: str | Path, outdir: Path | None = None) -> RunOutcome:
    """Run one config file and persist its outputs; never raises for expected failure modes."""
    path = Path(path)
    try:
        config_bytes = path.read_bytes()
        raw = json.loads(config_bytes)
    except (OSError, json.JSONDecodeError) as exc:
        return RunOutcome(EXIT_CONFIG, None, {}, f"cannot read config: {exc}")
    if not isinstance(raw, dict):
        return RunOutcome(EXIT_CONFIG, None, {}, "<root>: config must be a JSON object")
    if raw.get("experiment") not in ALL_EXPERIMENTS:
        return RunOutcome(EXIT_CONFIG, None, {},
                          f"experiment: unknown experiment {raw.get('experiment')!r}; "
                          f"known: {', '.join(ALL_EXPERIMENTS)}")
    try:
        resolved = resolve(raw)
    except ConfigError as exc:
        return RunOutcome(EXIT_CONFIG, None, {}, "\n".join(f"{p}: {m}" for p, m in exc.problems))
    cfg = RunConfig(resolved, path.parent)
    run_dir = (outdir if outdir is not None else output_root(resolved)) / run_id(resolved)
    result = ExperimentResult()
    message = ""
    try:
        if cfg.experiment == "determinism":
            result = _run_determinism(cfg)
        else:
            result = EXPERIMENTS[cfg.experiment].run(cfg)
        status = EXIT_OK if all(result.checks.values()) else EXIT_CHECKS
        if not result.checks:
            status = EXIT_CHECKS
            message = "no checks were evaluated"
    except HypothesisError as exc:
        status, message = EXIT_HYPOTHESIS, str(exc)
        result.results["hypothesis"] = exc.hypothesis
    except PicardDivergence as exc:
        status, message = EXIT_DIVERGENCE, str(exc)
        result.results.setdefault("partial", exc.report.summary())
    except EvolutionBlowUp as exc:
        status, message = EXIT_DIVERGENCE, str(exc)
    if status == EXIT_CHECKS and not message:
        failed = [k for k, v in result.checks.items() if not v]
        message = "failed checks: " + ", ".join(failed)
    summary = _write_outputs(run_dir, resolved, config_bytes, result, status, message)
    return RunOutcome(status, run_dir, summary, message)


# --------------------------------------------------------------------------- listing

def list_experiments() -> str:
    rows = [("experiment", "required config fields", "what it measures")]
    for name in sorted(ALL_EXPERIMENTS):
        if name == "determinism":
            rows.append((name, "params.configs", "byte-identical outputs when a config is rerun"))
            continue
        e = EXPERIMENTS[name]
        rows.append((name, e.fields, e.about))
    rows.append(("", "", ""))
    rows.append(("estimate kind", "experiment", "what it measures"))
    for kind in KINDS:
        exp = "strichartz / quotient" if kind in STRICHARTZ_KINDS else "quotient"
        rows.append((kind, exp, KIND_NOTES[kind]))
    w0 = max(len(r[0]) for r in rows)
    w1 = max(len(r[1]) for r in rows)
    return "\n".join(f"{a:<{w0}}  {b:<{w1}}  {c}".rstrip() for a, b, c in rows) + "\n"
