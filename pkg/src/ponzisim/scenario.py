"""Scenario files: a small JSON schema describing one simulation.

Shape (version 1):

    {
      "schema_version": 1,
      "model": "quasi_logistic",
      "demography": {"N0": 10, "N": 1000, "n": 0.1, "T": 7},
      "capital":    {"K0_pro": 100, "I0": 3, "r": 0.052, "i": 0.03},
      "horizon": 200,
      "N_star": 0.99,
      "scan":  {"i_grid": [...], "T_grid": [...]},               # scan verb
      "chain": {"inherit": true, "runs": [{...}, ...]},          # chain verb
      "output": {"step": 1.0, "uncompounded_constants": false}             # continuum verb
    }

Rates are plain decimals (0.052, never "5.2%"), all numbers parse as
64-bit floats, T/T0/horizon as integers (T may be null for an unbounded
lock-up).  Validation collects every violation before failing, and
loading then re-serializing a config reproduces it field for field.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import ConfigError, InvalidParameterError
from .params import CapitalParams, GeometricParams, QuasiLogisticParams, SirParams
from .recurrent import RunSpec

SCHEMA_VERSION = 1
MODELS = ("geometric", "quasi_logistic", "sir_standard", "nssir", "continuum")
DEFAULT_HORIZON = 200
DEFAULT_N_STAR = 0.99

_DEMOGRAPHY_FIELDS = {
    "geometric": {"required": ("N0", "n"), "optional": ("T",)},
    "quasi_logistic": {"required": ("N0", "N", "n"), "optional": ("T",)},
    "continuum": {"required": ("N0", "N", "n", "T"), "optional": ()},
    "sir_standard": {"required": ("S0", "I0", "beta", "gamma"), "optional": ("R0",)},
    "nssir": {"required": ("S0", "I0", "beta", "gamma"), "optional": ("R0", "T0")},
}
_CAPITAL_FIELDS = ("K0_pro", "I0", "r", "i")


def _field_name(where: str, key: str) -> str:
    return f"{where}.{key}" if where else key


def _number(block: dict, key: str, where: str, problems: list) -> float | None:
    v = block.get(key)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        problems.append(f"{_field_name(where, key)}: expected a number, got {v!r}")
        return None
    v = float(v)
    if not math.isfinite(v):
        problems.append(f"{_field_name(where, key)}: must be finite, got {v!r}")
        return None
    return v


def _integer(block: dict, key: str, where: str, problems: list,
             allow_none: bool = False) -> int | None:
    v = block.get(key)
    if v is None and allow_none:
        return None
    if isinstance(v, bool) or not isinstance(v, int):
        problems.append(f"{_field_name(where, key)}: expected an integer"
                        + (" or null" if allow_none else "") + f", got {v!r}")
        return None
    return v


def _build_demography(model: str, block, where: str, problems: list):
    if not isinstance(block, dict):
        problems.append(f"{where}: expected an object, got {type(block).__name__}")
        return None
    spec = _DEMOGRAPHY_FIELDS[model]
    known = set(spec["required"]) | set(spec["optional"])
    for key in block:
        if key not in known:
            problems.append(f"{where}.{key}: unknown field for model {model!r}")
    missing = [k for k in spec["required"] if k not in block]
    for k in missing:
        problems.append(f"{where}.{k}: required for model {model!r}")
    if missing:
        return None

    before = len(problems)
    try:
        if model in ("geometric",):
            N0 = _number(block, "N0", where, problems)
            n = _number(block, "n", where, problems)
            T = _integer(block, "T", where, problems, allow_none=True) if "T" in block else None
            if len(problems) > before:
                return None
            return GeometricParams(N0=N0, n=n, T=T)
        if model in ("quasi_logistic", "continuum"):
            N0 = _number(block, "N0", where, problems)
            N = _number(block, "N", where, problems)
            n = _number(block, "n", where, problems)
            allow_none = model == "quasi_logistic"
            T = _integer(block, "T", where, problems, allow_none=allow_none) \
                if "T" in block else None
            if len(problems) > before:
                return None
            return QuasiLogisticParams(N0=N0, N=N, n=n, T=T)
        S0 = _number(block, "S0", where, problems)
        I0 = _number(block, "I0", where, problems)
        R0 = _number(block, "R0", where, problems) if "R0" in block else 0.0
        beta = _number(block, "beta", where, problems)
        gamma = _number(block, "gamma", where, problems)
        T0 = _integer(block, "T0", where, problems) if "T0" in block else 0
        if len(problems) > before:
            return None
        return SirParams(S0=S0, I0=I0, R0=R0, beta=beta, gamma=gamma, T0=T0)
    except InvalidParameterError as exc:
        problems.extend(f"{where}: {p}" for p in exc.problems)
        return None


def _build_capital(block, where: str, problems: list):
    if not isinstance(block, dict):
        problems.append(f"{where}: expected an object, got {type(block).__name__}")
        return None
    for key in block:
        if key not in _CAPITAL_FIELDS:
            problems.append(f"{where}.{key}: unknown field")
    missing = [k for k in _CAPITAL_FIELDS if k not in block]
    for k in missing:
        problems.append(f"{where}.{k}: required")
    if missing:
        return None
    before = len(problems)
    values = {k: _number(block, k, where, problems) for k in _CAPITAL_FIELDS}
    if len(problems) > before:
        return None
    try:
        return CapitalParams(**values)
    except InvalidParameterError as exc:
        problems.extend(f"{where}: {p}" for p in exc.problems)
        return None


@dataclass(frozen=True)
class ScanGrid:
    i_grid: tuple
    T_grid: tuple


@dataclass(frozen=True)
class ChainConfig:
    inherit: bool
    runs: tuple  # of RunSpec


@dataclass(frozen=True)
class ScenarioConfig:
    model: str
    demography: object
    capital: CapitalParams
    horizon: int = DEFAULT_HORIZON
    n_star: float = DEFAULT_N_STAR
    scan: ScanGrid | None = None
    chain: ChainConfig | None = None
    output: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION


def parse_scenario(raw: dict) -> ScenarioConfig:
    """Validate a scenario dict, reporting every violation at once."""
    if not isinstance(raw, dict):
        raise ConfigError(["top level: expected a JSON object"])
    problems: list[str] = []

    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        problems.append(f"schema_version: expected {SCHEMA_VERSION}, got {version!r}")

    model = raw.get("model")
    if model not in MODELS:
        problems.append(f"model: expected one of {list(MODELS)}, got {model!r}")
        raise ConfigError(problems)

    demography = None
    if "demography" not in raw:
        problems.append("demography: required")
    else:
        demography = _build_demography(model, raw["demography"], "demography", problems)
    capital = None
    if "capital" not in raw:
        problems.append("capital: required")
    else:
        capital = _build_capital(raw["capital"], "capital", problems)

    horizon = DEFAULT_HORIZON
    if "horizon" in raw:
        h = _integer(raw, "horizon", "", problems)
        if h is not None:
            if h < 1:
                problems.append(f"horizon: must be >= 1, got {h}")
            else:
                horizon = h
    n_star = DEFAULT_N_STAR
    if "N_star" in raw:
        v = _number(raw, "N_star", "", problems)
        if v is not None:
            if v <= 0:
                problems.append(f"N_star: must be > 0, got {v}")
            else:
                n_star = v

    scan = None
    if "scan" in raw:
        scan = _parse_scan(raw["scan"], problems)
    chain = None
    if "chain" in raw:
        chain = _parse_chain(raw["chain"], model, problems)

    output = raw.get("output", {})
    if not isinstance(output, dict):
        problems.append(f"output: expected an object, got {type(output).__name__}")
        output = {}

    known = {"schema_version", "model", "demography", "capital", "horizon",
             "N_star", "scan", "chain", "output"}
    for key in raw:
        if key not in known:
            problems.append(f"{key}: unknown top-level field")

    if problems:
        raise ConfigError(problems)
    return ScenarioConfig(model=model, demography=demography, capital=capital,
                          horizon=horizon, n_star=n_star, scan=scan, chain=chain,
                          output=dict(output))


def _parse_scan(block, problems: list) -> ScanGrid | None:
    if not isinstance(block, dict):
        problems.append(f"scan: expected an object, got {type(block).__name__}")
        return None
    before = len(problems)
    grids = {}
    for key, integral in (("i_grid", False), ("T_grid", True)):
        values = block.get(key)
        if not isinstance(values, list) or not values:
            problems.append(f"scan.{key}: expected a non-empty list")
            continue
        parsed = []
        for idx, v in enumerate(values):
            if integral:
                if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                    problems.append(f"scan.{key}[{idx}]: expected an integer >= 1, got {v!r}")
                    continue
                parsed.append(v)
            else:
                if isinstance(v, bool) or not isinstance(v, (int, float)) \
                        or not math.isfinite(float(v)):
                    problems.append(f"scan.{key}[{idx}]: expected a finite number, got {v!r}")
                    continue
                parsed.append(float(v))
        grids[key] = tuple(parsed)
    for key in block:
        if key not in ("i_grid", "T_grid"):
            problems.append(f"scan.{key}: unknown field")
    if len(problems) > before:
        return None
    return ScanGrid(i_grid=grids["i_grid"], T_grid=grids["T_grid"])


def _parse_chain(block, model: str, problems: list) -> ChainConfig | None:
    if model != "quasi_logistic":
        problems.append(f"chain: only supported for model 'quasi_logistic', got {model!r}")
        return None
    if not isinstance(block, dict):
        problems.append(f"chain: expected an object, got {type(block).__name__}")
        return None
    before = len(problems)
    inherit = block.get("inherit", True)
    if not isinstance(inherit, bool):
        problems.append(f"chain.inherit: expected a boolean, got {inherit!r}")
    runs_raw = block.get("runs")
    if not isinstance(runs_raw, list) or not runs_raw:
        problems.append("chain.runs: expected a non-empty list")
        runs_raw = []
    runs = []
    for idx, run in enumerate(runs_raw):
        runs.append(parse_run_spec(run, f"chain.runs[{idx}]", problems))
    for key in block:
        if key not in ("inherit", "runs"):
            problems.append(f"chain.{key}: unknown field")
    if len(problems) > before:
        return None
    return ChainConfig(inherit=inherit, runs=tuple(runs))


def parse_run_spec(run, where: str, problems: list) -> RunSpec | None:
    """One chain-run block; omitted sections inherit the previous run."""
    if not isinstance(run, dict):
        problems.append(f"{where}: expected an object, got {type(run).__name__}")
        return None
    demography = None
    if "demography" in run:
        demography = _build_demography("quasi_logistic", run["demography"],
                                       f"{where}.demography", problems)
        if demography is not None and demography.T is None:
            problems.append(f"{where}.demography.T: chain runs need a finite lock-up")
    capital = None
    if "capital" in run:
        capital = _build_capital(run["capital"], f"{where}.capital", problems)
    n_star = None
    if "N_star" in run:
        v = _number(run, "N_star", where, problems)
        if v is not None and v <= 0:
            problems.append(f"{where}.N_star: must be > 0, got {v}")
        else:
            n_star = v
    label = run.get("label", "")
    if not isinstance(label, str):
        problems.append(f"{where}.label: expected a string, got {label!r}")
        label = ""
    for key in run:
        if key not in ("demography", "capital", "N_star", "label"):
            problems.append(f"{where}.{key}: unknown field")
    return RunSpec(demography=demography, cap=capital, n_star=n_star, label=label)


def load_scenario(path) -> ScenarioConfig:
    """Load and validate a scenario file.

    Parse errors carry the line/column from the JSON decoder; semantic
    errors list every violated field.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError([f"{path}: file not found"])
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path}: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"])
    return parse_scenario(raw)


def _demography_dict(model: str, params) -> dict:
    if model == "geometric":
        return {"N0": params.N0, "n": params.n, "T": params.T}
    if model in ("quasi_logistic", "continuum"):
        return {"N0": params.N0, "N": params.N, "n": params.n, "T": params.T}
    return {"S0": params.S0, "I0": params.I0, "R0": params.R0,
            "beta": params.beta, "gamma": params.gamma, "T0": params.T0}


def _capital_dict(cap: CapitalParams) -> dict:
    return {"K0_pro": cap.K0_pro, "I0": cap.I0, "r": cap.r, "i": cap.i}


def scenario_to_dict(config: ScenarioConfig) -> dict:
    """Canonical dict form; parse(scenario_to_dict(c)) == c."""
    out = {
        "schema_version": config.schema_version,
        "model": config.model,
        "demography": _demography_dict(config.model, config.demography),
        "capital": _capital_dict(config.capital),
        "horizon": config.horizon,
        "N_star": config.n_star,
    }
    if config.scan is not None:
        out["scan"] = {"i_grid": list(config.scan.i_grid),
                       "T_grid": list(config.scan.T_grid)}
    if config.chain is not None:
        runs = []
        for spec in config.chain.runs:
            run = {}
            if spec.demography is not None:
                run["demography"] = _demography_dict("quasi_logistic", spec.demography)
            if spec.cap is not None:
                run["capital"] = _capital_dict(spec.cap)
            if spec.n_star is not None:
                run["N_star"] = spec.n_star
            if spec.label:
                run["label"] = spec.label
            runs.append(run)
        out["chain"] = {"inherit": config.chain.inherit, "runs": runs}
    if config.output:
        out["output"] = dict(config.output)
    return out


def dump_scenario(config: ScenarioConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(config), fh, indent=2)
        fh.write("\n")
