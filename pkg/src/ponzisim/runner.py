"""Verb implementations shared by the CLI and the HTTP service.

Each function takes a validated ScenarioConfig and returns plain data
(dataclasses of arrays/rows) that the CLI writes to files and the
service returns as JSON.  Keeping both front ends on the same functions
guarantees their outputs agree byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import capital as cap_mod
from . import continuum as cont_mod
from . import demography as dem_mod
from .criticality import (
    CriticalTimes,
    NpgSurface,
    TrafficLight,
    _label,
    classify,
    geometric_critical_times,
    npg_scan,
    termination_time,
)
from .errors import ConfigError
from .exports import SERIES_COLUMNS, continuum_rows, render_csv, series_rows
from .recurrent import ChainResult, chain_runs
from .scenario import ScenarioConfig

_PATH_BUILDERS = {
    "geometric": (dem_mod.geometric_path, cap_mod.geometric_capital_series),
    "quasi_logistic": (dem_mod.quasi_logistic_path, cap_mod.ql_capital_series),
    "nssir": (dem_mod.nssir_path, cap_mod.nssir_capital_series),
}


@dataclass(frozen=True)
class SimulationResult:
    config: ScenarioConfig
    pop: object
    path: object
    light: TrafficLight
    csv: str

    @property
    def rows(self):
        return series_rows(self.pop, self.path, self.light)


def simulate_scenario(config: ScenarioConfig) -> SimulationResult:
    """Population + capital series for the configured model, classified
    at its termination index (threshold crossing or horizon)."""
    model = config.model
    if model == "continuum":
        raise ConfigError(["simulate: use the 'continuum' verb for the continuous model"])
    if model == "sir_standard":
        pop = dem_mod.sir_standard_path(config.demography, config.horizon)
        path = cap_mod.budget_recursion_oracle(pop, config.capital, n_star=config.n_star)
    else:
        builder, closed = _PATH_BUILDERS[model]
        pop = builder(config.demography, config.horizon)
        series = closed(config.demography, config.capital, config.horizon)
        path = cap_mod.capital_path_from_series(pop, config.capital, series,
                                                n_star=config.n_star)
    light = _classify_lenient(path, config)
    csv = render_csv(series_rows(pop, path, light))
    return SimulationResult(config, pop, path, light, csv)


def _classify_lenient(path, config: ScenarioConfig) -> TrafficLight:
    """Label a run even when it only ran out to the horizon (geometric
    growth never drops below the threshold, yet still deserves a label
    at its cutoff)."""
    from .errors import InvalidParameterError

    try:
        return classify(path, config.capital)
    except InvalidParameterError:
        t_end = path.termination_index
        collapse = path.collapse_index
        collapsed = collapse is not None and collapse <= t_end
        k_end = path.terminal_capital
        return TrafficLight(_label(k_end, config.capital.K0_pro, collapsed),
                            k_end,
                            config.capital.K0_pro * (1.0 + config.capital.i) ** t_end,
                            float(t_end))


def scan_scenario(config: ScenarioConfig) -> NpgSurface:
    if config.model != "quasi_logistic":
        raise ConfigError(["scan: only supported for model 'quasi_logistic'"])
    if config.scan is None:
        raise ConfigError(["scan: config carries no scan section"])
    return npg_scan(config.demography, config.capital,
                    config.scan.i_grid, config.scan.T_grid, config.n_star)


def chain_scenario(config: ScenarioConfig) -> ChainResult:
    if config.chain is None:
        raise ConfigError(["chain: config carries no chain section"])
    return chain_runs(config.chain.runs, inherit=config.chain.inherit)


@dataclass(frozen=True)
class ContinuumResult:
    params: cont_mod.ContinuumParams
    t_star: float
    samples: list
    light: TrafficLight
    csv: str


def continuum_scenario(config: ScenarioConfig) -> ContinuumResult:
    """Sample the continuous model from 0 to its stopping time."""
    if config.model != "continuum":
        raise ConfigError(["continuum: config model must be 'continuum'"])
    uncompounded = bool(config.output.get("uncompounded_constants", False))
    step = float(config.output.get("step", 1.0))
    if step <= 0:
        raise ConfigError(["output.step: must be > 0"])
    params = cont_mod.ContinuumParams.from_discrete(config.demography, config.capital)
    t_star = min(cont_mod.continuous_inverse_time(params, config.n_star),
                 float(config.horizon))
    times = [k * step for k in range(int(math.floor(t_star / step)) + 1)]
    if times[-1] < t_star:
        times.append(t_star)

    samples = []
    collapsed = False
    for t in times:
        agg = _continuum_aggregates(params, t, uncompounded)
        if agg["capital"] < 0.0:
            collapsed = True
        samples.append({
            "t": t,
            "N_t": cont_mod.continuous_population(params, t),
            "dN_in": cont_mod.continuous_inflow_rate(params, t),
            "dN_out": cont_mod.continuous_outflow_rate(params, t),
            "K_t": agg["capital"],
            "agg_interest": agg["interest"],
            "agg_deposits": agg["deposits"],
            "agg_coupons": agg["coupons"],
            "agg_withdrawals": agg["withdrawals"],
        })
    k_end = samples[-1]["K_t"]
    light = TrafficLight(_label(k_end, config.capital.K0_pro, collapsed),
                         k_end,
                         config.capital.K0_pro * math.exp(params.p * t_star),
                         t_star)
    csv = render_csv(continuum_rows(samples, light.label))
    return ContinuumResult(params, t_star, samples, light, csv)


def _continuum_aggregates(params, t: float, uncompounded: bool) -> dict:
    if not uncompounded:
        return cont_mod.continuous_aggregates(params, t)
    agg = cont_mod.continuous_aggregates(params, t)
    capital = cont_mod.continuous_capital(params, t, uncompounded_constants=True)
    interest = capital - params.K0 - agg["deposits"] + agg["coupons"] + agg["withdrawals"]
    out = dict(agg)
    out["capital"] = capital
    out["interest"] = interest
    return out


@dataclass(frozen=True)
class CriticalReport:
    model: str
    times: CriticalTimes
    t_star: float | None


def critical_scenario(config: ScenarioConfig) -> CriticalReport:
    """Critical-times report: closed formulas for the geometric model,
    numeric argmax / sign change on the closed-form series otherwise."""
    model = config.model
    if model == "geometric":
        times = geometric_critical_times(config.demography, config.capital)
        return CriticalReport(model, times, None)
    if model == "continuum":
        raise ConfigError(["critical: not defined for the continuous model; "
                           "sample it with the continuum verb"])
    result = simulate_scenario(config)
    series = result.path.capital
    peak_idx = int(np.argmax(series))
    t_peak = float(peak_idx) if 0 < peak_idx < len(series) - 1 else dem_mod.UNDEFINED
    collapse = result.path.collapse_time
    t_collapse = collapse if collapse is not None else dem_mod.NEVER
    precipice = (t_collapse - t_peak
                 if math.isfinite(t_collapse) and math.isfinite(t_peak)
                 else dem_mod.UNDEFINED)
    t_star = None
    if model == "quasi_logistic" and config.demography.T is not None:
        t_star = termination_time(config.demography, config.n_star)
    return CriticalReport(model, CriticalTimes(t_peak, t_collapse, precipice,
                                               source="numeric"), t_star)


# ---------------------------------------------------------------------------
# JSON shapes shared by the CLI artifacts and the service payloads
# ---------------------------------------------------------------------------

def simulation_payload(result: SimulationResult) -> dict:
    return {
        "schema_version": 1,
        "model": result.config.model,
        "columns": list(SERIES_COLUMNS),
        "rows": result.rows,
        "csv": result.csv,
        "label": result.light.label,
        "termination_index": result.path.termination_index,
        "terminal_capital": result.light.K_end,
        "bound_upper": result.light.bound_upper,
        "collapse_time": result.path.collapse_time,
    }


def surface_payload(surface: NpgSurface) -> dict:
    return {
        "schema_version": 1,
        "axis_i": [float(v) for v in surface.axis_i],
        "axis_T": [int(v) for v in surface.axis_T],
        "viable": surface.viable.astype(int).tolist(),
        "labels": surface.labels,
        "terminal_capital": surface.terminal_capital.tolist(),
        "N_star": surface.n_star,
        "meta": surface.meta,
    }


def run_payload(run) -> dict:
    spec = run.spec
    return {
        "label": spec.label,
        "demography": {"N0": spec.demography.N0, "N": spec.demography.N,
                       "n": spec.demography.n, "T": spec.demography.T},
        "capital": {"K0_pro": spec.cap.K0_pro, "I0": spec.cap.I0,
                    "r": spec.cap.r, "i": spec.cap.i},
        "N_star": spec.n_star,
        "t_star": run.t_star,
        "offset": run.offset,
        "light": {"label": run.light.label, "K_end": run.light.K_end,
                  "bound_upper": run.light.bound_upper, "t_end": run.light.t_end},
        "collapse_time": run.path.collapse_time,
    }


def chain_payload(result: ChainResult, chain_id: str | None = None) -> dict:
    payload = {
        "schema_version": 1,
        "status": result.status,
        "inherit": result.inherit,
        "runs": [run_payload(r) for r in result.runs],
        "global_time_offsets": result.global_time_offsets.tolist(),
        "global_times": result.global_times.tolist(),
        "global_capital": result.global_capital.tolist(),
    }
    if chain_id is not None:
        payload["chain_id"] = chain_id
    return payload


def critical_payload(report: CriticalReport) -> dict:
    def encode(x):
        if x is None or math.isfinite(x):
            return x
        return "never" if math.isinf(x) else "undefined"

    return {
        "schema_version": 1,
        "model": report.model,
        "t_peak": encode(report.times.t_peak),
        "t_collapse": encode(report.times.t_collapse),
        "precipice": encode(report.times.precipice),
        "source": report.times.source,
        "t_star": report.t_star,
    }
