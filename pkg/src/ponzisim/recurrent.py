"""Chained no-Ponzi runs: each run's terminal capital seeds the next.

A run is a quasi-logistic scheme evaluated over its natural lifetime,
the continuous stopping time t* at which fewer than N* investors remain.
The capital handed over at t* (linearly interpolated between the
bracketing periods) becomes the next run's promoter endowment when
inheritance is on.  A collapse mid-chain ends the chain at that run;
there is no bailout.

Runs are positioned on a global time axis by accumulating the stopping
times, which yields the piecewise overall trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .capital import CapitalPath, capital_path_from_series, ql_capital_series
from .criticality import DEFAULT_N_STAR, TrafficLight, _label, termination_time
from .demography import PopulationPath, quasi_logistic_path
from .errors import InvalidParameterError
from .params import CapitalParams, QuasiLogisticParams


@dataclass(frozen=True)
class RunSpec:
    """Parameters of one run.  Fields left as None inherit the previous
    run's values (the first run must be fully specified)."""

    demography: QuasiLogisticParams | None = None
    cap: CapitalParams | None = None
    n_star: float | None = None
    label: str = ""


@dataclass(frozen=True)
class ChainRun:
    """One executed run: resolved spec, paths, outcome, stopping time."""

    spec: RunSpec
    pop: PopulationPath
    path: CapitalPath
    light: TrafficLight
    t_star: float
    offset: float

    @property
    def terminal_capital(self) -> float:
        return self.light.K_end


@dataclass(frozen=True)
class ChainResult:
    """Executed chain with the assembled global trajectory.

    status is "completed" when every run terminated benignly and
    "collapsed" when a Red run truncated the chain.  global_times /
    global_capital concatenate each run's integer-period points (shifted
    by its offset) plus its terminal hand-off point.
    """

    runs: tuple
    inherit: bool
    status: str
    global_time_offsets: np.ndarray
    global_times: np.ndarray
    global_capital: np.ndarray
    meta: dict = field(default_factory=dict)


def _interpolate(series: np.ndarray, t: float) -> float:
    lo = int(math.floor(t))
    if lo >= len(series) - 1:
        return float(series[-1])
    return float(series[lo] + (t - lo) * (series[lo + 1] - series[lo]))


def _resolve(spec: RunSpec, previous: RunSpec | None) -> RunSpec:
    if previous is None:
        if spec.demography is None or spec.cap is None:
            raise InvalidParameterError(
                ["the first run must carry both demography and capital parameters"])
        return replace(spec, n_star=spec.n_star if spec.n_star is not None else DEFAULT_N_STAR)
    return RunSpec(
        demography=spec.demography if spec.demography is not None else previous.demography,
        cap=spec.cap if spec.cap is not None else previous.cap,
        n_star=spec.n_star if spec.n_star is not None else previous.n_star,
        label=spec.label,
    )


def chain_runs(specs, inherit: bool = True) -> ChainResult:
    """Execute runs in order, propagating terminal capital when
    ``inherit`` is set.

    Each run simulates to ceil(t*) + 1 periods; its hand-off capital is
    the series interpolated at t*.  A run whose capital crosses zero at
    or before t* is Red: its trajectory is kept up to the first negative
    period and the chain stops with status "collapsed".
    """
    specs = list(specs)
    if not specs:
        raise InvalidParameterError(["specs must be non-empty"])
    runs = []
    offsets = []
    times = []
    capitals = []
    offset = 0.0
    previous: RunSpec | None = None
    endowment: float | None = None
    status = "completed"

    for raw in specs:
        spec = _resolve(raw, previous)
        cap = spec.cap
        if inherit and endowment is not None:
            cap = replace(cap, K0_pro=endowment)
            spec = replace(spec, cap=cap)
        q = spec.demography
        t_star = termination_time(q, spec.n_star)
        horizon = int(math.ceil(t_star)) + 1
        pop = quasi_logistic_path(q, horizon)
        series = ql_capital_series(q, cap, horizon)
        path = capital_path_from_series(pop, cap, series)

        collapse_time = path.collapse_time
        collapsed = collapse_time is not None and collapse_time <= t_star
        offsets.append(offset)

        if collapsed:
            stop_idx = path.collapse_index
            k_end = float(series[stop_idx])
            light = TrafficLight(_label(k_end, cap.K0_pro, True), k_end,
                                 cap.K0_pro * (1.0 + cap.i) ** collapse_time,
                                 collapse_time)
            runs.append(ChainRun(spec, pop, path, light, t_star, offset))
            times.extend(offset + t for t in range(stop_idx + 1))
            capitals.extend(series[: stop_idx + 1])
            status = "collapsed"
            break

        k_end = _interpolate(series, t_star)
        light = TrafficLight(_label(k_end, cap.K0_pro, False), k_end,
                             cap.K0_pro * (1.0 + cap.i) ** t_star, t_star)
        runs.append(ChainRun(spec, pop, path, light, t_star, offset))
        whole = int(math.floor(t_star))
        times.extend(offset + t for t in range(whole + 1))
        capitals.extend(series[: whole + 1])
        times.append(offset + t_star)
        capitals.append(k_end)

        endowment = k_end
        offset += t_star
        previous = spec

    return ChainResult(
        runs=tuple(runs),
        inherit=inherit,
        status=status,
        global_time_offsets=np.asarray(offsets),
        global_times=np.asarray(times),
        global_capital=np.asarray(capitals),
    )
