"""Critical times, outcome classification, and the viability scan.

Three events structure a run: the capital peak, the completed collapse
(zero crossing), and the orderly termination when the active count falls
to a threshold N* (< 1 investor by default).  Outcomes are labelled with
a traffic-light vocabulary:

    Red    -- collapse: capital went negative before termination
    Yellow -- investors whole, promoter worse off (0 <= K_end <= K0_pro)
    Green  -- everyone gains; the promoter below the pure-compounding
              bound K0_pro (1+i)^t_end

``npg_scan`` sweeps (market rate, lock-up) cells and marks the region in
which a quasi-logistic scheme stays solvent through its whole natural
lifetime - the no-Ponzi-game surface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .capital import CapitalParams, CapitalPath, geometric_capital, ql_capital_series
from .demography import NEVER, UNDEFINED, quasi_logistic_population_peak
from .errors import InvalidParameterError, UnreachableThresholdError
from .params import GeometricParams, QuasiLogisticParams

DEFAULT_N_STAR = 0.99

RED = "Red"
YELLOW = "Yellow"
GREEN = "Green"


@dataclass(frozen=True)
class CriticalTimes:
    """Peak / collapse / precipice triple.

    NEVER (inf) marks an event that does not occur in the given regime
    (no collapse under n >= r); UNDEFINED (nan) marks a quantity with no
    meaning there (no interior peak on a monotone decline, no precipice
    without market income).  When all three are finite,
    t_collapse = t_peak + precipice.
    """

    t_peak: float
    t_collapse: float
    precipice: float
    source: str = "formula"


@dataclass(frozen=True)
class TrafficLight:
    label: str
    K_end: float
    bound_upper: float
    t_end: float


@dataclass(frozen=True)
class NpgSurface:
    """Viability over a (market rate, lock-up) grid.

    viable[ii, ti] is True when capital stays positive on (T, t*] for
    axis_i[ii] and axis_T[ti]; labels and terminal_capital carry the
    full traffic-light outcome per cell for display.
    """

    axis_i: np.ndarray
    axis_T: np.ndarray
    viable: np.ndarray
    labels: list
    terminal_capital: np.ndarray
    n_star: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "axis_i", np.asarray(self.axis_i, dtype=float))
        object.__setattr__(self, "axis_T", np.asarray(self.axis_T, dtype=int))
        object.__setattr__(self, "viable", np.asarray(self.viable, dtype=bool))
        object.__setattr__(self, "terminal_capital",
                           np.asarray(self.terminal_capital, dtype=float))
        if self.viable.shape != (len(self.axis_i), len(self.axis_T)):
            raise InvalidParameterError(
                [f"viable matrix shape {self.viable.shape} does not match axes "
                 f"({len(self.axis_i)}, {len(self.axis_T)})"])


# ---------------------------------------------------------------------------
# geometric critical times
# ---------------------------------------------------------------------------

def geometric_critical_times(g: GeometricParams, cap: CapitalParams) -> CriticalTimes:
    """Peak, collapse, and precipice for constant-rate demography.

    Under n >= r deposits cover coupons forever: no collapse (NEVER).
    Under r > n the collapse time solves K_t = 0 in closed form, in the
    pre-exit regime

        t_collapse = log(1 + (n-i)/(r-n) * K0/(N0 I0)) / log((1+n)/(1+i))

    and, when the crossing lands past the lock-up, the post-exit variant
    seeded by K_T.  The peak-to-collapse span (needs n, i > 0)

        precipice = log(n/i) / log((1+n)/(1+i)) - 1

    gives t_peak = t_collapse - precipice.  Degenerate corners: n = i = 0
    declines linearly and collapses at K0/(N0 I0 r); i = 0 declines
    without an interior peak, so peak and precipice are UNDEFINED.
    """
    n, i, r = g.n, cap.i, cap.r
    N0I0 = g.N0 * cap.I0
    K0 = cap.initial_capital(g.N0)
    if r <= 0 or n >= r:
        return CriticalTimes(NEVER, NEVER, UNDEFINED)
    if n == 0.0 and i == 0.0:
        return CriticalTimes(UNDEFINED, K0 / (N0I0 * r), UNDEFINED)

    resonant = n == i

    def _pre_exit_collapse() -> float:
        if resonant:
            return K0 * (1.0 + i) / (N0I0 * (r - n))
        arg = 1.0 + (n - i) / (r - n) * K0 / N0I0
        if arg <= 0.0:
            return NEVER
        t = math.log(arg) / (math.log1p(n) - math.log1p(i))
        return t if t >= 0.0 else NEVER

    pre_collapse = _pre_exit_collapse()
    t_collapse = pre_collapse
    if g.T is not None and t_collapse > g.T:
        K_T = geometric_capital(g, cap, g.T)
        if K_T < 0.0:
            t_collapse = float(g.T)
        elif resonant:
            eta = 1.0 - (1.0 + n) ** (-g.T)
            drain = N0I0 * (r - n) * eta * (1.0 + i) ** (g.T - 1)
            t_collapse = g.T + K_T / drain
        else:
            ratio = math.log1p(n) - math.log1p(i)
            arg = 1.0 + (n - i) / (r - n) * K_T / N0I0 / ((1.0 + n) ** g.T - 1.0)
            t_collapse = math.log(arg) / ratio + g.T if arg > 0.0 else NEVER

    if i <= 0.0 or n <= 0.0:
        # no market income (or flat entry) never produces an interior peak
        return CriticalTimes(UNDEFINED, t_collapse, UNDEFINED)
    precipice = (1.0 / i if resonant
                 else math.log(n / i) / (math.log1p(n) - math.log1p(i)) - 1.0)

    # the peak exists only if the capital rises at all: i K0 > N0 I0 (r-n)
    if cap.i * K0 + N0I0 * (n - r) <= 0.0:
        return CriticalTimes(UNDEFINED, t_collapse, UNDEFINED)
    if not math.isfinite(t_collapse):
        return CriticalTimes(NEVER, NEVER, precipice)
    # t_collapse = t_peak + precipice holds branch by branch; when the
    # collapse sits past the lock-up but the peak falls before it, the
    # peak follows the pre-exit branch instead
    t_peak = t_collapse - precipice
    if math.isfinite(pre_collapse) and g.T is not None and t_collapse > g.T:
        pre_peak = pre_collapse - precipice
        if pre_peak < g.T:
            t_peak = pre_peak
    if t_peak < 0.0:
        return CriticalTimes(UNDEFINED, t_collapse, UNDEFINED)
    return CriticalTimes(t_peak, t_collapse, precipice)


# ---------------------------------------------------------------------------
# outcome classification
# ---------------------------------------------------------------------------

def _label(k_end: float, k0_pro: float, collapsed: bool) -> str:
    if collapsed or k_end < 0.0:
        return RED
    if k_end <= k0_pro:
        return YELLOW
    return GREEN


def classify(path: CapitalPath, cap: CapitalParams) -> TrafficLight:
    """Traffic-light label of a terminated capital path.

    Evaluated at the path's termination index; a collapse anywhere up to
    that index forces Red.  The Green upper bound compounds the promoter
    endowment to the termination index.  A path that neither collapsed
    nor reached its population threshold has not terminated and cannot
    be classified.
    """
    t_end = path.termination_index
    collapse = path.collapse_index
    collapsed = collapse is not None and collapse <= t_end
    if not collapsed and not path.meta.get("threshold_hit", False):
        raise InvalidParameterError(
            ["path did not run to termination (no collapse and the active count "
             "never fell below the threshold)"])
    k_end = path.terminal_capital
    bound = cap.K0_pro * (1.0 + cap.i) ** t_end
    return TrafficLight(_label(k_end, cap.K0_pro, collapsed), k_end, bound, float(t_end))


# ---------------------------------------------------------------------------
# termination-time inversion
# ---------------------------------------------------------------------------

def termination_time(q: QuasiLogisticParams, n_star: float = DEFAULT_N_STAR,
                     branch: str = "post", prefactor: str = "log") -> float:
    """Continuous-index time at which the active hump crosses n_star.

    Solving active(t) = n_star for t >= T reduces to a quadratic in
    x = (1+n)^t with

        A = n_star theta,  B = mu (n_star (1+theta) - N (1-theta)),
        C = n_star mu^2,   theta = (1+n)^-T,  mu = (N-N0)/N0,

    whose roots x = u± sit on either side of the hump maximum
    (branch "pre"/"post").  The default prefactor maps the root back via
    t = log(u)/log(1+n); prefactor="alt" keeps the variant t = log(u)/(1+n)
    for comparison (the log form is the one that round-trips the
    population curve).
    """
    if q.T is None:
        raise InvalidParameterError(["termination inversion needs a finite lock-up T"])
    if not (n_star > 0.0):
        raise InvalidParameterError([f"n_star must be > 0, got {n_star}"])
    if branch not in ("pre", "post"):
        raise InvalidParameterError([f"branch must be 'pre' or 'post', got {branch!r}"])
    if prefactor not in ("log", "alt"):
        raise InvalidParameterError([f"prefactor must be 'log' or 'alt', got {prefactor!r}"])
    theta = (1.0 + q.n) ** (-q.T)
    mu = (q.N - q.N0) / q.N0
    A = n_star * theta
    B = mu * (n_star * (1.0 + theta) - q.N * (1.0 - theta))
    C = n_star * mu * mu
    disc = B * B - 4.0 * A * C
    if disc < 0.0:
        raise UnreachableThresholdError(
            f"threshold {n_star} exceeds the hump maximum (discriminant {disc:.3g} < 0)")
    root = math.sqrt(disc)
    u = (-B + root) / (2.0 * A) if branch == "post" else (-B - root) / (2.0 * A)
    if u <= 0.0:
        raise UnreachableThresholdError(f"no positive root for threshold {n_star}")
    if prefactor == "log":
        return math.log(u) / math.log(1.0 + q.n)
    return math.log(u) / (1.0 + q.n)


# ---------------------------------------------------------------------------
# no-Ponzi-game surface
# ---------------------------------------------------------------------------

def _interpolate(series: np.ndarray, t: float) -> float:
    lo = int(math.floor(t))
    if lo >= len(series) - 1:
        return float(series[-1])
    return float(series[lo] + (t - lo) * (series[lo + 1] - series[lo]))


def run_to_termination(q: QuasiLogisticParams, cap: CapitalParams,
                       n_star: float = DEFAULT_N_STAR):
    """Closed-form capital of one cell, evaluated through its natural
    lifetime t* = termination_time(n_star).

    Returns (t_star, capital series over 0..ceil(t_star), K at t*,
    viable flag).  Viable means K_t > 0 for every period in (T, t*],
    including the interpolated endpoint.
    """
    t_star = termination_time(q, n_star)
    horizon = max(int(math.ceil(t_star)), q.T + 1)
    series = ql_capital_series(q, cap, horizon)
    k_end = _interpolate(series, t_star)
    inside = series[q.T + 1: int(math.floor(t_star)) + 1]
    viable = bool(np.all(inside > 0.0)) and k_end > 0.0
    return t_star, series, k_end, viable


def npg_scan(q: QuasiLogisticParams, cap: CapitalParams,
             i_grid, T_grid, n_star: float = DEFAULT_N_STAR) -> NpgSurface:
    """Sweep market rate x lock-up and mark the no-Ponzi-game region.

    The demography's own T and the capital record's own i are ignored in
    favour of the grid values.  Cells are independent (pure functions),
    so the sweep is trivially parallelizable; evaluation here is a plain
    loop.
    """
    i_grid = list(i_grid)
    T_grid = [int(T) for T in T_grid]
    if not i_grid or not T_grid:
        raise InvalidParameterError(["i_grid and T_grid must be non-empty"])
    viable = np.zeros((len(i_grid), len(T_grid)), dtype=bool)
    k_end = np.zeros_like(viable, dtype=float)
    labels = [[None] * len(T_grid) for _ in i_grid]
    for ti, T in enumerate(T_grid):
        q_cell = replace(q, T=T)
        for ii, i_rate in enumerate(i_grid):
            cap_cell = replace(cap, i=i_rate)
            t_star, _, k, ok = run_to_termination(q_cell, cap_cell, n_star)
            viable[ii, ti] = ok
            k_end[ii, ti] = k
            labels[ii][ti] = _label(k, cap.K0_pro, collapsed=not ok)
    return NpgSurface(i_grid, T_grid, viable, labels, k_end, n_star,
                      meta={"K0_pro": cap.K0_pro, "r": cap.r})
