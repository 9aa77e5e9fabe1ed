"""Population paths for the three demographic laws.

Every law fills the same ledger: at the start of period t the active
count gains the entrants and loses the leavers,

    active[t] = active[t-1] + entering[t] - exiting[t],

with entering[0] = N0 and exiting[0] = 0.  What differs is how entrants
arrive and how leavers depart:

* geometric   -- entrants grow at the constant rate n forever; each
                 cohort leaves exactly T periods after it joined.
* quasi-logistic -- entrants are proportional to the active count at a
                 rate that decays sigmoidally as a finite pool N fills;
                 cohorts again leave after T periods, which turns the
                 sigmoid into a hump.
* SIR variants -- entrants come from a susceptible pool via a contagion
                 rate beta, leavers depart at a recovery rate gamma
                 (proportional to the current actives, not to a cohort).

Each law is provided both in closed form and as the defining step-by-step
recursion; the recursion is the ground truth the closed forms are tested
against.  All functions are pure and all returned paths are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError
from .params import GeometricParams, QuasiLogisticParams, SirParams

DEFAULT_HORIZON = 200

#: Event that never occurs at finite time (e.g. the peak of an unbounded
#: sigmoid).
NEVER = math.inf

#: Quantity that is not defined in the given regime (e.g. the peak of a
#: monotonically declining series).
UNDEFINED = math.nan


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PopulationPath:
    """Per-period series of a demographic law.

    active[t] is the number of invested participants at time t,
    entering/exiting are the per-period flows, and pool_remaining is the
    untapped reservoir (susceptibles for SIR, N minus current minus
    former investors for the quasi-logistic law; None where the model has
    no finite pool).  ``source`` records how the series was produced:
    "closed_form", "recursion", or "iterative" (laws with no closed form).
    """

    active: np.ndarray
    entering: np.ndarray
    exiting: np.ndarray
    pool_remaining: np.ndarray | None
    source: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "active", _frozen(self.active))
        object.__setattr__(self, "entering", _frozen(self.entering))
        object.__setattr__(self, "exiting", _frozen(self.exiting))
        if self.pool_remaining is not None:
            object.__setattr__(self, "pool_remaining", _frozen(self.pool_remaining))

    @property
    def horizon(self) -> int:
        return len(self.active) - 1

    def effective_growth_rate(self) -> np.ndarray:
        """Per-period multiplier minus one of the active series."""
        return self.active[1:] / self.active[:-1] - 1.0


def _check_horizon(horizon: int):
    if not isinstance(horizon, int) or isinstance(horizon, bool) or horizon < 1:
        raise InvalidParameterError([f"horizon must be an integer >= 1, got {horizon!r}"])


# ---------------------------------------------------------------------------
# geometric growth
# ---------------------------------------------------------------------------

def geometric_path(params: GeometricParams, horizon: int = DEFAULT_HORIZON) -> PopulationPath:
    """Closed-form geometric path.

    active_t = N0 (1+n)^t before the first exits and
    N0 (1+n)^t (1 - (1+n)^-T) from t = T on; entrants are
    N0 (1+n)^(t-1) n and leavers are the entrants of T periods earlier.
    """
    _check_horizon(horizon)
    N0, n, T = params.N0, params.n, params.T
    t = np.arange(horizon + 1)
    growth = (1.0 + n) ** t

    entering = np.empty(horizon + 1)
    entering[0] = N0
    entering[1:] = N0 * growth[:-1] * n

    exiting = np.zeros(horizon + 1)
    if T is not None and horizon >= T:
        exiting[T:] = entering[: horizon + 1 - T]

    active = N0 * growth
    if T is not None and horizon >= T:
        active[T:] *= 1.0 - (1.0 + n) ** (-T)

    return PopulationPath(active, entering, exiting, None, "closed_form")


def geometric_path_recursion(params: GeometricParams, horizon: int = DEFAULT_HORIZON) -> PopulationPath:
    """Step-by-step oracle: entrants compound one period at a time and the
    ledger recursion accumulates the active count."""
    _check_horizon(horizon)
    N0, n, T = params.N0, params.n, params.T
    active = [N0]
    entering = [N0]
    exiting = [0.0]
    for t in range(1, horizon + 1):
        inflow = n * N0 if t == 1 else (1.0 + n) * entering[t - 1]
        outflow = entering[t - T] if (T is not None and t >= T) else 0.0
        entering.append(inflow)
        exiting.append(outflow)
        active.append(active[t - 1] + inflow - outflow)
    return PopulationPath(active, entering, exiting, None, "recursion")


# ---------------------------------------------------------------------------
# quasi-logistic growth
# ---------------------------------------------------------------------------

def quasi_logistic_rate(params: QuasiLogisticParams, t: float) -> float:
    """Decaying entry rate n_t = n (1 - N0/N) / (1 + (N0/N)((1+n)^t - 1)).

    Starts near n, halves at the turning point, and tends to zero.
    """
    nu = params.pool_fraction
    return params.n * (1.0 - nu) / (1.0 + nu * ((1.0 + params.n) ** t - 1.0))


def quasi_logistic_turning_point(params: QuasiLogisticParams) -> float:
    """Time at which the entry rate has dropped to n/2:
    log(N/N0 - 1) / log(1+n)."""
    return math.log(params.N / params.N0 - 1.0) / math.log(1.0 + params.n)


def quasi_logistic_count(params: QuasiLogisticParams, t: float) -> float:
    """Pre-withdrawal active count at (possibly fractional) time t:
    the logistic-shaped sequence N0 (1+n)^t / (1 - N0/N + (N0/N)(1+n)^t).
    """
    nu = params.pool_fraction
    x = (1.0 + params.n) ** t
    return params.N0 * x / (1.0 - nu + nu * x)


def quasi_logistic_active(params: QuasiLogisticParams, t: float) -> float:
    """Active count at fractional time t including post-lock-up exits.

    For t >= T this is the hump N^<(t) - N^<(t-T), evaluated in a
    product form that avoids cancellation between two near-pool values.
    """
    T = params.T
    if T is None or t < T:
        return quasi_logistic_count(params, t)
    mu = (params.N - params.N0) / params.N0
    x = (1.0 + params.n) ** t
    theta = (1.0 + params.n) ** (-T)
    return params.N * x * mu * (1.0 - theta) / ((x + mu) * (x * theta + mu))


def quasi_logistic_population_peak(params: QuasiLogisticParams) -> float:
    """Location of the participation hump, (T+1)/2 + log(N/N0-1)/log(1+n).

    Derived from the discrete condition active_t = active_{t-1}; with an
    unbounded lock-up the sigmoid never peaks and NEVER is returned.
    """
    if params.T is None:
        return NEVER
    return (params.T + 1) / 2.0 + quasi_logistic_turning_point(params)


def quasi_logistic_path(params: QuasiLogisticParams, horizon: int = DEFAULT_HORIZON) -> PopulationPath:
    """Closed-form quasi-logistic path.

    entering[t] = N^<_{t-1} n_t and exiting[t] = entering[t-T] (so the
    initial cohort of N0 leaves exactly at t = T).
    """
    _check_horizon(horizon)
    N0, N, n, T = params.N0, params.N, params.n, params.T
    nu = N0 / N
    t = np.arange(horizon + 1)
    x = (1.0 + n) ** t
    rate = n * (1.0 - nu) / (1.0 + nu * (x - 1.0))            # n_t
    count = N0 * x / (1.0 - nu + nu * x)                      # N^<_t

    entering = np.empty(horizon + 1)
    entering[0] = N0
    entering[1:] = count[:-1] * rate[1:]

    exiting = np.zeros(horizon + 1)
    active = count.copy()
    mu = (N - N0) / N0
    if T is not None and horizon >= T:
        exiting[T:] = entering[: horizon + 1 - T]
        theta = (1.0 + n) ** (-T)
        xs = x[T:]
        active[T:] = N * xs * mu * (1.0 - theta) / ((xs + mu) * (xs * theta + mu))

    # untapped pool N - active - cumulative exits telescopes to N - N^<_t;
    # this form avoids the cancellation of the direct subtraction
    pool = N * mu / (x + mu)
    return PopulationPath(active, entering, exiting, pool, "closed_form")


def quasi_logistic_path_recursion(params: QuasiLogisticParams, horizon: int = DEFAULT_HORIZON) -> PopulationPath:
    """Step-by-step oracle: the pre-withdrawal count grows by its own
    recursion N^<_t = (1+n_t) N^<_{t-1} and the ledger recursion does the
    rest."""
    _check_horizon(horizon)
    N0, T = params.N0, params.T
    count = N0
    active = [N0]
    entering = [N0]
    exiting = [0.0]
    for t in range(1, horizon + 1):
        rate = quasi_logistic_rate(params, t)
        inflow = count * rate
        count = count * (1.0 + rate)
        outflow = entering[t - T] if (T is not None and t >= T) else 0.0
        entering.append(inflow)
        exiting.append(outflow)
        active.append(active[t - 1] + inflow - outflow)
    pool = params.N - np.asarray(active) - np.cumsum(exiting)
    return PopulationPath(active, entering, exiting, pool, "recursion")


# ---------------------------------------------------------------------------
# SIR variants
# ---------------------------------------------------------------------------

def sir_standard_path(params: SirParams, horizon: int = DEFAULT_HORIZON) -> PopulationPath:
    """Classic three-compartment update; iterative only, no closed form.

    S_t = S_{t-1} - beta S_{t-1} I_{t-1} / N
    I_t = I_{t-1} + beta S_{t-1} I_{t-1} / N - gamma I_{t-1}
    R_t = N - S_t - I_t   (conservation holds exactly by construction)
    """
    _check_horizon(horizon)
    if params.T0 != 0:
        raise InvalidParameterError(
            ["the standard law supports T0=0 only; delayed recovery is a non-standard variant"])
    if params.population <= 0:
        raise InvalidParameterError(["total population S0+I0+R0 must be > 0"])
    N = params.population
    S, I = params.S0, params.I0
    s_series = [S]
    active = [I]
    entering = [I]
    exiting = [0.0]
    for _ in range(horizon):
        inflow = params.beta * S / N * I
        outflow = params.gamma * I
        S = S - inflow
        I = I + inflow - outflow
        s_series.append(S)
        active.append(I)
        entering.append(inflow)
        exiting.append(outflow)
    return PopulationPath(active, entering, exiting, s_series, "iterative",
                          meta={"law": "sir_standard", "iterative_only": True})


def sir_recovered(path: PopulationPath, population: float) -> np.ndarray:
    """Exited compartment of a SIR-type path, N - (S + I).

    Evaluated in exactly this order so the conservation check
    (S + I) + R == N holds to the last bit.
    """
    return population - (path.pool_remaining + path.active)


def _nssir_gamma_at(params: SirParams, t: int) -> float:
    """Recovery rate in period t: zero during the onset delay."""
    return 0.0 if t <= params.T0 else params.gamma


def nssir_path_recursion(params: SirParams, horizon: int = DEFAULT_HORIZON) -> PopulationPath:
    """Defining recursion of the non-standard law (oracle).

    The update couples the new compartment values, so each step solves
    them out:

        S_t = S_{t-1} / (1 + beta I_{t-1} / (S_{t-1} + I_{t-1}))
        I_t = (I_{t-1} + beta S_t I_{t-1} / (S_{t-1} + I_{t-1})) / (1 + gamma_t)

    with gamma_t = 0 while t <= T0.  R stays N - S - I throughout.
    """
    _check_horizon(horizon)
    if params.S0 <= 0 or params.I0 <= 0:
        raise InvalidParameterError(["the non-standard law needs S0 > 0 and I0 > 0"])
    S, I = params.S0, params.I0
    s_series = [S]
    active = [I]
    entering = [I]
    exiting = [0.0]
    for t in range(1, horizon + 1):
        g = _nssir_gamma_at(params, t)
        remaining = S + I                      # N - R_{t-1}
        S_new = S / (1.0 + params.beta * I / remaining)
        inflow = params.beta * S_new / remaining * I
        I_new = (I + inflow) / (1.0 + g)
        outflow = g * I_new
        S, I = S_new, I_new
        s_series.append(S)
        active.append(I)
        entering.append(inflow)
        exiting.append(outflow)
    return PopulationPath(active, entering, exiting, s_series, "recursion")


def _nssir_compartments(params: SirParams, horizon: int):
    """Exact S and I series of the non-standard law.

    Within the onset delay (recovery off) the running product collapses
    to a rational expression; afterwards the product solution restarts
    from the delay-end state.  Returns (S, I) as lists of length
    horizon+1.
    """
    S0, I0, beta, gamma, T0 = params.S0, params.I0, params.beta, params.gamma, params.T0
    if S0 <= 0 or I0 <= 0:
        raise InvalidParameterError(["the non-standard law needs S0 > 0 and I0 > 0"])
    S = [S0]
    I = [I0]
    ratio0 = I0 / S0
    debug_product = 1.0
    for t in range(1, min(T0, horizon) + 1):
        grown = (1.0 + beta) ** t
        pt = (1.0 + ratio0) / (1.0 + ratio0 * grown)
        if __debug__:
            k_ratio = S0 / I0 * (1.0 + beta) ** (-(t - 1))
            debug_product *= (1.0 + k_ratio) / (1.0 + beta + k_ratio)
            assert abs(pt - debug_product) <= 1e-9 * abs(debug_product)
        S.append(S0 * pt)
        I.append(I0 * grown * pt)
    if horizon > T0:
        S_d, I_d = S[T0], I[T0]
        shrink = (1.0 + gamma) / (1.0 + beta)
        product = 1.0
        for k in range(1, horizon - T0 + 1):
            lever = S_d / I_d * shrink ** (k - 1)
            product *= (1.0 + lever) / (1.0 + beta + lever)
            S.append(S_d * product)
            I.append(I_d * shrink ** (-k) * product)
    return S, I


def nssir_path(params: SirParams, horizon: int = DEFAULT_HORIZON) -> PopulationPath:
    """Closed-form non-standard path (exact product solution).

    Flows are read off the compartments: entering[t] =
    beta S_t I_{t-1} / (S_{t-1} + I_{t-1}) and exiting[t] = gamma_t I_t.
    """
    _check_horizon(horizon)
    S, I = _nssir_compartments(params, horizon)
    entering = [params.I0]
    exiting = [0.0]
    for t in range(1, horizon + 1):
        g = _nssir_gamma_at(params, t)
        entering.append(params.beta * S[t] * I[t - 1] / (S[t - 1] + I[t - 1]))
        exiting.append(g * I[t])
    return PopulationPath(I, entering, exiting, S, "closed_form")


def nssir_infection_peak(params: SirParams) -> float:
    """Time of the infection maximum for the immediate-recovery law:

        log( gamma (1+gamma) / (beta - gamma) * I0/S0 )
        / log( (1+gamma) / (1+beta) )

    Requires beta > gamma > 0 and a log argument in (0, 1).  With
    gamma = 0 the actives grow toward the pool forever (NEVER); if the
    argument is >= 1 the series declines from the start (UNDEFINED).
    """
    if params.T0 != 0:
        raise InvalidParameterError(["the peak formula applies to the immediate-recovery law (T0=0)"])
    beta, gamma = params.beta, params.gamma
    if gamma == 0.0:
        return NEVER if beta > 0 else UNDEFINED
    if beta <= gamma:
        return UNDEFINED
    arg = gamma * (1.0 + gamma) / (beta - gamma) * params.I0 / params.S0
    if arg >= 1.0:
        return UNDEFINED
    return math.log(arg) / math.log((1.0 + gamma) / (1.0 + beta))
