"""Capital evolution on top of a demographic law.

Every model shares one budget recursion: pooled assets compound at the
market rate i while liabilities stay non-compounding, so

    K_t = (1+i) K_{t-1} + (entering_t - exiting_t - r * active_{t-1}) * I0,

with K_0 = K0_pro + I0 * N0.  ``budget_recursion_oracle`` runs this
recursion verbatim over any population path and is the ground truth that
every closed form below must reproduce.

The closed forms follow one pattern: the discounted flow terms are summed
once (compensated, fixed left-to-right order) and the capital at t is the
compound factor times (K0 + I0 N0 * partial sum), with a lock-up
correction once the first cohort has been repaid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .demography import (
    NEVER,
    UNDEFINED,
    PopulationPath,
    _nssir_compartments,
    geometric_path,
    nssir_path,
    quasi_logistic_path,
)
from .errors import HorizonMismatchError, InvalidParameterError
from .linrec import ExponentialTerm, RecurrenceSpec, solve_linear_recurrence
from .params import CapitalParams, GeometricParams, QuasiLogisticParams, SirParams


def _frozen(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


def _kahan_cumsum(terms: np.ndarray) -> np.ndarray:
    """Compensated running sum, left to right (reproducible order)."""
    out = np.empty(len(terms))
    total = 0.0
    comp = 0.0
    for k, x in enumerate(terms):
        y = x - comp
        t = total + y
        comp = (t - total) - y
        total = t
        out[k] = total
    return out


@dataclass(frozen=True)
class CapitalPath:
    """Capital series with its aggregated in/out flows.

    The aggregates accumulate from t=1 (the initial deposits N0*I0 are
    part of K_0, not of agg_deposits), so at every index

        K_t = K_0 + agg_interest - agg_coupons
                  + agg_deposits - agg_withdrawals.

    termination_index is the first t whose active count fell below the
    threshold the path was built with (or the horizon if it never does).
    """

    capital: np.ndarray
    agg_interest: np.ndarray
    agg_deposits: np.ndarray
    agg_coupons: np.ndarray
    agg_withdrawals: np.ndarray
    termination_index: int
    n_star: float | None
    source: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("capital", "agg_interest", "agg_deposits",
                     "agg_coupons", "agg_withdrawals"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @property
    def horizon(self) -> int:
        return len(self.capital) - 1

    @property
    def initial_capital(self) -> float:
        return float(self.capital[0])

    @property
    def terminal_capital(self) -> float:
        return float(self.capital[self.termination_index])

    @property
    def collapse_index(self) -> int | None:
        """First index with negative capital, or None."""
        below = np.nonzero(self.capital < 0.0)[0]
        return int(below[0]) if len(below) else None

    @property
    def collapse_time(self) -> float | None:
        """Zero crossing, linearly interpolated between the last
        non-negative and first negative index."""
        idx = self.collapse_index
        if idx is None:
            return None
        if idx == 0:
            return 0.0
        k_prev, k_next = self.capital[idx - 1], self.capital[idx]
        return idx - 1 + k_prev / (k_prev - k_next)


def _termination_index(pop: PopulationPath, n_star: float | None, horizon: int) -> int:
    if n_star is None:
        return horizon
    below = np.nonzero(pop.active[: horizon + 1] < n_star)[0]
    return int(below[0]) if len(below) else horizon


def _capital_path(pop: PopulationPath, cap: CapitalParams, capital: np.ndarray,
                  n_star: float | None, source: str) -> CapitalPath:
    horizon = len(capital) - 1
    interest = _kahan_cumsum(cap.i * capital[:-1])
    deposits = _kahan_cumsum(cap.I0 * pop.entering[1:horizon + 1])
    coupons = _kahan_cumsum(cap.r * cap.I0 * pop.active[:horizon])
    withdrawals = _kahan_cumsum(cap.I0 * pop.exiting[1:horizon + 1])
    zero = np.zeros(1)
    t_end = _termination_index(pop, n_star, horizon)
    threshold_hit = n_star is not None and pop.active[t_end] < n_star
    return CapitalPath(
        capital=capital,
        agg_interest=np.concatenate([zero, interest]),
        agg_deposits=np.concatenate([zero, deposits]),
        agg_coupons=np.concatenate([zero, coupons]),
        agg_withdrawals=np.concatenate([zero, withdrawals]),
        termination_index=t_end,
        n_star=n_star,
        source=source,
        meta={"threshold_hit": bool(threshold_hit)},
    )


def budget_recursion_oracle(pop: PopulationPath, cap: CapitalParams,
                            n_star: float | None = None,
                            horizon: int | None = None) -> CapitalPath:
    """Run the budget recursion step by step over a population path.

    This is the ground-truth oracle: every closed-form capital series is
    required to match it.  ``horizon`` defaults to the path's horizon and
    may not exceed it.
    """
    if horizon is None:
        horizon = pop.horizon
    if horizon > pop.horizon:
        raise HorizonMismatchError(
            f"population path covers {pop.horizon} periods, requested {horizon}")
    capital = np.empty(horizon + 1)
    capital[0] = cap.initial_capital(pop.active[0])
    for t in range(1, horizon + 1):
        net = (pop.entering[t] - pop.exiting[t] - cap.r * pop.active[t - 1]) * cap.I0
        capital[t] = capital[t - 1] + (cap.i * capital[t - 1] + net)
    return _capital_path(pop, cap, capital, n_star, "recursion")


def capital_path_from_series(pop: PopulationPath, cap: CapitalParams,
                             capital: np.ndarray,
                             n_star: float | None = None) -> CapitalPath:
    """Wrap a closed-form capital series (aligned with ``pop``) in a
    CapitalPath, accumulating the same aggregates as the oracle."""
    capital = np.asarray(capital, dtype=float)
    if len(capital) - 1 > pop.horizon:
        raise HorizonMismatchError(
            f"population path covers {pop.horizon} periods, capital has {len(capital) - 1}")
    return _capital_path(pop, cap, capital, n_star, "closed_form")


# ---------------------------------------------------------------------------
# geometric demography
# ---------------------------------------------------------------------------

def geometric_capital(g: GeometricParams, cap: CapitalParams, t: int) -> float:
    """Two-regime closed form for constant-rate demography.

    Before the first exits the forcing is N0 I0 (n-r)(1+n)^(t-1); from
    t = T on the lump repayment N0 I0 is taken out and the forcing
    shrinks by eta = 1 - (1+n)^-T.  n = i is handled by the solver's
    nudge policy.
    """
    if t < 0:
        raise InvalidParameterError([f"t must be >= 0, got {t!r}"])
    K0 = cap.initial_capital(g.N0)
    c_full = g.N0 * cap.I0 * (g.n - cap.r)
    pre = RecurrenceSpec(i=cap.i, K_t0=K0, t0=0,
                         terms=(ExponentialTerm(c_full, g.n),))
    if g.T is None or t < g.T:
        return solve_linear_recurrence(pre, t)
    K_T = solve_linear_recurrence(pre, g.T) - g.N0 * cap.I0
    eta = 1.0 - (1.0 + g.n) ** (-g.T)
    post = RecurrenceSpec(i=cap.i, K_t0=K_T, t0=g.T,
                          terms=(ExponentialTerm(c_full * eta, g.n),))
    return solve_linear_recurrence(post, t)


def geometric_capital_series(g: GeometricParams, cap: CapitalParams,
                             horizon: int) -> np.ndarray:
    """Closed-form capital at t = 0..horizon."""
    return np.array([geometric_capital(g, cap, t) for t in range(horizon + 1)])


# ---------------------------------------------------------------------------
# quasi-logistic demography
# ---------------------------------------------------------------------------

def _ql_discounted_sums(q: QuasiLogisticParams, cap: CapitalParams,
                        horizon: int) -> np.ndarray:
    """Partial sums S_t of the discounted net-flow terms,

        S_t = sigma * sum_{k=1..t} ((1+n)/(1+i))^(k-1) n_{k-1} (n_k - r),

    with sigma = 1 / ((1 - N0/N) n (1+i)) and S_0 = 0."""
    n, i, r = q.n, cap.i, cap.r
    k = np.arange(horizon + 1)
    rate = q.n * (1.0 - q.pool_fraction) / (
        1.0 + q.pool_fraction * ((1.0 + n) ** k - 1.0))
    ratio = ((1.0 + n) / (1.0 + i)) ** k[:-1]
    terms = ratio * rate[:-1] * (rate[1:] - r)
    sigma = 1.0 / ((1.0 - q.pool_fraction) * n * (1.0 + i))
    return np.concatenate([[0.0], sigma * _kahan_cumsum(terms)])


def ql_capital_series(q: QuasiLogisticParams, cap: CapitalParams,
                      horizon: int) -> np.ndarray:
    """Closed-form capital under quasi-logistic demography.

    K_t = (1+i)^t (K0 + I0 N0 S_t) up to the lock-up, and
    K_t = (1+i)^t (K0 + I0 N0 [S_t - (1+i)^-T (1 + S_{t-T})]) afterwards
    (the extra (1+i)^-T piece carries the first cohort's repayment).
    """
    K0 = cap.initial_capital(q.N0)
    S = _ql_discounted_sums(q, cap, horizon)
    t = np.arange(horizon + 1)
    compound = (1.0 + cap.i) ** t
    inner = K0 + cap.I0 * q.N0 * S
    if q.T is not None and horizon >= q.T:
        T = q.T
        inner[T:] = K0 + cap.I0 * q.N0 * (
            S[T:] - (1.0 + cap.i) ** (-T) * (1.0 + S[: horizon + 1 - T]))
    return compound * inner


def ql_capital(q: QuasiLogisticParams, cap: CapitalParams, t: int) -> float:
    """Closed-form capital at a single period (computes the partial sums
    up to t)."""
    if t < 0:
        raise InvalidParameterError([f"t must be >= 0, got {t!r}"])
    return float(ql_capital_series(q, cap, t)[t])


def ql_capital_peak_no_market(q: QuasiLogisticParams, cap: CapitalParams) -> float:
    """Time of maximal capitalization without market income (i = 0):

        log[ (N/N0 - 1)(n/r - 1) ] / log(1+n),

    valid before any withdrawals (unbounded T).  Declining regimes
    (n <= r) have no interior peak and return UNDEFINED; with a positive
    market rate the peak moves later and must be located numerically, so
    i != 0 is rejected.
    """
    if cap.i != 0.0:
        raise InvalidParameterError(
            ["peak formula only covers i=0; locate the i>0 peak by argmax on the path"])
    if q.T is not None:
        raise InvalidParameterError(
            ["peak formula covers the pre-withdrawal regime (unbounded T)"])
    if cap.r <= 0.0:
        return NEVER
    if q.n <= cap.r:
        return UNDEFINED
    return math.log((q.N / q.N0 - 1.0) * (q.n / cap.r - 1.0)) / math.log(1.0 + q.n)


# ---------------------------------------------------------------------------
# non-standard SIR demography
# ---------------------------------------------------------------------------

def nssir_capital_series(s: SirParams, cap: CapitalParams,
                         horizon: int) -> np.ndarray:
    """Closed-form capital under the non-standard contagion law.

    The per-period net flow collapses to I0 N0 b_k p_k, with p_k the
    exact product solution and b_k its matching coefficient, so the
    capital is the compound factor times (K0 + I0 N0 * discounted sum).
    With an onset delay the sum restarts at T0 from the delay-end state
    (K_T0, N_T0).
    """
    S0, N0 = s.S0, s.I0
    beta, gamma, T0 = s.beta, s.gamma, s.T0
    i, r = cap.i, cap.r
    K0 = cap.initial_capital(N0)
    S_comp, I_comp = _nssir_compartments(s, horizon)

    capital = np.empty(horizon + 1)
    capital[0] = K0

    # delay phase (recovery off): powers of (1+beta), rational product
    acc = 0.0
    comp = 0.0
    sigma0 = S0 / N0
    for k in range(1, min(T0, horizon) + 1):
        grown = (1.0 + beta) ** (k - 1)
        b = ((sigma0 - r * grown) / (sigma0 + grown) * beta - r) * grown
        p = (1.0 + N0 / S0) / (1.0 + N0 / S0 * (1.0 + beta) ** k)
        y = b * p / (1.0 + i) ** k - comp
        t_ = acc + y
        comp = (t_ - acc) - y
        acc = t_
        capital[k] = (1.0 + i) ** k * (K0 + cap.I0 * N0 * acc)

    if horizon > T0:
        K_d = capital[T0]
        S_d, I_d = S_comp[T0], I_comp[T0]
        sigma_d = S_d / I_d
        shrink = (1.0 + beta) / (1.0 + gamma)
        drag = r + gamma * (1.0 + beta) / (1.0 + gamma)
        acc = 0.0
        comp = 0.0
        product = 1.0
        for k in range(T0 + 1, horizon + 1):
            kk = k - T0
            grown = shrink ** (kk - 1)
            lever = sigma_d / grown
            product *= (1.0 + lever) / (1.0 + beta + lever)
            b = ((sigma_d - r * grown) / (sigma_d + grown) * beta - drag) * grown
            y = b * product / (1.0 + i) ** kk - comp
            t_ = acc + y
            comp = (t_ - acc) - y
            acc = t_
            capital[k] = (1.0 + i) ** kk * (K_d + cap.I0 * I_d * acc)
    return capital


def nssir_capital(s: SirParams, cap: CapitalParams, t: int) -> float:
    """Closed-form capital at a single period."""
    if t < 0:
        raise InvalidParameterError([f"t must be >= 0, got {t!r}"])
    return float(nssir_capital_series(s, cap, t)[t])


def nssir_capital_peak_no_market(s: SirParams, cap: CapitalParams) -> float:
    """Capital peak time without market income (i = 0).

    While recovery is off the net flow changes sign at

        t1 = log( (beta - r)/r * S0/I0 ) / log(1+beta)      (beta > r);

    if t1 falls inside the onset delay that is the peak.  Otherwise the
    post-delay coefficient governs:

        T0 + log( (beta - r(1+gamma) - gamma)
                  / ((r(1+gamma) + gamma)(1+gamma)) * S_T0/I_T0 )
           / log( (1+beta)/(1+gamma) ),

    requiring the log argument above 1; at exactly 1 the peak sits at T0,
    below 1 the capital already falls right after the delay (peak at T0
    when the delay phase was rising).  beta <= r declines monotonically
    from the start: UNDEFINED.  gamma = 0 reproduces the first formula.
    """
    if cap.i != 0.0:
        raise InvalidParameterError(
            ["peak formula only covers i=0; locate the i>0 peak by argmax on the path"])
    if cap.r <= 0.0:
        raise InvalidParameterError(["peak formula requires r > 0"])
    beta, gamma, T0 = s.beta, s.gamma, s.T0
    if beta <= cap.r:
        return UNDEFINED
    t1 = math.log((beta - cap.r) / cap.r * s.S0 / s.I0) / math.log(1.0 + beta)
    if gamma == 0.0 or t1 <= T0:
        return t1
    S_comp, I_comp = _nssir_compartments(s, T0)
    numer = beta - cap.r * (1.0 + gamma) - gamma
    if numer <= 0.0:
        return float(T0)
    arg = numer / ((cap.r * (1.0 + gamma) + gamma) * (1.0 + gamma)) \
        * S_comp[T0] / I_comp[T0]
    if arg <= 1.0:
        return float(T0)
    return T0 + math.log(arg) / math.log((1.0 + beta) / (1.0 + gamma))


# ---------------------------------------------------------------------------
# convenience wrappers (path + closed-form capital in one call)
# ---------------------------------------------------------------------------

def geometric_run(g: GeometricParams, cap: CapitalParams, horizon: int,
                  n_star: float | None = None) -> tuple[PopulationPath, CapitalPath]:
    pop = geometric_path(g, horizon)
    return pop, capital_path_from_series(pop, cap, geometric_capital_series(g, cap, horizon), n_star)


def ql_run(q: QuasiLogisticParams, cap: CapitalParams, horizon: int,
           n_star: float | None = None) -> tuple[PopulationPath, CapitalPath]:
    pop = quasi_logistic_path(q, horizon)
    return pop, capital_path_from_series(pop, cap, ql_capital_series(q, cap, horizon), n_star)


def nssir_run(s: SirParams, cap: CapitalParams, horizon: int,
              n_star: float | None = None) -> tuple[PopulationPath, CapitalPath]:
    pop = nssir_path(s, horizon)
    return pop, capital_path_from_series(pop, cap, nssir_capital_series(s, cap, horizon), n_star)
