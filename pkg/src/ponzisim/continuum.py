"""Continuous-time limit of the bounded-pool investment model.

Shrinking the period length turns the bounded-pool demography into a
logistic flow and the budget recursion into the linear ODE

    K'(t) = p K(t) + I0 (inflow(t) - outflow(t)) - r I0 N(t),

whose integrating-factor solution reduces to Gauss hypergeometric
evaluations through the antiderivative

    int e^(u x) / (1 + w e^(v x))^n dx
        = e^(u x)/u * 2F1(n, u/v; 1 + u/v; -w e^(v x)).

The 2F1 evaluator lives here as well: plain Gauss series for small
arguments, the Pfaff map z -> z/(z-1) for moderately negative z, and the
1/z connection formula for the very negative arguments the model
generates at late times (z = -a e^(q t) reaches magnitudes ~ 1e3, beyond
what the Pfaff series can converge for within the term cap).

``continuous_capital`` evaluates the solution that actually satisfies
the ODE (validated against quadrature and direct integration);
``uncompounded_constants=True`` switches to an alternative bookkeeping
convention that skips compounding on the carried constant terms (kept for
comparing against overlay outputs produced under that convention).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidParameterError, NumericFailureError, UnreachableThresholdError
from .params import CapitalParams, QuasiLogisticParams

HYP2F1_TERM_CAP = 10_000
_SERIES_RTOL = 1e-15
_RATE_EPS = 1e-9


@dataclass(frozen=True)
class Hyp2F1Query:
    """One 2F1 evaluation with its diagnostics."""

    a1: float
    b1: float
    c1: float
    z: float
    value: float
    terms_used: int
    method: str


def _gauss_series(a: float, b: float, c: float, z: float,
                  max_terms: int) -> tuple[float, int]:
    """Compensated Gauss series; converges for |z| < 1."""
    total = 1.0
    term = 1.0
    comp = 0.0
    for k in range(max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (1.0 + k)) * z
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if term == 0.0 or abs(term) <= _SERIES_RTOL * abs(total):
            return total, k + 1
    raise NumericFailureError(
        "hypergeometric series did not converge",
        {"a": a, "b": b, "c": c, "z": z, "terms_used": max_terms, "partial": total})


def hyp2f1_query(a1: float, b1: float, c1: float, z: float,
                 max_terms: int = HYP2F1_TERM_CAP) -> Hyp2F1Query:
    """Gauss hypergeometric 2F1(a1, b1; c1; z) with diagnostics.

    Supported domain: any z <= 0, plus |z| < 1.  Regime selection:
    plain series for |z| <= 0.5, Pfaff transform for -2 <= z < -0.5,
    and the 1/z connection formula below -2 (falling back to Pfaff when
    a1 - b1 is too close to an integer for the connection formula).
    """
    if c1 <= 0.0 and c1 == int(c1):
        raise InvalidParameterError([f"c1 must not be a non-positive integer, got {c1}"])
    if z >= 1.0:
        raise InvalidParameterError([f"z must be < 1 (or any z <= 0), got {z}"])
    if z == 0.0:
        return Hyp2F1Query(a1, b1, c1, z, 1.0, 0, "series")
    if abs(z) <= 0.5 or z > 0.0:
        value, used = _gauss_series(a1, b1, c1, z, max_terms)
        return Hyp2F1Query(a1, b1, c1, z, value, used, "series")

    def _pfaff():
        w = z / (z - 1.0)
        inner, used = _gauss_series(a1, c1 - b1, c1, w, max_terms)
        return Hyp2F1Query(a1, b1, c1, z, (1.0 - z) ** (-a1) * inner, used, "pfaff")

    if z >= -2.0:
        return _pfaff()
    if abs((a1 - b1) - round(a1 - b1)) < 1e-8:
        return _pfaff()
    try:
        g = math.gamma
        front1 = g(c1) * g(b1 - a1) / (g(b1) * g(c1 - a1))
        front2 = g(c1) * g(a1 - b1) / (g(a1) * g(c1 - b1))
    except ValueError:
        return _pfaff()     # gamma pole; the slow map is still exact
    inv = 1.0 / z
    part1, used1 = _gauss_series(a1, a1 - c1 + 1.0, a1 - b1 + 1.0, inv, max_terms)
    part2, used2 = _gauss_series(b1, b1 - c1 + 1.0, b1 - a1 + 1.0, inv, max_terms)
    value = front1 * (-z) ** (-a1) * part1 + front2 * (-z) ** (-b1) * part2
    return Hyp2F1Query(a1, b1, c1, z, value, used1 + used2, "inverse-z")


def hyp2f1(a1: float, b1: float, c1: float, z: float,
           max_terms: int = HYP2F1_TERM_CAP) -> float:
    return hyp2f1_query(a1, b1, c1, z, max_terms).value


def logistic_exp_antiderivative(u: float, v: float, w: float, n: int,
                                x: float) -> float:
    """Antiderivative of e^(u x) / (1 + w e^(v x))^n (constant-free)."""
    if u == 0.0:
        raise InvalidParameterError(["u must be non-zero"])
    return math.exp(u * x) / u * hyp2f1(n, u / v, 1.0 + u / v, -w * math.exp(v * x))


# ---------------------------------------------------------------------------
# model parameters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContinuumParams:
    """Continuous-time model parameters.

    q is the continuous growth rate (log of the discrete growth factor),
    p the realized nominal return rate on pooled assets, T the real
    lock-up span.  ``exact_prefactor`` replaces the compact entry-rate
    prefactor q by the exact period-limit value (e^q - 1)/(1 - N0/N);
    the compact form is the default.
    """

    N0: float
    N: float
    q: float
    T: float
    I0: float
    r: float
    p: float
    K0: float
    exact_prefactor: bool = False

    def __post_init__(self):
        problems = []
        if not (0 < self.N0 < self.N):
            problems.append(f"need 0 < N0 < N, got N0={self.N0}, N={self.N}")
        if not (self.q > 0):
            problems.append(f"q must be > 0, got {self.q}")
        if not (self.T > 0):
            problems.append(f"T must be > 0, got {self.T}")
        if not (self.I0 > 0):
            problems.append(f"I0 must be > 0, got {self.I0}")
        for name in ("r", "p", "K0"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                problems.append(f"{name} must be finite, got {v!r}")
        if problems:
            raise InvalidParameterError(problems)

    @property
    def a(self) -> float:
        """Pool ratio N0 / (N - N0)."""
        return self.N0 / (self.N - self.N0)

    @property
    def prefactor(self) -> float:
        if self.exact_prefactor:
            return (math.exp(self.q) - 1.0) / (1.0 - self.N0 / self.N)
        return self.q

    @classmethod
    def from_discrete(cls, q_params: QuasiLogisticParams, cap: CapitalParams,
                      exact_prefactor: bool = False) -> "ContinuumParams":
        """Map a discrete scheme onto the continuum: q = log(1+n), the
        nominal return rate equal to the discrete market rate, and the
        same starting capital K0_pro + I0 N0."""
        if q_params.T is None:
            raise InvalidParameterError(["the continuous model needs a finite lock-up T"])
        return cls(N0=q_params.N0, N=q_params.N, q=math.log(1.0 + q_params.n),
                   T=float(q_params.T), I0=cap.I0, r=cap.r, p=cap.i,
                   K0=cap.initial_capital(q_params.N0),
                   exact_prefactor=exact_prefactor)


# ---------------------------------------------------------------------------
# population side
# ---------------------------------------------------------------------------

def _kappa(params: ContinuumParams) -> float:
    return params.prefactor / params.q


def continuous_inflow_rate(params: ContinuumParams, t: float) -> float:
    """Entry flow c N0 e^(q t) / (1 + a e^(q t))^2 (c the prefactor)."""
    a = params.a
    e = math.exp(params.q * t)
    return params.prefactor * params.N0 * e / (1.0 + a * e) ** 2


def continuous_outflow_rate(params: ContinuumParams, t: float) -> float:
    """Exit flow: the entry flow delayed by the lock-up (zero before T).
    The initial cohort leaves as a lump of N0 at exactly t = T, which a
    pointwise rate cannot represent; integrals account for it separately.
    """
    return continuous_inflow_rate(params, t - params.T) if t >= params.T else 0.0


def _varying(params: ContinuumParams, t: float) -> float:
    """Integral of the unscaled entry flow from 0 to t."""
    a = params.a
    return params.N0 / a * (1.0 / (1.0 + a) - 1.0 / (1.0 + a * math.exp(params.q * t)))


def continuous_population(params: ContinuumParams, t: float) -> float:
    """Active investors at real time t: sigmoidal up to the lock-up,
    humped after it (entrants minus the delayed copy of themselves)."""
    if t < 0:
        raise InvalidParameterError([f"t must be >= 0, got {t}"])
    k = _kappa(params)
    if t < params.T:
        return params.N0 + k * _varying(params, t)
    return k * (_varying(params, t) - _varying(params, t - params.T))


def continuous_population_peak(params: ContinuumParams) -> float:
    """Hump maximum T/2 + log(N/N0 - 1)/q."""
    return params.T / 2.0 + math.log(params.N / params.N0 - 1.0) / params.q


def continuous_inverse_time(params: ContinuumParams, n_star: float) -> float:
    """Stopping time on the declining side of the hump: the larger root
    of the quadratic in y = e^(q t) obtained from population(t) = n_star.
    """
    if not (n_star > 0.0):
        raise InvalidParameterError([f"n_star must be > 0, got {n_star}"])
    a = params.a
    theta = math.exp(-params.q * params.T)
    scale = _kappa(params) * params.N0
    A = n_star * a * a * theta
    B = n_star * a * (1.0 + theta) - scale * (1.0 - theta)
    C = n_star
    disc = B * B - 4.0 * A * C
    if disc < 0.0:
        raise UnreachableThresholdError(
            f"threshold {n_star} exceeds the hump maximum (discriminant {disc:.3g} < 0)")
    y = (-B + math.sqrt(disc)) / (2.0 * A)
    if y <= 0.0:
        raise UnreachableThresholdError(f"no positive root for threshold {n_star}")
    return math.log(y) / params.q


# ---------------------------------------------------------------------------
# capital side
# ---------------------------------------------------------------------------

def _effective_p(params: ContinuumParams) -> float:
    """Return rate nudged off q (the deposit aggregate divides by q-p)."""
    eps = _RATE_EPS * max(1.0, abs(params.q))
    if abs(params.p - params.q) < eps:
        return params.q - eps
    return params.p


def _p_matches_q(params: ContinuumParams) -> bool:
    """True when p sits so close to q that the hypergeometric route is
    ill-conditioned (its c parameter nears a pole); the aggregates then
    use the exact p = q limit, which is elementary."""
    return abs(params.p - params.q) < 1e-8 * max(1.0, abs(params.q))


def _squared_sigmoid_integral(params: ContinuumParams, t: float) -> float:
    """int_0^t dtau / (1 + a e^(q tau))^2."""
    a, q = params.a, params.q

    def primitive(u: float) -> float:
        return (math.log(u / (1.0 + u)) + 1.0 / (1.0 + u)) / q

    return primitive(a * math.exp(q * t)) - primitive(a)


def _damped_sigmoid_integral(params: ContinuumParams, t: float) -> float:
    """int_0^t e^(-q tau) / (1 + a e^(q tau)) dtau."""
    a, q = params.a, params.q

    def primitive(u: float) -> float:
        return (a / q) * (-1.0 / u - math.log(u / (1.0 + u)))

    return primitive(a * math.exp(q * t)) - primitive(a)


def _deposits_limit(params: ContinuumParams, t: float) -> float:
    """Deposit aggregate in the exact p = q limit."""
    return (math.exp(params.q * t) * _kappa(params) * params.q
            * params.N0 * params.I0 * _squared_sigmoid_integral(params, t))


def _coupons_pre_limit(params: ContinuumParams, t: float) -> float:
    a, q, r = params.a, params.q, params.r
    k = _kappa(params)
    flat = params.N0 * (1.0 + k / (a * (1.0 + a)))
    curve = -k * params.N0 / a
    inner = flat * (1.0 - math.exp(-q * t)) / q + curve * _damped_sigmoid_integral(params, t)
    return math.exp(q * t) * r * params.I0 * inner


def _coupons_post_limit(params: ContinuumParams, t: float) -> float:
    a, q, r, T = params.a, params.q, params.r, params.T
    carried = math.exp(q * (t - T)) * _coupons_pre_limit(params, T)
    curve = _kappa(params) * params.N0 / a
    inner = (math.exp(-q * T) * _damped_sigmoid_integral(params, t - T)
             - (_damped_sigmoid_integral(params, t) - _damped_sigmoid_integral(params, T)))
    return carried + math.exp(q * t) * r * params.I0 * curve * inner


def _f1(params: ContinuumParams, p: float, z: float) -> float:
    return hyp2f1(1.0, -p / params.q, 1.0 - p / params.q, z)


def _f2(params: ContinuumParams, p: float, z: float) -> float:
    return hyp2f1(2.0, 1.0 - p / params.q, 2.0 - p / params.q, z)


def _deposits(params: ContinuumParams, p: float, t: float, uncompounded: bool) -> float:
    """Compounded deposit aggregate e^(p t) int_0^t I0 inflow e^(-p tau)."""
    a, q = params.a, params.q
    head = math.exp(q * t) * _f2(params, p, -a * math.exp(q * t))
    tail = _f2(params, p, -a)
    if not uncompounded:
        tail *= math.exp(p * t)
    return _kappa(params) * params.N0 * params.I0 * q / (q - p) * (head - tail)


def _coupons_pre(params: ContinuumParams, p: float, t: float) -> float:
    """Compounded coupon aggregate r I0 over the sigmoidal branch."""
    a, q, r = params.a, params.q, params.r
    k = _kappa(params)
    flat = params.N0 * (1.0 + k / (a * (1.0 + a)))
    curve = k * params.N0 / a
    return r * params.I0 * (
        flat * (math.exp(p * t) - 1.0) / p
        + curve / p * (_f1(params, p, -a * math.exp(q * t))
                       - math.exp(p * t) * _f1(params, p, -a)))


def _coupons_post(params: ContinuumParams, p: float, t: float, uncompounded: bool) -> float:
    a, q, r, T = params.a, params.q, params.r, params.T
    carried = _coupons_pre(params, p, T)
    if not uncompounded:
        carried *= math.exp(p * (t - T))
    bracket = (math.exp(p * (t - T)) * _f1(params, p, -a)
               - _f1(params, p, -a * math.exp(q * (t - T)))
               + _f1(params, p, -a * math.exp(q * t))
               - math.exp(p * (t - T)) * _f1(params, p, -a * math.exp(q * T)))
    return carried + _kappa(params) * params.N0 * params.I0 * r / (p * a) * bracket


def _withdrawals(params: ContinuumParams, p: float, t: float, uncompounded: bool) -> float:
    """Compounded withdrawal aggregate: the delayed deposit stream plus
    the initial cohort's lump repayment at T."""
    if uncompounded:
        a, q = params.a, params.q
        bracket = (math.exp(q * (t - params.T)) * _f2(params, p, -a * math.exp(q * (t - params.T)))
                   - _f2(params, p, -a))
        return params.N0 * params.I0 * (1.0 + q / (q - p) * bracket)
    lump = params.N0 * params.I0 * math.exp(p * (t - params.T))
    return lump + _deposits(params, p, t - params.T, uncompounded=False)


def continuous_capital(params: ContinuumParams, t: float,
                       uncompounded_constants: bool = False) -> float:
    """Capital at real time t.

    K(t) = K0 e^(p t) + deposits - coupons before the lock-up, minus the
    withdrawal aggregate after it.  The default form satisfies the
    budget ODE (finite-difference residual ~1e-9).  With
    uncompounded_constants=True the carried constant terms (the lump
    repayment and the constant tails of the aggregates) are not
    compounded forward; that convention does not satisfy the ODE but is
    kept for comparison with outputs produced under it.
    """
    if t < 0:
        raise InvalidParameterError([f"t must be >= 0, got {t}"])
    if params.p == 0.0:
        raise InvalidParameterError(["the capital solution needs p != 0 "
                                     "(coupon aggregates divide by p)"])
    if not uncompounded_constants and _p_matches_q(params):
        base = params.K0 * math.exp(params.q * t)
        if t < params.T:
            return base + _deposits_limit(params, t) - _coupons_pre_limit(params, t)
        lump = params.N0 * params.I0 * math.exp(params.q * (t - params.T))
        return (base + _deposits_limit(params, t) - _coupons_post_limit(params, t)
                - lump - _deposits_limit(params, t - params.T))
    p = _effective_p(params)
    base = params.K0 * math.exp(p * t)
    if t < params.T:
        return base + _deposits(params, p, t, uncompounded_constants) - _coupons_pre(params, p, t)
    return (base + _deposits(params, p, t, uncompounded_constants)
            - _coupons_post(params, p, t, uncompounded_constants)
            - _withdrawals(params, p, t, uncompounded_constants))


def continuous_budget_rhs(params: ContinuumParams, t: float, K: float) -> float:
    """Right-hand side p K + I0 (inflow - outflow) - r I0 N(t) of the
    budget ODE (for residual checks; skip the lump point t = T)."""
    return (params.p * K
            + params.I0 * (continuous_inflow_rate(params, t)
                           - continuous_outflow_rate(params, t))
            - params.r * params.I0 * continuous_population(params, t))


def _sigmoid_time_integral(params: ContinuumParams, x: float) -> float:
    """int_0^x dtau / (1 + a e^(q tau)) in elementary form."""
    a, q = params.a, params.q
    return x - math.log((1.0 + a * math.exp(q * x)) / (1.0 + a)) / q


def _population_time_integral(params: ContinuumParams, t: float) -> float:
    """int_0^t N(tau) dtau (drives the undiscounted coupon aggregate)."""
    a, q, N0 = params.a, params.q, params.N0
    k = _kappa(params)

    def pre(x: float) -> float:
        return N0 * x + k * N0 / a * (x / (1.0 + a) - _sigmoid_time_integral(params, x))

    if t < params.T:
        return pre(t)
    T = params.T
    h_t, h_T, h_d = (_sigmoid_time_integral(params, x) for x in (t, T, t - T))
    return pre(T) + k * N0 / a * (h_d - (h_t - h_T))


def continuous_aggregates(params: ContinuumParams, t: float) -> dict:
    """Undiscounted flow aggregates up to t (deposits, withdrawals,
    coupons, and the interest balance that closes the budget identity
    K = K0 + interest + deposits - coupons - withdrawals)."""
    k = _kappa(params)
    deposits = params.I0 * k * _varying(params, t)
    if t >= params.T:
        withdrawals = params.I0 * (k * _varying(params, t - params.T) + params.N0)
    else:
        withdrawals = 0.0
    coupons = params.r * params.I0 * _population_time_integral(params, t)
    capital = continuous_capital(params, t)
    interest = capital - params.K0 - deposits + coupons + withdrawals
    return {"deposits": deposits, "withdrawals": withdrawals,
            "coupons": coupons, "interest": interest, "capital": capital}
