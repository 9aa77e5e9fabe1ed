"""Closed-form solver for first-order linear recurrences with exponential
forcing, plus four published toy capital models expressed through it.

The workhorse result: the recurrence

    K_t = (1+i) K_{t-1} + sum_j c_j (1+n_j)^(t-1),      t > t0,

with initial value K_{t0}, has the explicit solution

    K_t = ( K_{t0} + sum_j c_j/(i-n_j) (1+n_j)^t0 ) (1+i)^(t-t0)
          - sum_j c_j/(i-n_j) (1+n_j)^t.

A forcing rate equal to the homogeneous rate (n_j = i) makes the
coefficient blow up; ``solve_linear_recurrence`` sidesteps it by nudging
n_j to i + eps with eps = 1e-9 * max(1, |i|), flagged via
``RecurrenceSpec.needs_regularization`` (error grows like eps * t).  The
reference models instead take the limit analytically where it is known
(a constant forcing on an i = 0 recurrence contributes exactly a linear
term c * t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidParameterError

#: Relative half-width within which a forcing rate counts as resonant.
RESONANCE_EPS = 1e-9


def _finite(name, v, problems):
    if not isinstance(v, (int, float)) or not math.isfinite(v):
        problems.append(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class ExponentialTerm:
    """One forcing term c (1+n)^(t-1)."""

    c: float
    n: float

    def __post_init__(self):
        problems = []
        _finite("c", self.c, problems)
        _finite("n", self.n, problems)
        if not problems and self.n <= -1:
            problems.append(f"n must be > -1, got {self.n}")
        if problems:
            raise InvalidParameterError(problems)


@dataclass(frozen=True)
class RecurrenceSpec:
    """K_t = (1+i) K_{t-1} + sum of exponential terms, from (t0, K_t0)."""

    i: float
    K_t0: float
    t0: int = 0
    terms: tuple[ExponentialTerm, ...] = ()

    def __post_init__(self):
        problems = []
        _finite("i", self.i, problems)
        _finite("K_t0", self.K_t0, problems)
        if not isinstance(self.t0, int) or isinstance(self.t0, bool) or self.t0 < 0:
            problems.append(f"t0 must be an integer >= 0, got {self.t0!r}")
        if problems:
            raise InvalidParameterError(problems)
        object.__setattr__(self, "terms", tuple(self.terms))

    def _tolerance(self) -> float:
        return RESONANCE_EPS * max(1.0, abs(self.i))

    @property
    def needs_regularization(self) -> bool:
        """True when some forcing rate collides with the homogeneous rate."""
        return any(abs(term.n - self.i) < self._tolerance() for term in self.terms)

    def effective_rates(self) -> list[float]:
        """Forcing rates with resonant ones nudged off the homogeneous rate."""
        eps = self._tolerance()
        return [term.n + eps if abs(term.n - self.i) < eps else term.n
                for term in self.terms]


def solve_linear_recurrence(spec: RecurrenceSpec, t: int) -> float:
    """Evaluate the explicit solution at integer time t >= t0."""
    if t < spec.t0:
        raise InvalidParameterError([f"t must be >= t0={spec.t0}, got {t}"])
    i = spec.i
    rates = spec.effective_rates()
    homogeneous = spec.K_t0
    value = 0.0
    for term, n in zip(spec.terms, rates):
        coeff = term.c / (i - n)
        homogeneous += coeff * (1.0 + n) ** spec.t0
        value -= coeff * (1.0 + n) ** t
    return homogeneous * (1.0 + i) ** (t - spec.t0) + value


def iterate_linear_recurrence(spec: RecurrenceSpec, t: int) -> float:
    """Naive iteration of the defining recurrence (reference path)."""
    if t < spec.t0:
        raise InvalidParameterError([f"t must be >= t0={spec.t0}, got {t}"])
    value = spec.K_t0
    for s in range(spec.t0 + 1, t + 1):
        forcing = sum(term.c * (1.0 + term.n) ** (s - 1) for term in spec.terms)
        value = (1.0 + spec.i) * value + forcing
    return value


# ---------------------------------------------------------------------------
# published reference models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AticiParams:
    """Deposit/withdrawal fund: capital earns r_n, deposits grow at r_i,
    withdrawals take the fraction r_w of deposits grown at r_p."""

    r_n: float
    r_i: float
    r_w: float
    r_p: float
    D0: float
    K0: float

    @property
    def alpha(self) -> float:
        return (1.0 + self.r_p) * (1.0 - self.r_w) - 1.0

    @property
    def beta(self) -> float:
        return self.r_w * (1.0 + self.r_p) * self.D0


@dataclass(frozen=True)
class StylisticParams:
    """Inflows grow at g, payouts lag one period at rate r, and the
    promoter skims the constant amount c per period; K0 = I0."""

    I0: float
    g: float
    r: float
    c: float


@dataclass(frozen=True)
class SpreadsheetParams:
    """Start-cash fund: each period adds the constant deposit total D,
    pays out the fraction w of outstanding liabilities (which compound at
    the promised rate r), and rolls the rest at the risk-free rate i."""

    K0: float
    D: float
    i: float
    r: float
    w: float

    @property
    def lam(self) -> float:
        """Liability growth factor (1-w)(1+r)."""
        return (1.0 - self.w) * (1.0 + self.r)


@dataclass(frozen=True)
class ParlarParams:
    """Cash fund with geometrically growing net deposits (cumulative
    stock u0 (1+r_hat)^t) and payouts at rate r on the liability stock
    seeded by s0."""

    c0: float
    u0: float
    r_hat: float
    r: float
    s0: float


def atici_capital(p: AticiParams, t: int) -> float:
    """K_t = (K0 - T1 + T2)(1+r_n)^t + T1 (1+alpha)^t - T2 (1+r_i)^t,
    with T1, T2 the resolvent coefficients of the two forcing streams."""
    _check_time(t)
    t1 = (p.beta / (p.alpha - p.r_i)) / (p.r_n - p.alpha)
    t2 = (p.D0 + p.beta / (p.alpha - p.r_i)) / (p.r_n - p.r_i)
    return ((p.K0 - t1 + t2) * (1.0 + p.r_n) ** t
            + t1 * (1.0 + p.alpha) ** t
            - t2 * (1.0 + p.r_i) ** t)


def stylistic_capital(p: StylisticParams, t: int) -> float:
    """K_t = I0 (g-r)/g (1+g)^t - c t + I0 r/g.

    An exponential piece superposed with a falling arithmetic piece; the
    linear term is the analytic limit of the constant-forcing resolvent
    at zero homogeneous rate.  K_0 = I0 by construction.
    """
    _check_time(t)
    return p.I0 * (p.g - p.r) / p.g * (1.0 + p.g) ** t - p.c * t + p.I0 * p.r / p.g


def stylistic_pieces(p: StylisticParams, t: int) -> tuple[float, float]:
    """The (geometric, arithmetic) components whose sum is the capital."""
    return (p.I0 * (p.g - p.r) / p.g * (1.0 + p.g) ** t,
            -p.c * t + p.I0 * p.r / p.g)


def spreadsheet_liabilities(p: SpreadsheetParams, t: int) -> float:
    """L_t = D (lam^(t+1) - 1) / (lam - 1), from L_t = lam L_{t-1} + D."""
    _check_time(t)
    lam = p.lam
    if abs(lam - 1.0) < RESONANCE_EPS:
        return p.D * (t + 1)
    return p.D * (lam ** (t + 1) - 1.0) / (lam - 1.0)


def spreadsheet_capital(p: SpreadsheetParams, t: int) -> float:
    """Closed form of K_t = (1+i)(K_{t-1} + D - w L_{t-1}).

    The forcing splits into a lam-geometric stream with step-(t-1)
    coefficient c1 * lam, c1 = -(1+i) w D / (lam-1), and the constant
    stream c2 = -r (1-w)/w * c1.
    """
    _check_time(t)
    lam, i = p.lam, p.i
    c1 = -(1.0 + i) * p.w / (lam - 1.0) * p.D
    c2 = -p.r * (1.0 - p.w) / p.w * c1
    spec = RecurrenceSpec(i=i, K_t0=p.K0, t0=0,
                          terms=(ExponentialTerm(c1 * lam, lam - 1.0),
                                 ExponentialTerm(c2, 0.0)))
    return solve_linear_recurrence(spec, t)


def parlar_capital(p: ParlarParams, t: int) -> float:
    """c_t = c0 + u0 { (1 - r/r_hat)((1+r_hat)^t - 1)
                       - (r s0/u0 - r/r_hat) t }.

    Per-period net flow u0 (r_hat - r)(1+r_hat)^(t-1) - r(s0 - u0/r_hat);
    the constant part of the flow integrates to the linear term exactly
    (zero homogeneous rate, analytic limit).
    """
    _check_time(t)
    return p.c0 + p.u0 * ((1.0 - p.r / p.r_hat) * ((1.0 + p.r_hat) ** t - 1.0)
                          - (p.r * p.s0 / p.u0 - p.r / p.r_hat) * t)


_REFERENCE_MODELS = {
    "atici": (AticiParams, atici_capital),
    "stylistic": (StylisticParams, stylistic_capital),
    "spreadsheet": (SpreadsheetParams, spreadsheet_capital),
    "parlar": (ParlarParams, parlar_capital),
}


def reference_model_capital(model: str, params, t: int) -> float:
    """Closed-form capital of one of the four published reference models.

    ``model`` is one of "atici", "stylistic", "spreadsheet", "parlar";
    ``params`` the matching parameter record.
    """
    try:
        cls, fn = _REFERENCE_MODELS[model]
    except KeyError:
        raise InvalidParameterError(
            [f"unknown reference model {model!r}; expected one of {sorted(_REFERENCE_MODELS)}"])
    if not isinstance(params, cls):
        raise InvalidParameterError(
            [f"model {model!r} expects {cls.__name__}, got {type(params).__name__}"])
    return fn(params, t)


def _check_time(t):
    if not isinstance(t, int) or isinstance(t, bool) or t < 0:
        raise InvalidParameterError([f"t must be an integer >= 0, got {t!r}"])
