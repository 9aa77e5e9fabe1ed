"""Parameter records for the demographic laws and the capital budget.

All investor counts are real-valued: the models are analytic and never
round to whole investors.  An unbounded lock-up is expressed as ``T=None``
(a distinct sentinel, never a large number), so the pre-withdrawal branch
of every piecewise formula is selected exactly.

Instances are frozen and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidParameterError


def _finite(name, value, problems):
    if not isinstance(value, (int, float)) or not math.isfinite(value):
        problems.append(f"{name} must be a finite number, got {value!r}")
        return False
    return True


def _check_lockup(T, problems, name="T"):
    if T is None:
        return
    if not isinstance(T, int) or isinstance(T, bool) or T < 1:
        problems.append(f"{name} must be a positive integer or None (unbounded), got {T!r}")


@dataclass(frozen=True)
class GeometricParams:
    """Constant-rate participation growth.

    N0: initial investor count (> 0)
    n:  per-period growth rate (> -1); entrants keep growing geometrically
        even after the first exits at t = T
    T:  lock-up horizon in periods, or None for unbounded
    """

    N0: float
    n: float
    T: int | None = None

    def __post_init__(self):
        problems = []
        if _finite("N0", self.N0, problems) and self.N0 <= 0:
            problems.append(f"N0 must be > 0, got {self.N0}")
        if _finite("n", self.n, problems) and self.n <= -1:
            problems.append(f"n must be > -1, got {self.n}")
        _check_lockup(self.T, problems)
        if problems:
            raise InvalidParameterError(problems)

    @property
    def unbounded(self) -> bool:
        return self.T is None


@dataclass(frozen=True)
class QuasiLogisticParams:
    """Participation bounded by a finite pool.

    The growth rate decays sigmoidally from roughly ``n`` toward zero as
    the pool fills, so the active count follows a logistic-shaped curve
    (humped once exits start after the lock-up T).

    N0: initial investor count (0 < N0 < N)
    N:  pool supremum
    n:  initial growth rate (> 0)
    T:  lock-up horizon, or None for unbounded
    """

    N0: float
    N: float
    n: float
    T: int | None = None

    def __post_init__(self):
        problems = []
        ok0 = _finite("N0", self.N0, problems)
        okN = _finite("N", self.N, problems)
        if ok0 and self.N0 <= 0:
            problems.append(f"N0 must be > 0, got {self.N0}")
        if ok0 and okN and self.N0 >= self.N:
            problems.append(f"N0 must be < N, got N0={self.N0}, N={self.N}")
        if _finite("n", self.n, problems) and self.n <= 0:
            problems.append(f"n must be > 0, got {self.n}")
        _check_lockup(self.T, problems)
        if problems:
            raise InvalidParameterError(problems)

    @property
    def unbounded(self) -> bool:
        return self.T is None

    @property
    def pool_fraction(self) -> float:
        """N0 / N, the small parameter of the model."""
        return self.N0 / self.N


@dataclass(frozen=True)
class SirParams:
    """Compartmental contagion demography.

    S0, I0, R0: initial susceptible / active / exited counts; their sum is
        the constant total population.
    beta:  transmission (joining) rate per period
    gamma: recovery (quitting) rate per period
    T0:    recovery-onset delay in periods; exits only start at t = T0 + 1
           (0 means exits from the very beginning)
    """

    S0: float
    I0: float
    R0: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    T0: int = 0

    def __post_init__(self):
        problems = []
        for name in ("S0", "I0", "R0"):
            v = getattr(self, name)
            if _finite(name, v, problems) and v < 0:
                problems.append(f"{name} must be >= 0, got {v}")
        if _finite("beta", self.beta, problems) and self.beta < 0:
            problems.append(f"beta must be >= 0, got {self.beta}")
        if _finite("gamma", self.gamma, problems) and self.gamma < 0:
            problems.append(f"gamma must be >= 0, got {self.gamma}")
        if not isinstance(self.T0, int) or isinstance(self.T0, bool) or self.T0 < 0:
            problems.append(f"T0 must be an integer >= 0, got {self.T0!r}")
        if problems:
            raise InvalidParameterError(problems)

    @property
    def population(self) -> float:
        """Constant total population S + I + R."""
        return self.S0 + self.I0 + self.R0


@dataclass(frozen=True)
class CapitalParams:
    """Capital-side parameters shared by every demographic law.

    K0_pro: promoter endowment at t = 0
    I0:     one-time deposit per investor (> 0)
    r:      promised coupon rate per period; every active investor
            receives the fixed coupon r * I0 each period (non-compounding)
    i:      effective market return per period on pooled assets
            (promoter payouts, if any, are absorbed into i)
    """

    K0_pro: float
    I0: float
    r: float
    i: float

    def __post_init__(self):
        problems = []
        for name in ("K0_pro", "I0", "r", "i"):
            _finite(name, getattr(self, name), problems)
        if not problems and self.I0 <= 0:
            problems.append(f"I0 must be > 0, got {self.I0}")
        if problems:
            raise InvalidParameterError(problems)

    def initial_capital(self, n0: float) -> float:
        """Total starting capital: promoter endowment plus the first
        cohort's deposits."""
        return self.K0_pro + self.I0 * n0

    @property
    def coupon(self) -> float:
        """Fixed per-investor payout per period."""
        return self.r * self.I0
