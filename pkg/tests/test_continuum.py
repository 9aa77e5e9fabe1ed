import math

import mpmath
import numpy as np
import pytest
from scipy.integrate import quad

from ponzisim import (
    CapitalParams,
    ContinuumParams,
    InvalidParameterError,
    QuasiLogisticParams,
    UnreachableThresholdError,
    continuous_budget_rhs,
    continuous_capital,
    continuous_inflow_rate,
    continuous_inverse_time,
    continuous_outflow_rate,
    continuous_population,
    continuous_population_peak,
    hyp2f1,
    hyp2f1_query,
    logistic_exp_antiderivative,
    quasi_logistic_path,
)

BASE = ContinuumParams(N0=10, N=1000, q=math.log(1.1), T=6.0,
                       I0=3, r=0.052, p=0.03, K0=130.0)


def antiderivative_fd(u, v, w, n, x, h=1e-4):
    return (logistic_exp_antiderivative(u, v, w, n, x + h)
            - logistic_exp_antiderivative(u, v, w, n, x - h)) / (2 * h)


def antiderivative_draw(rng):
    """Draw (u, v, w, n, x) over the identity's working domain.

    The exponent ratio u/v stays inside (-1, 1), as in the capital
    solution (where it is 1-p/q or -p/q with 0 < p < q); beyond that the
    third 2F1 parameter 1+u/v crosses non-positive integers, where the
    function blows up and a float64 central difference of the
    antiderivative loses all significance."""
    ratio = rng.uniform(0.1, 0.95) * (1 if rng.random() < 0.5 else -1)
    v = rng.uniform(0.2, 1.2)
    u = ratio * v
    w = rng.uniform(0.05, 2.0)
    n = int(rng.integers(1, 3))
    x = rng.uniform(-1.5, 1.5)
    return u, v, w, n, x


class TestHyp2F1:
    def test_empty_series_at_zero(self):
        assert hyp2f1(0.3, -1.7, 2.4, 0.0) == 1.0

    def test_log_identity(self):
        # 2F1(1,1;2;z) = -log(1-z)/z
        assert hyp2f1(1, 1, 2, -1.0) == pytest.approx(math.log(2), abs=1e-10)

    def test_binomial_identity(self):
        # 2F1(2,1;2;z) = 1/(1-z)
        assert hyp2f1(2, 1, 2, -0.5) == pytest.approx(2.0 / 3.0, abs=1e-10)

    def test_method_selection(self):
        assert hyp2f1_query(1, 0.3, 1.3, -0.4).method == "series"
        assert hyp2f1_query(1, 0.3, 1.3, -1.5).method == "pfaff"
        assert hyp2f1_query(1, 0.3, 1.3, -800.0).method == "inverse-z"

    def test_against_mpmath_across_regimes(self, rng):
        worst = 0.0
        for _ in range(200):
            ratio = rng.uniform(0.05, 0.95)
            if rng.random() < 0.5:
                a, b, c = 1.0, -ratio, 1.0 - ratio
            else:
                a, b, c = 2.0, 1.0 - ratio, 2.0 - ratio
            z = -math.exp(rng.uniform(-5, 8))
            mine = hyp2f1(a, b, c, z)
            ref = float(mpmath.hyp2f1(a, b, c, z))
            worst = max(worst, abs(mine - ref) / abs(ref))
        assert worst < 1e-12

    def test_generic_parameters_against_mpmath(self, rng):
        for _ in range(100):
            a = rng.uniform(0.1, 3.0)
            b = rng.uniform(-2.0, 2.0)
            c = rng.uniform(0.5, 4.0)
            if abs((a - b) - round(a - b)) < 1e-3:
                continue
            z = rng.uniform(-30.0, 0.9)
            ref = float(mpmath.hyp2f1(a, b, c, z))
            assert hyp2f1(a, b, c, z) == pytest.approx(ref, rel=1e-11, abs=1e-13)

    def test_rejects_bad_arguments(self):
        with pytest.raises(InvalidParameterError):
            hyp2f1(1.0, 1.0, -2.0, 0.3)
        with pytest.raises(InvalidParameterError):
            hyp2f1(1.0, 1.0, 2.0, 1.5)

    def test_non_convergence_carries_diagnostics(self):
        from ponzisim import NumericFailureError
        with pytest.raises(NumericFailureError) as err:
            hyp2f1(1.0, 0.3, 1.3, -0.49, max_terms=3)
        assert err.value.diagnostics["terms_used"] == 3
        assert "partial" in err.value.diagnostics

    def test_antiderivative_matches_integrand(self, rng):
        # d/dx [e^(ux)/u 2F1(n, u/v; 1+u/v; -w e^(vx))] = e^(ux)/(1+w e^(vx))^n
        for _ in range(100):
            u, v, w, n, x = antiderivative_draw(rng)
            lhs = antiderivative_fd(u, v, w, n, x)
            rhs = math.exp(u * x) / (1.0 + w * math.exp(v * x)) ** n
            assert lhs == pytest.approx(rhs, rel=1e-6)


class TestPopulation:
    def test_initial_value(self):
        assert continuous_population(BASE, 0.0) == pytest.approx(10.0, rel=1e-14)

    def test_sigmoid_supremum_before_lockup(self):
        # the compact-prefactor flow saturates at N0 (1 + 1/(a(1+a))),
        # which equals the pool N up to first order in N0/N
        params = ContinuumParams(N0=10, N=1000, q=math.log(1.1), T=1000.0,
                                 I0=3, r=0.052, p=0.03, K0=130.0)
        limit = continuous_population(params, 400.0)
        exact_sup = params.N0 * (1.0 + 1.0 / (params.a * (1.0 + params.a)))
        assert limit == pytest.approx(exact_sup, rel=1e-6)
        assert limit == pytest.approx(1000.0, rel=2 * params.N0 / params.N)

    def test_tracks_discrete_law_at_integer_times(self):
        q = QuasiLogisticParams(N0=10, N=1000, n=0.1, T=6)
        path = quasi_logistic_path(q, 150)
        worst = max(abs(continuous_population(BASE, float(t)) - path.active[t])
                    / max(path.active[t], 1.0) for t in range(151))
        # agreement is first order in N0/N
        assert worst < 5 * (q.N0 / q.N)

    def test_peak_location_golden_section(self):
        lo, hi = BASE.T, 200.0
        phi = (math.sqrt(5.0) - 1.0) / 2.0
        a, b = lo, hi
        c, d = b - phi * (b - a), a + phi * (b - a)
        for _ in range(200):
            if continuous_population(BASE, c) < continuous_population(BASE, d):
                a = c
            else:
                b = d
            c, d = b - phi * (b - a), a + phi * (b - a)
        assert continuous_population_peak(BASE) == pytest.approx(0.5 * (a + b), abs=1e-6)

    def test_flow_conservation_by_quadrature(self):
        for t in (3.0, 20.0, 80.0):
            influx = quad(lambda u: continuous_inflow_rate(BASE, u), 0, t, limit=200)[0]
            if t >= BASE.T:
                drained = quad(lambda u: continuous_outflow_rate(BASE, u),
                               BASE.T, t, limit=200)[0] + BASE.N0
            else:
                drained = 0.0
            expected = BASE.N0 + influx - drained
            assert continuous_population(BASE, t) == pytest.approx(expected, rel=1e-6)


class TestInverseTime:
    def test_round_trip(self, rng):
        peak = continuous_population(BASE, continuous_population_peak(BASE))
        for _ in range(50):
            target = rng.uniform(0.2, peak * 0.98)
            t = continuous_inverse_time(BASE, target)
            assert abs(continuous_population(BASE, t) - target) / target < 1e-9

    def test_double_root_at_peak(self):
        t_max = continuous_population_peak(BASE)
        peak = continuous_population(BASE, t_max)
        t = continuous_inverse_time(BASE, peak * (1 - 1e-13))
        assert t == pytest.approx(t_max, abs=1e-3)

    def test_unreachable_threshold(self):
        peak = continuous_population(BASE, continuous_population_peak(BASE))
        with pytest.raises(UnreachableThresholdError):
            continuous_inverse_time(BASE, peak * 1.01)


class TestCapital:
    def test_pure_compounding_without_flows(self):
        # vanishing flow scale: r = 0 kills coupons, N0 -> 0 kills flows
        params = ContinuumParams(N0=1e-9, N=1000, q=math.log(1.1), T=6.0,
                                 I0=3, r=0.0, p=0.03, K0=130.0)
        for t in (0.5, 5.0, 40.0):
            assert continuous_capital(params, t) == pytest.approx(
                130.0 * math.exp(0.03 * t), rel=1e-9)

    def test_ode_residual(self):
        h = 1e-4
        ts = [0.3, 2.2, 5.9, 6.4, 11.0, 33.3, 61.7, 90.1, 113.5]
        for t in ts:
            dK = (continuous_capital(BASE, t + h) - continuous_capital(BASE, t - h)) / (2 * h)
            rhs = continuous_budget_rhs(BASE, t, continuous_capital(BASE, t))
            assert abs(dK - rhs) / max(1.0, abs(rhs)) < 1e-5

    def test_aggregates_match_quadrature(self):
        from ponzisim.continuum import continuous_aggregates
        for t in (4.0, 30.0, 75.0):
            agg = continuous_aggregates(BASE, t)
            dep = quad(lambda u: BASE.I0 * continuous_inflow_rate(BASE, u),
                       0, t, limit=200)[0]
            assert agg["deposits"] == pytest.approx(dep, rel=1e-8)
            coup = quad(lambda u: BASE.r * BASE.I0 * continuous_population(BASE, u),
                        0, t, points=[BASE.T], limit=200)[0]
            assert agg["coupons"] == pytest.approx(coup, rel=1e-8)
            if t >= BASE.T:
                wd = quad(lambda u: BASE.I0 * continuous_outflow_rate(BASE, u),
                          BASE.T, t, limit=200)[0] + BASE.N0 * BASE.I0
                assert agg["withdrawals"] == pytest.approx(wd, rel=1e-8)

    def test_capital_matches_discounted_quadrature(self):
        # independent evaluation of the integrating-factor solution
        for t in (3.0, 20.0, 50.0):
            flows = quad(
                lambda u: (BASE.I0 * (continuous_inflow_rate(BASE, u)
                                      - continuous_outflow_rate(BASE, u))
                           - BASE.r * BASE.I0 * continuous_population(BASE, u))
                * math.exp(-BASE.p * u),
                0, t, points=[BASE.T] if t > BASE.T else None, limit=300)[0]
            lump = BASE.N0 * BASE.I0 * math.exp(-BASE.p * BASE.T) if t >= BASE.T else 0.0
            expected = math.exp(BASE.p * t) * (BASE.K0 + flows - lump)
            assert continuous_capital(BASE, t) == pytest.approx(expected, rel=1e-8)

    def test_uncompounded_variant_sits_above_the_ode_solution(self):
        before = continuous_capital(BASE, 3.0), continuous_capital(BASE, 3.0, uncompounded_constants=True)
        assert before[0] != pytest.approx(before[1], rel=1e-12)  # deposit tail differs pre-T too
        late_true = continuous_capital(BASE, 80.0)
        late_alt = continuous_capital(BASE, 80.0, uncompounded_constants=True)
        # skipping compounding on carried constants overstates late capital
        assert late_alt > late_true

    def test_p_equal_q_is_regularized(self):
        params = ContinuumParams(N0=10, N=1000, q=0.05, T=6.0,
                                 I0=3, r=0.052, p=0.05, K0=130.0)
        h = 1e-4
        for t in (2.0, 10.0):
            dK = (continuous_capital(params, t + h) - continuous_capital(params, t - h)) / (2 * h)
            rhs = continuous_budget_rhs(params, t, continuous_capital(params, t))
            assert abs(dK - rhs) / max(1.0, abs(rhs)) < 1e-4

    def test_exact_prefactor_flag(self):
        exact = ContinuumParams(N0=10, N=1000, q=math.log(1.1), T=6.0,
                                I0=3, r=0.052, p=0.03, K0=130.0, exact_prefactor=True)
        # (e^q - 1)/(1 - N0/N) vs q: about 1% apart for these values
        assert exact.prefactor == pytest.approx(0.1 / 0.99, rel=1e-12)
        assert continuous_population(exact, 30.0) != pytest.approx(
            continuous_population(BASE, 30.0), rel=1e-4)
        h = 1e-4
        t = 20.0
        dK = (continuous_capital(exact, t + h) - continuous_capital(exact, t - h)) / (2 * h)
        rhs = continuous_budget_rhs(exact, t, continuous_capital(exact, t))
        assert abs(dK - rhs) / max(1.0, abs(rhs)) < 1e-5
