import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from ponzisim import (
    AticiParams,
    ExponentialTerm,
    InvalidParameterError,
    ParlarParams,
    RecurrenceSpec,
    SpreadsheetParams,
    StylisticParams,
    iterate_linear_recurrence,
    reference_model_capital,
    solve_linear_recurrence,
)
from ponzisim.linrec import spreadsheet_liabilities, stylistic_pieces


def test_two_step_hand_recursion():
    # 0 -> 1 -> 2.1 with zero homogeneous rate and one forcing stream
    spec = RecurrenceSpec(i=0.0, K_t0=0.0, t0=0, terms=(ExponentialTerm(1.0, 0.1),))
    assert solve_linear_recurrence(spec, 2) == pytest.approx(2.1, abs=1e-12)


def test_homogeneous_solution():
    spec = RecurrenceSpec(i=0.07, K_t0=50.0, t0=3, terms=())
    assert solve_linear_recurrence(spec, 10) == pytest.approx(50.0 * 1.07 ** 7, rel=1e-14)


def test_resonance_flag_and_accuracy():
    clean = RecurrenceSpec(i=0.05, K_t0=10.0, terms=(ExponentialTerm(2.0, 0.03),))
    assert not clean.needs_regularization
    resonant = RecurrenceSpec(i=0.05, K_t0=10.0, terms=(ExponentialTerm(2.0, 0.05),))
    assert resonant.needs_regularization
    # nudged solution stays within O(eps * t) of the exact resonant value
    # K_t = K0 (1+i)^t + c t (1+i)^(t-1)
    for t in (1, 10, 100):
        exact = 10.0 * 1.05 ** t + 2.0 * t * 1.05 ** (t - 1)
        assert solve_linear_recurrence(resonant, t) == pytest.approx(exact, rel=1e-6)


def test_requires_t_at_or_after_t0():
    spec = RecurrenceSpec(i=0.0, K_t0=1.0, t0=5, terms=())
    with pytest.raises(InvalidParameterError):
        solve_linear_recurrence(spec, 4)


@settings(max_examples=80, deadline=None)
@given(
    i=st.floats(-0.1, 0.2),
    K0=st.floats(-100, 100),
    t0=st.integers(0, 10),
    c1=st.floats(-10, 10),
    n1=st.floats(-0.1, 0.3),
    c2=st.floats(-10, 10),
    n2=st.floats(-0.1, 0.3),
)
def test_solution_satisfies_recurrence(i, K0, t0, c1, n1, c2, n2):
    # resonant coefficients c/(i-n) amplify rounding without bound, so the
    # tight identity tolerance applies away from the collision (the nudge
    # policy's own accuracy is covered separately)
    assume(min(abs(n1 - i), abs(n2 - i)) > 1e-4)
    spec = RecurrenceSpec(i=i, K_t0=K0, t0=t0,
                          terms=(ExponentialTerm(c1, n1), ExponentialTerm(c2, n2)))
    rates = spec.effective_rates()
    prev = solve_linear_recurrence(spec, t0)
    for t in range(t0 + 1, t0 + 40):
        value = solve_linear_recurrence(spec, t)
        forcing = sum(term.c * (1.0 + n) ** (t - 1)
                      for term, n in zip(spec.terms, rates))
        expected = (1.0 + i) * prev + forcing
        assert abs(value - expected) <= 1e-10 * max(1.0, abs(expected))
        prev = value


def test_matches_naive_iteration():
    spec = RecurrenceSpec(i=0.04, K_t0=25.0, t0=2,
                          terms=(ExponentialTerm(3.0, 0.11), ExponentialTerm(-1.5, 0.02)))
    for t in (2, 17, 60, 100):
        assert solve_linear_recurrence(spec, t) == pytest.approx(
            iterate_linear_recurrence(spec, t), rel=1e-10)


# ---------------------------------------------------------------------------
# reference models, each checked against its own defining iteration
# ---------------------------------------------------------------------------

ATICI = AticiParams(r_n=0.03, r_i=0.08, r_w=0.1, r_p=0.12, D0=5.0, K0=100.0)
STYLISTIC = StylisticParams(I0=100.0, g=0.1, r=0.06, c=2.0)
SPREADSHEET = SpreadsheetParams(K0=100.0, D=30.0, i=0.02, r=0.08, w=0.05)
PARLAR = ParlarParams(c0=50.0, u0=10.0, r_hat=0.09, r=0.05, s0=40.0)


def iterate_atici(p, horizon):
    alpha, beta = p.alpha, p.beta
    W, K = 0.0, p.K0
    out = [K]
    for t in range(1, horizon + 1):
        K = (1.0 + p.r_n) * K + p.D0 * (1.0 + p.r_i) ** (t - 1) - W
        W = (1.0 + alpha) * W + beta * (1.0 + p.r_i) ** (t - 1)
        out.append(K)
    return out


def iterate_stylistic(p, horizon):
    K = p.I0
    out = [K]
    for t in range(1, horizon + 1):
        inflow = p.I0 * (1.0 + p.g) ** t
        payout = p.I0 * (1.0 + p.g) ** (t - 1) * (1.0 + p.r)
        K = K + inflow - payout - p.c
        out.append(K)
    return out


def iterate_spreadsheet(p, horizon):
    lam = p.lam
    L, K = p.D, p.K0
    out = [K]
    for t in range(1, horizon + 1):
        K = (1.0 + p.i) * (K + p.D - p.w * L)
        L = lam * L + p.D
        out.append(K)
    return out


def iterate_parlar(p, horizon):
    # cumulative net deposits u0 (1+r_hat)^t feed the fund; payouts draw
    # rate r on the liability stock seeded by s0
    c = p.c0
    out = [c]
    for t in range(1, horizon + 1):
        c = c + p.u0 * (p.r_hat - p.r) * (1.0 + p.r_hat) ** (t - 1) \
            - p.r * (p.s0 - p.u0 / p.r_hat)
        out.append(c)
    return out


@pytest.mark.parametrize("model,params,oracle", [
    ("atici", ATICI, iterate_atici),
    ("stylistic", STYLISTIC, iterate_stylistic),
    ("spreadsheet", SPREADSHEET, iterate_spreadsheet),
    ("parlar", PARLAR, iterate_parlar),
])
def test_reference_models_match_their_iterations(model, params, oracle):
    expected = oracle(params, 50)
    for t in range(51):
        value = reference_model_capital(model, params, t)
        assert value == pytest.approx(expected[t], rel=1e-9), f"{model} at t={t}"


def test_stylistic_starts_at_initial_inflow():
    assert reference_model_capital("stylistic", STYLISTIC, 0) == STYLISTIC.I0


def test_stylistic_decomposition_residual_vanishes():
    # the capital is exactly the superposition of a growing geometric piece
    # and a falling arithmetic piece; the fit residual is pure rounding
    for t in (0, 7, 33):
        geometric, arithmetic = stylistic_pieces(STYLISTIC, t)
        total = reference_model_capital("stylistic", STYLISTIC, t)
        assert abs(total - geometric - arithmetic) <= 1e-14 * max(1.0, abs(total))


def test_spreadsheet_liabilities_closed_form_and_flat_limit():
    p = SPREADSHEET
    L = p.D
    for t in range(40):
        assert spreadsheet_liabilities(p, t) == pytest.approx(L, rel=1e-12)
        L = p.lam * L + p.D
    # lam == 1 degenerates to an arithmetic stack of deposits
    w_flat = 1.0 - 1.0 / (1.0 + p.r)
    flat = SpreadsheetParams(K0=p.K0, D=p.D, i=p.i, r=p.r, w=w_flat)
    assert spreadsheet_liabilities(flat, 7) == pytest.approx(p.D * 8, rel=1e-9)


def test_unknown_model_rejected():
    with pytest.raises(InvalidParameterError):
        reference_model_capital("nope", STYLISTIC, 1)
    with pytest.raises(InvalidParameterError):
        reference_model_capital("atici", STYLISTIC, 1)
