import cmath
import math

import pytest

import services.fourier_table as fourier_table
from services.errors import BranchUnsupported, IllConditioned, PreconditionError, Unsupported, ZeroFrequency
from services.fourier_table import (
    FreqExpr,
    FreqFamily,
    FreqTerm,
    canonicalize_freq,
    eval_freq,
    fourier,
    freq_from_json,
    freq_to_json,
    ft_closed_form_coeffs,
    gamma_assoc,
    gamma_table,
    parseval_check,
    pf_gamma_closed_form,
    solve_ft_coeffs,
)
from services.gamma_kernel import EULER_GAMMA, cgamma, loggamma_derivs
from services.qahd_algebra import delta, expr_of, pfminus, pfplus, single, xminus, xplus


def rel(a: complex, b: complex) -> float:
    return abs(a - b) / abs(b)


def one(family, exponent, log_power=0, coeff=1.0) -> FreqExpr:
    return canonicalize_freq([(FreqTerm(family, exponent, log_power), coeff)])


# --------------------------
# Evaluation on the branches
# --------------------------
def test_eval_plus_branch_on_negative_axis():
    assert eval_freq(one(FreqFamily.XIPLUSI0, 0.5), -1.0) == pytest.approx(1j, abs=1e-15)
    assert eval_freq(one(FreqFamily.XIPOLYLOG, 0, 1), -2.0) == pytest.approx(complex(math.log(2), math.pi))
    assert eval_freq(one(FreqFamily.XIPOLYLOGMINUS, 0, 1), -2.0) == pytest.approx(complex(math.log(2), -math.pi))


def test_eval_plus_branch_on_imaginary_axis():
    m = 2.0
    value = eval_freq(one(FreqFamily.XIPLUSI0, -1.5), 1j * m)
    assert value == pytest.approx(cmath.exp(-1.5 * (math.log(m) + 0.5j * math.pi)), rel=1e-14)


def test_eval_errors():
    with pytest.raises(ZeroFrequency):
        eval_freq(one(FreqFamily.XIPLUSI0, 0.5), 0.0)
    with pytest.raises(BranchUnsupported):
        eval_freq(one(FreqFamily.XIMINUSI0, 0.5), 1j)
    with pytest.raises(BranchUnsupported):
        eval_freq(one(FreqFamily.XIPLUSI0, 0.5), -1j)


def test_polynomial_term_without_log_has_no_branch():
    assert FreqTerm(FreqFamily.XIPOLYLOGMINUS, 2, 0) == FreqTerm(FreqFamily.XIPOLYLOG, 2, 0)


# --------------------------
# Transform table
# --------------------------
def test_transform_of_power():
    lam = 0.5
    coeff = fourier(single(xplus(lam, 0))).coeff(FreqTerm(FreqFamily.XIPLUSI0, -lam - 1, 0))
    assert rel(coeff, 1j ** (lam + 1) * cgamma(lam + 1)) <= 1e-10


def test_transform_of_power_with_log():
    lam = 0.3
    g, dg = loggamma_derivs(lam + 1, 1)
    phase = 1j ** (lam + 1)
    out = fourier(single(xplus(lam, 1)))
    assert rel(out.coeff(FreqTerm(FreqFamily.XIPLUSI0, -lam - 1, 1)), -phase * g) <= 1e-8
    assert rel(out.coeff(FreqTerm(FreqFamily.XIPLUSI0, -lam - 1, 0)), phase * (dg + 0.5j * math.pi * g)) <= 1e-8


def test_transform_of_inverse_finite_part():
    out = fourier(single(pfplus(1, 0)))
    assert rel(out.coeff(FreqTerm(FreqFamily.XIPOLYLOG, 0, 1)), -1.0) <= 1e-8
    assert rel(out.coeff(FreqTerm(FreqFamily.XIPOLYLOG, 0, 0)), complex(-EULER_GAMMA, math.pi / 2)) <= 1e-8


def test_transform_of_delta_derivatives():
    assert fourier(single(delta(0))) == one(FreqFamily.XIPOLYLOG, 0)
    assert fourier(single(delta(2), 3.0)).coeff(FreqTerm(FreqFamily.XIPOLYLOG, 2, 0)) == pytest.approx(-3.0)


@pytest.mark.parametrize("term", [xminus(0.5, 0), xminus(-0.4, 1), pfminus(1, 0)])
def test_minus_transform_is_reflected_plus_transform(term):
    mirror = xplus(term.degree, term.k) if term.degree is not None else pfplus(term.n, term.k)
    minus, plus = fourier(single(term)), fourier(single(mirror))
    for xi in (0.6, 1.7, -2.3):
        assert eval_freq(minus, xi) == pytest.approx(eval_freq(plus, -xi), rel=1e-9)


@pytest.mark.parametrize("lam", [-0.7, -0.3, 0.3, 0.7, 1.5, complex(0.4, 0.6), complex(-0.5, -0.8)])
def test_solver_agrees_with_closed_form(lam):
    solved = solve_ft_coeffs("xplus", lam, 1)
    closed = ft_closed_form_coeffs(lam, 1)
    assert solved.method == "substitution"
    assert solved.residual < 1e-10
    for j in range(2):
        assert rel(solved[j], closed[j]) <= 1e-8


def test_solver_reports_ill_conditioning(monkeypatch):
    monkeypatch.setattr(fourier_table, "COND_MAX", 1.0)
    with pytest.raises(IllConditioned):
        solve_ft_coeffs("xplus", 0.3, 2)


def test_solver_rejects_other_families():
    with pytest.raises(Unsupported):
        solve_ft_coeffs("delta", 0, 1)
    with pytest.raises(PreconditionError):
        fourier(single(xplus(0.5, 1)), method="guess")


@pytest.mark.parametrize("term, degree, order", [
    (xplus(0.5, 2), -1.5, 2),
    (pfplus(2, 1), 1, 2),
    (delta(3), 3, 0),
    (xminus(complex(0.2, 0.5), 1), complex(-1.2, -0.5), 1),
])
def test_degree_order_duality(term, degree, order):
    (cls,) = fourier(single(term), method="closed-form" if term.family.value.startswith("x") else "substitution").degree_order()
    assert abs(cls.degree - degree) <= 1e-12
    assert cls.order == order


# --------------------------
# Associated Γ-functions
# --------------------------
def test_gamma_assoc_at_regular_argument():
    lam = 0.3
    g, dg = loggamma_derivs(lam + 1, 1)
    assert rel(gamma_assoc(1, lam + 1, 1).value, -0.5j * math.pi * g) <= 1e-10
    assert rel(gamma_assoc(0, lam + 1, 1).value, dg + 0.5j * math.pi * g) <= 1e-10


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_pf_gamma_closed_form_matches_solver(n):
    closed = pf_gamma_closed_form(n)
    for j in (0, 1):
        solved = gamma_assoc(j, -n + 1, 1, method="substitution").value
        assert rel(solved, closed[j]) <= 1e-9


def test_pf_gamma_values():
    g0, g1 = pf_gamma_closed_form(2)
    assert g1 == pytest.approx(0.5j * math.pi)
    assert g0 == pytest.approx(-(1.0 - EULER_GAMMA + 0.5j * math.pi))


@pytest.mark.parametrize("lam", [0.6, 1.4, complex(2.2, 0.7), complex(0.9, -1.1)])
def test_gamma_recurrence_off_integers(lam):
    assert rel(gamma_assoc(1, lam + 1, 1).value, lam * gamma_assoc(1, lam, 1).value) <= 1e-9
    assert rel(gamma_assoc(0, lam + 1, 1).value, lam * gamma_assoc(0, lam, 1).value + cgamma(lam)) <= 1e-9


@pytest.mark.parametrize("n", range(1, 7))
def test_gamma_recurrence_at_integers(n):
    upper = gamma_assoc(0, -n + 1, 1).value
    lower = gamma_assoc(0, -n, 1).value
    assert rel(upper, -n * lower + (-1) ** n / math.factorial(n)) <= 1e-9
    assert rel(gamma_assoc(1, -n + 1, 1).value, -n * gamma_assoc(1, -n, 1).value) <= 1e-9


def test_gamma_table_rows():
    rows = gamma_table(1, [1.3, 0])
    assert [(r.j, r.argument) for r in rows] == [(0, 1.3), (1, 1.3), (0, 0), (1, 0)]
    with pytest.raises(PreconditionError):
        gamma_assoc(2, 1.3, 1)


# --------------------------
# Parseval
# --------------------------
@pytest.mark.parametrize("expr", [
    single(xplus(0.5, 0)),
    single(xplus(0.5, 1)),
    single(pfplus(1, 0)),
    single(delta(1)),
    expr_of((xminus(-0.4, 1), 1.0), (pfminus(2, 0), 0.5j)),
])
def test_parseval(expr, battery):
    for phi in battery:
        assert parseval_check(expr, phi).relative_error <= 1e-6


# --------------------------
# JSON
# --------------------------
def test_freq_json_round_trip():
    out = fourier(expr_of((xplus(0.5, 1), 1.0), (pfminus(1, 0), 2.0), (delta(1), 1.0)), method="closed-form")
    assert freq_from_json(freq_to_json(out)) == out
    rows = freq_to_json(one(FreqFamily.XIPOLYLOG, 2, 1, 1j))
    assert rows == [{"family": "xipolylog", "exponent": 2, "log_power": 1, "coeff": {"re": 0.0, "im": 1.0}}]


@pytest.mark.parametrize("expr", [single(xplus(0.0, 1)), single(xminus(1.0, 1))])
def test_parseval_rejects_transforms_outside_the_basis(expr, gaussian):
    with pytest.raises(PreconditionError, match="x-basis"):
        parseval_check(expr, gaussian)
