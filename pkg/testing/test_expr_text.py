import math

import pytest
from hypothesis import given, settings, strategies as st

from services.errors import InvalidTerm, ParseError
from services.expr_text import (
    expr_from_json,
    expr_to_json,
    format_complex,
    format_expr,
    parse_complex,
    parse_expr,
)
from services.qahd_algebra import (
    QahdExpr,
    canonicalize,
    delta,
    expr_of,
    pfminus,
    pfplus,
    pole_distance,
    single,
    xminus,
    xplus,
)


# --------------------------
# Parsing
# --------------------------
def test_parse_single_term():
    assert parse_expr("xplus(0.5,1)") == single(xplus(0.5, 1))
    assert parse_expr("  delta( 2 ) ") == single(delta(2))
    assert parse_expr("0") == QahdExpr()


def test_parse_signed_combination():
    expr = parse_expr("2*delta(0) - 1i*pfplus(1,0)")
    assert expr == expr_of((delta(0), 2.0), (pfplus(1, 0), -1j))
    expr = parse_expr("-xminus(-0.5+0.25i,2) + 1-0.5i*xplus(0.3,0)")
    assert expr.coeff(xminus(complex(-0.5, 0.25), 2)) == -1.0
    assert expr.coeff(xplus(0.3, 0)) == complex(1.0, -0.5)


@pytest.mark.parametrize("text", ["- 2*delta(0)", "-2*delta(0)", "  -  2 * delta(0)", "0*pfplus(1,0) - 2*delta(0)"])
def test_leading_sign_before_coefficient(text):
    assert parse_expr(text) == single(delta(0), -2.0)


def test_leading_complex_coefficient_keeps_its_sign():
    assert parse_expr("-1.0-0.5i*delta(0)") == single(delta(0), complex(-1.0, -0.5))
    assert parse_expr("+ 1-0.5i*delta(0)") == single(delta(0), complex(1.0, -0.5))


def test_parse_boundary_value_expands():
    expr = parse_expr("xplusi0(-1,0)")
    assert expr.coeff(pfplus(1, 0)) == 1.0
    assert expr.coeff(pfminus(1, 0)) == -1.0
    assert abs(expr.coeff(delta(0)) + 1j * math.pi) <= 1e-15


def test_parse_cancels_to_zero():
    assert parse_expr("delta(1) - delta(1)").is_zero()


@pytest.mark.parametrize("text, offset", [
    ("xplus(0.5,1) + foo(1)", 15),
    ("xplus(0.5,1) * 2", 13),
    ("xplus(0.5 1)", 10),
    ("pfplus(1.5,0)", 8),
])
def test_parse_error_offsets(text, offset):
    with pytest.raises(ParseError) as info:
        parse_expr(text)
    assert info.value.offset == offset
    assert info.value.to_dict()["offset"] == offset


def test_parse_error_on_empty_input():
    with pytest.raises(ParseError):
        parse_expr("   ")


def test_parse_rejects_pole_degree():
    with pytest.raises(InvalidTerm):
        parse_expr("xplus(-1,0)")


def test_parse_complex_literals():
    assert parse_complex("1.3") == 1.3
    assert parse_complex("2i") == 2j
    assert parse_complex("2-1e-3i") == complex(2, -1e-3)
    with pytest.raises(ParseError):
        parse_complex("2+")


# --------------------------
# Formatting round trip
# --------------------------
def test_format_complex():
    assert format_complex(1.5) == "1.5"
    assert format_complex(complex(0.5, -2)) == "0.5-2.0i"


coefficients = st.complex_numbers(
    min_magnitude=1e-3, max_magnitude=10.0, allow_nan=False, allow_infinity=False
)
degrees = st.builds(complex, st.floats(-3.5, 3.0), st.floats(-2.0, 2.0)).filter(
    lambda lam: pole_distance(lam) > 1e-3
)
log_powers = st.integers(min_value=0, max_value=3)
terms = st.one_of(
    st.builds(xplus, degrees, log_powers),
    st.builds(xminus, degrees, log_powers),
    st.builds(pfplus, st.integers(1, 4), log_powers),
    st.builds(pfminus, st.integers(1, 4), log_powers),
    st.builds(delta, st.integers(0, 4)),
)
expressions = st.lists(st.tuples(terms, coefficients), max_size=6).map(canonicalize)


@given(expressions)
@settings(max_examples=300, deadline=None)
def test_format_parse_round_trip(expr):
    assert parse_expr(format_expr(expr)) == expr


@given(expressions)
@settings(max_examples=100, deadline=None)
def test_json_round_trip(expr):
    assert expr_from_json(expr_to_json(expr)) == expr


def test_json_shape():
    rows = expr_to_json(expr_of((xplus(0.5, 1), 2.0), (delta(0), 1j)))
    assert rows[0] == {"family": "xplus", "degree": {"re": 0.5, "im": 0.0}, "k": 1, "coeff": {"re": 2.0, "im": 0.0}}
    assert rows[1] == {"family": "delta", "m": 0, "coeff": {"re": 0.0, "im": 1.0}}
    with pytest.raises(InvalidTerm):
        expr_from_json([{"family": "heaviside"}])
