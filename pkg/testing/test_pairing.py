import math

import mpmath
import numpy as np
import pytest
from scipy import integrate

from services.errors import InvalidTerm, NonPositiveScale, PreconditionError, QuadratureFailure
from services.gamma_kernel import EULER_GAMMA
from services.pairing import PairingEngine, pair, pair_term, pair_value, scaled_argument, subtraction_order
from services.probes import HermiteGaussian
from services.qahd_algebra import QahdExpr, delta, expr_of, pfminus, pfplus, principal_value, single, xminus, xplus


def half_gamma_derivative(lam: complex, k: int) -> complex:
    """d^k/dλ^k ½Γ((λ+1)/2) = ⟨x_+^λ log^k x_+, e^{-x^2}⟩."""
    with mpmath.workdps(30):
        value = mpmath.diff(lambda l: mpmath.gamma((l + 1) / 2) / 2, mpmath.mpc(lam.real, lam.imag), k)
    return complex(value)


# --------------------------
# Subtraction order
# --------------------------
@pytest.mark.parametrize("lam, n", [(1.5, 0), (-0.5, 0), (-1.5, 1), (-3.2, 3), (complex(-2.5, 4.0), 2)])
def test_subtraction_order(lam, n):
    assert subtraction_order(lam) == n


def test_subtraction_order_rejects_poles():
    with pytest.raises(InvalidTerm):
        subtraction_order(-2.0 + 1e-9)


# --------------------------
# Point masses
# --------------------------
def test_delta_pairings(gaussian, odd_gaussian, lopsided):
    assert pair_term(delta(0), gaussian).value == 1.0
    assert pair_term(delta(1), odd_gaussian).value == -1.0
    assert pair_term(delta(2), gaussian).value == -2.0
    expected = 2 * lopsided.deriv_at_zero(0) - lopsided.deriv_at_zero(1)
    assert pair_value(expr_of((delta(0), 2.0), (delta(1), 1.0)), lopsided) == pytest.approx(expected, rel=1e-15)


# --------------------------
# Power families against Γ
# --------------------------
def test_first_moment(gaussian):
    assert pair_term(xplus(1, 0), gaussian).value == pytest.approx(0.5, rel=1e-10)


@pytest.mark.parametrize("lam, k", [
    (0.5, 0), (0.5, 1), (0.5, 2),
    (-0.5, 0), (-1.5, 0), (-1.5, 1), (-2.5, 0),
    (complex(0.3, 0.8), 1), (complex(-1.7, -0.6), 2),
])
def test_power_pairing_against_gamma(gaussian, lam, k):
    lam = complex(lam)
    got = pair_term(xplus(lam, k), gaussian).value
    assert got == pytest.approx(half_gamma_derivative(lam, k), rel=1e-8)


def test_minus_family_pairs_against_reflection(lopsided):
    for term, mirror in [(xminus(-1.3, 1), xplus(-1.3, 1)), (pfminus(2, 1), pfplus(2, 1))]:
        left = pair_term(term, lopsided).value
        right = pair_term(mirror, lopsided.reflected()).value
        assert left == right


def test_positive_kernel_pairs_positive(gaussian):
    for lam in (-0.9, -0.3, 0.0, 1.7, 4.0):
        assert pair_term(xplus(lam, 0), gaussian).value.real > 0


def test_analytic_continuation_does_not_depend_on_subtraction(lopsided):
    base = pair_term(xplus(-0.5, 1), lopsided).value
    for n in (1, 2, 3):
        assert pair_term(xplus(-0.5, 1), lopsided, subtraction=n).value == pytest.approx(base, rel=1e-8)
    with pytest.raises(PreconditionError):
        pair_term(xplus(-2.5, 0), lopsided, subtraction=1)


@pytest.mark.parametrize("scale", [1e-4, 1e4])
def test_extreme_probe_widths(scale):
    phi = HermiteGaussian.from_hermite([1.0], scale)
    got = pair_term(xplus(0.5, 0), phi).value
    expected = 0.5 * math.gamma(0.75) * scale ** 1.5
    assert got == pytest.approx(expected, rel=1e-8)


# --------------------------
# Finite parts
# --------------------------
def test_finite_part_of_inverse(gaussian):
    assert pair_term(pfplus(1, 0), gaussian).value == pytest.approx(-EULER_GAMMA / 2, rel=1e-9)


def test_finite_part_against_independent_quadrature(lopsided):
    c0, c1 = lopsided.taylor_coeff(0).real, lopsided.taylor_coeff(1).real

    def near(x):
        return (lopsided.value(x).real - c0 - c1 * x) / x ** 2

    inner = integrate.quad(near, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12)[0]
    outer = integrate.quad(lambda x: lopsided.value(x).real / x ** 2, 1.0, np.inf, epsabs=1e-13, epsrel=1e-12)[0]
    # the constant is subtracted on the whole half-line: ∫_1^∞ c0 / x^2 = c0
    expected = inner + outer - c0
    assert pair_term(pfplus(2, 0), lopsided).value == pytest.approx(expected, rel=1e-8)


def test_second_order_finite_part(gaussian, odd_gaussian):
    # ∫ (e^{-x^2} - 1) / x^2 = -√π
    assert pair_term(pfplus(2, 0), gaussian).value == pytest.approx(-math.sqrt(math.pi), rel=1e-9)
    # the slope is subtracted under the Heaviside window only
    assert pair_term(pfplus(2, 0), odd_gaussian).value == pytest.approx(-EULER_GAMMA / 2, rel=1e-9)


def test_principal_value_on_odd_probe(odd_gaussian):
    # P(1/x) against x e^{-x^2} is ∫ e^{-x^2} over the line
    assert pair_value(principal_value(1), odd_gaussian) == pytest.approx(math.sqrt(math.pi), rel=1e-9)


# --------------------------
# Scaling and results
# --------------------------
def test_scaled_argument(odd_gaussian):
    assert scaled_argument(odd_gaussian, 1.0) is odd_gaussian
    assert scaled_argument(odd_gaussian, 4.0).scale == 4.0
    for a in (0.0, -2.0, float("nan")):
        with pytest.raises(NonPositiveScale):
            scaled_argument(odd_gaussian, a)


def test_homogeneous_pairing_scales(lopsided):
    lam, a = complex(-0.4, 0.3), 3.0
    base = pair_term(xplus(lam, 0), lopsided).value
    scaled = pair_term(xplus(lam, 0), scaled_argument(lopsided, a)).value
    assert scaled == pytest.approx(a ** (lam + 1) * base, rel=1e-8)


def test_result_document(gaussian):
    res = pair(expr_of((xplus(0.5, 0), 2.0), (delta(0), 1.0)), gaussian)
    doc = res.to_dict()
    assert set(doc) == {"value", "error_estimate", "pieces"}
    assert len(doc["pieces"]) == 2
    assert doc["value"]["re"] == pytest.approx(math.gamma(0.75) + 1.0, rel=1e-9)
    assert pair(QahdExpr(), gaussian).value == 0


def test_engine_rejects_bad_tolerance():
    with pytest.raises(PreconditionError):
        PairingEngine(tol=0.0)


def test_quadrature_failure_is_reported(gaussian):
    engine = PairingEngine(tol=1e-14, panel_limit=1)
    with pytest.raises(QuadratureFailure):
        engine.pair(single(xplus(-0.45, 3)), gaussian)


class InfiniteGaussian(HermiteGaussian):
    def value(self, x):
        return np.full(np.shape(x), np.inf, dtype=complex)


def test_non_finite_integral_is_a_failure():
    phi = InfiniteGaussian([1.0])
    with pytest.raises(QuadratureFailure):
        pair_term(xplus(0.5, 0), phi)


@pytest.mark.parametrize("lam, k", [(-0.9999, 1), (-0.999, 1), (-0.99999, 0), (-1.9995, 0)])
def test_degrees_just_above_a_pole(gaussian, lam, k):
    got = pair_term(xplus(lam, k), gaussian).value
    assert got == pytest.approx(half_gamma_derivative(complex(lam), k), rel=1e-8)


@pytest.mark.parametrize("scale", [1e-5, 1e5])
def test_finite_part_at_extreme_probe_widths(scale):
    # ⟨P(1/x_+), φ(x/s)⟩ = ⟨P(1/x_+), φ⟩ + log s · φ(0)
    phi = HermiteGaussian.from_hermite([1.0], scale)
    got = pair_term(pfplus(1, 0), phi).value
    assert got == pytest.approx(-EULER_GAMMA / 2 + math.log(scale), rel=1e-8)


@pytest.mark.parametrize("scale", [1e-5, 1e5])
def test_taylor_remainder_at_extreme_widths(scale):
    phi = HermiteGaussian.from_hermite([0.0, 1.0], scale)
    xs = np.array([0.1, 0.49, 0.51, 2.0]) * scale
    expected = phi.value(xs) - xs / scale
    assert np.allclose(phi.taylor_remainder(xs, 2), expected, rtol=1e-9, atol=1e-15)
