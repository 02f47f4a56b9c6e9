import math

import mpmath
import numpy as np
import pytest
from scipy import integrate

from services.errors import NonPositiveScale, PoleArgument, PreconditionError
from services.gamma_kernel import (
    EULER_GAMMA,
    cgamma,
    laplace_moment,
    loggamma_derivs,
    pf_laplace_moment,
    polygamma,
)
from services.settings import MAX_GAMMA_DERIV


def mp_gamma_derivative(z: complex, n: int) -> complex:
    with mpmath.workdps(30):
        return complex(mpmath.diff(mpmath.gamma, mpmath.mpc(z.real, z.imag), n))


# --------------------------
# Γ and polygamma
# --------------------------
@pytest.mark.parametrize("z", [1.0, 0.5, 3.7, -2.5, complex(2, 3), complex(-1.3, 0.4), complex(0.2, -5.0)])
def test_cgamma_against_mpmath(z):
    z = complex(z)
    with mpmath.workdps(30):
        expected = complex(mpmath.gamma(mpmath.mpc(z.real, z.imag)))
    assert cgamma(z) == pytest.approx(expected, rel=1e-12)


def test_cgamma_recurrence_on_random_points():
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 100:
        z = complex(rng.uniform(-10, 10), rng.uniform(-10, 10))
        if abs(z - round(z.real)) < 1e-3:
            continue
        lhs, rhs = cgamma(z + 1), z * cgamma(z)
        assert abs(lhs - rhs) <= 1e-12 * abs(lhs)
        checked += 1


@pytest.mark.parametrize("z", [0, -2, -1 + 1e-8, complex(-3, 1e-9)])
def test_cgamma_poles(z):
    with pytest.raises(PoleArgument):
        cgamma(z)


def test_polygamma_real_and_complex():
    assert polygamma(0, 1.0) == pytest.approx(-EULER_GAMMA, rel=1e-14)
    assert polygamma(1, 1.0) == pytest.approx(math.pi ** 2 / 6, rel=1e-14)
    z = complex(0.7, 1.9)
    with mpmath.workdps(30):
        expected = complex(mpmath.polygamma(2, mpmath.mpc(z.real, z.imag)))
    assert polygamma(2, z) == pytest.approx(expected, rel=1e-12)


# --------------------------
# Derivatives
# --------------------------
def test_loggamma_derivs_at_one():
    g = loggamma_derivs(1.0, 2)
    assert g[0] == pytest.approx(1.0)
    assert g[1] == pytest.approx(-EULER_GAMMA, rel=1e-14)
    assert g[2] == pytest.approx(EULER_GAMMA ** 2 + math.pi ** 2 / 6, rel=1e-13)


@pytest.mark.parametrize("z", [complex(2.5, 0.5), complex(-0.6, 1.2), 4.2])
def test_loggamma_derivs_against_mpmath(z):
    z = complex(z)
    derivs = loggamma_derivs(z, 4)
    for n, value in enumerate(derivs):
        assert value == pytest.approx(mp_gamma_derivative(z, n), rel=1e-10)


def test_loggamma_derivs_bounds():
    with pytest.raises(PreconditionError):
        loggamma_derivs(1.5, MAX_GAMMA_DERIV + 1)
    with pytest.raises(PreconditionError):
        loggamma_derivs(1.5, -1)


# --------------------------
# Laplace moments
# --------------------------
def test_laplace_moment_closed_forms():
    assert laplace_moment(0, 0, 1.0) == pytest.approx(1.0)
    assert laplace_moment(0.5, 0, 2.0) == pytest.approx(math.gamma(1.5) * 2 ** -1.5, rel=1e-14)
    g, dg = loggamma_derivs(1.5, 1)
    expected = (dg - g * math.log(2.0)) * 2 ** -1.5
    assert laplace_moment(0.5, 1, 2.0) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("lam, k, m", [(0.5, 1, 2.0), (1.2, 2, 0.7), (-0.4, 1, 3.0)])
def test_laplace_moment_against_quadrature(lam, k, m):
    value = integrate.quad(
        lambda x: x ** lam * math.log(x) ** k * math.exp(-m * x), 0, np.inf, epsabs=1e-13, epsrel=1e-11, limit=200
    )[0]
    assert laplace_moment(lam, k, m) == pytest.approx(value, rel=1e-9)


def test_laplace_moment_rejects_bad_variable():
    with pytest.raises(NonPositiveScale):
        laplace_moment(0.5, 0, 0.0)


def test_finite_part_moments():
    assert pf_laplace_moment(1, 0, 1.0) == pytest.approx(-EULER_GAMMA, abs=1e-9)
    assert pf_laplace_moment(1, 0, 2.0) == pytest.approx(-EULER_GAMMA - math.log(2.0), abs=1e-9)
    # n = 2: -m (1 - γ - log m)
    for m in (1.0, 3.0):
        assert pf_laplace_moment(2, 0, m) == pytest.approx(-m * (1 - EULER_GAMMA - math.log(m)), abs=1e-9)


def test_finite_part_moment_with_log():
    # d/dε [Γ(ε) - 1/ε] at ε = 0
    expected = EULER_GAMMA ** 2 / 2 + math.pi ** 2 / 12
    assert pf_laplace_moment(1, 1, 1.0) == pytest.approx(expected, rel=1e-9)
