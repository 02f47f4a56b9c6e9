"""
Complex Γ, its derivatives, and Laplace moments of the x_+ / P(x_+^{-n}) families.
"""
import cmath
import math
import logging
from typing import List

import mpmath
from scipy import special

from .errors import NonPositiveScale, PoleArgument, PreconditionError
from .pairing import PairingEngine
from .probes import ExponentialProbe
from .qahd_algebra import as_scalar, pfplus
from .settings import MAX_GAMMA_DERIV, POLE_EPS

logger = logging.getLogger("services.gamma_kernel")

EULER_GAMMA = 0.57721566490153286060651209008240243


def _check_argument(z: complex) -> complex:
    z = as_scalar(z, "argument")
    nearest = min(0.0, float(round(z.real)))
    if abs(z - nearest) <= POLE_EPS:
        raise PoleArgument(f"Γ has a pole at {nearest:g}; argument {z} is within {POLE_EPS:g}")
    return z


def cgamma(z: complex) -> complex:
    z = _check_argument(z)
    if z.imag == 0.0:
        return complex(special.gamma(z.real))
    return complex(special.gamma(z))


def polygamma(order: int, z: complex) -> complex:
    """ψ^{(order)}(z); ψ^{(0)} is the digamma function."""
    z = _check_argument(z)
    if order == 0:
        return complex(special.digamma(z.real if z.imag == 0.0 else z))
    if z.imag == 0.0:
        return complex(special.polygamma(order, z.real))
    return complex(mpmath.polygamma(order, mpmath.mpc(z.real, z.imag)))


def loggamma_derivs(z: complex, k: int) -> List[complex]:
    """
    [Γ(z), Γ'(z), ..., Γ^{(k)}(z)] from Γ' = ψ Γ:
        Γ^{(j+1)} = Σ_{i=0..j} C(j, i) ψ^{(i)} Γ^{(j-i)}
    """
    if k < 0 or k > MAX_GAMMA_DERIV:
        raise PreconditionError(f"derivative order must lie in 0..{MAX_GAMMA_DERIV}, got {k}")
    z = _check_argument(z)
    psis = [polygamma(i, z) for i in range(k)]
    out = [cgamma(z)]
    for j in range(k):
        out.append(sum(math.comb(j, i) * psis[i] * out[j - i] for i in range(j + 1)))
    return out


def laplace_moment(lam: complex, k: int, m: float) -> complex:
    """∫_0^∞ x^λ log^k x e^{-mx} dx = d^k/dλ^k [Γ(λ+1) m^{-λ-1}]."""
    if not (m > 0 and math.isfinite(m)):
        raise NonPositiveScale(f"Laplace variable must be positive, got {m!r}")
    lam = as_scalar(lam, "degree")
    derivs = loggamma_derivs(lam + 1, k)
    lm = math.log(m)
    scale = cmath.exp(-(lam + 1) * lm)
    return scale * sum(math.comb(k, j) * derivs[j] * (-lm) ** (k - j) for j in range(k + 1))


def pf_laplace_moment(n: int, k: int, m: float, tol: float = 1e-12) -> complex:
    """Regularized ⟨P(x_+^{-n} log^k x_+), e^{-mx}⟩ through the pairing engine."""
    probe = ExponentialProbe(m)
    res = PairingEngine(tol).pair_term(pfplus(n, k), probe)
    logger.debug("pf_laplace_moment(%d, %d, %g) = %r ± %.2g", n, k, m, res.value, res.abs_error_estimate)
    return res.value
