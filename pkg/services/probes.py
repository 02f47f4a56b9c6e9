"""
Smooth, rapidly decaying test functions with exact Taylor data at 0.

HermiteGaussian:   φ(x) = p(x/s) · exp(-(x/s)^2), p given in the
                   probabilists' Hermite basis He_j (or in powers).
ExponentialProbe:  φ(x) = exp(-m x), admitted on the positive half-line
                   only (Laplace moments of the x_+ families).
"""
import math
import logging
from abc import ABC, abstractmethod
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from numpy.polynomial import hermite_e as herme
from numpy.polynomial import polynomial as poly

from .errors import NonPositiveScale, ParseError, Unsupported

logger = logging.getLogger("services.probes")

ArrayLike = Union[float, np.ndarray]

# Taylor series length used for remainders near the origin
_SERIES_TERMS = 64
# |x| / scale below which remainders are summed from the series
_SERIES_RADIUS = 0.5


def _short(c: float) -> str:
    text = repr(float(c))
    return text[:-2] if text.endswith(".0") else text


class TestFunction(ABC):
    """Base class; pytest must not collect it."""

    __test__ = False

    decay_bound = "super-polynomial"

    @property
    @abstractmethod
    def scale(self) -> float:
        """Characteristic width; quadrature panels are placed around it."""

    @abstractmethod
    def value(self, x: ArrayLike) -> np.ndarray:
        ...

    @abstractmethod
    def taylor_coeff(self, j: int) -> complex:
        """φ^{(j)}(0) / j!"""

    @abstractmethod
    def support_radius(self, eps: float) -> float:
        """R with |φ(x)| (1 + |x|)^6 < eps for |x| > R."""

    @abstractmethod
    def scaled(self, a: float) -> "TestFunction":
        """x ↦ φ(x / a)"""

    def reflected(self) -> "TestFunction":
        raise Unsupported(f"{self.label} cannot be reflected")

    def x_dphi(self) -> "TestFunction":
        raise Unsupported(f"{self.label} is not closed under x·d/dx")

    def fourier_transform(self) -> "TestFunction":
        raise Unsupported(f"{self.label} has no closed-form Fourier transform")

    @property
    def label(self) -> str:
        return type(self).__name__

    def deriv_at_zero(self, j: int) -> complex:
        return math.factorial(j) * self.taylor_coeff(j)

    def unit_taylor_coeff(self, j: int) -> complex:
        """Taylor coefficient of u ↦ φ(scale · u); stays finite at any width."""
        return self.taylor_coeff(j) * self.scale ** j

    def taylor_polynomial(self, x: ArrayLike, n: int) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        acc = np.zeros_like(x, dtype=complex)
        for j in reversed(range(n)):
            acc = acc * x + self.taylor_coeff(j)
        return acc

    def taylor_remainder(self, x: ArrayLike, n: int) -> np.ndarray:
        """φ(x) − Σ_{j<n} φ^{(j)}(0) x^j / j!, free of cancellation near 0."""
        x = np.asarray(x, dtype=float)
        if n == 0:
            return np.asarray(self.value(x), dtype=complex)
        # summed in u = x / scale so no coefficient carries scale^j
        u = x / self.scale
        near = np.abs(u) <= _SERIES_RADIUS
        out = np.empty_like(x, dtype=complex)
        if np.any(~near):
            uf = u[~near]
            head = np.zeros_like(uf, dtype=complex)
            for j in reversed(range(n)):
                head = head * uf + self.unit_taylor_coeff(j)
            out[~near] = self.value(x[~near]) - head
        if np.any(near):
            un = u[near]
            acc = np.zeros_like(un, dtype=complex)
            for j in reversed(range(n, n + _SERIES_TERMS)):
                acc = acc * un + self.unit_taylor_coeff(j)
            out[near] = acc * un ** n
        return out


class HermiteGaussian(TestFunction):
    def __init__(self, power_coeffs: Sequence[complex], scale: float = 1.0, label: Optional[str] = None):
        if not (scale > 0 and math.isfinite(scale)):
            raise NonPositiveScale(f"probe scale must be positive, got {scale!r}")
        coeffs = np.trim_zeros(np.asarray(power_coeffs, dtype=complex), "b")
        self._p = coeffs if coeffs.size else np.zeros(1, dtype=complex)
        self._scale = float(scale)
        self._label = label
        # Taylor coefficients of p(y) e^{-y^2} in y
        gauss = np.zeros(2 * _SERIES_TERMS + self._p.size, dtype=float)
        for i in range(gauss.size // 2):
            gauss[2 * i] = (-1) ** i / math.factorial(i)
        self._taylor_y = poly.polymul(self._p, gauss)[: gauss.size]

    @classmethod
    def from_hermite(cls, hermite_coeffs: Sequence[float], scale: float = 1.0) -> "HermiteGaussian":
        label = "hermite:" + ",".join(_short(c) for c in hermite_coeffs)
        if scale != 1.0:
            label += f"@{scale!r}"
        return cls(herme.herme2poly(np.asarray(hermite_coeffs, dtype=float)), scale, label)

    @property
    def power_coeffs(self) -> np.ndarray:
        return self._p.copy()

    @property
    def scale(self) -> float:
        return self._scale

    @property
    def label(self) -> str:
        return self._label or f"hermite-power:{self._p.tolist()}@{self._scale!r}"

    def value(self, x: ArrayLike) -> np.ndarray:
        y = np.asarray(x, dtype=float) / self._scale
        return poly.polyval(y, self._p) * np.exp(-y * y)

    def taylor_coeff(self, j: int) -> complex:
        if j >= self._taylor_y.size:
            return 0j
        return complex(self._taylor_y[j]) / self._scale ** j

    def unit_taylor_coeff(self, j: int) -> complex:
        if j >= self._taylor_y.size:
            return 0j
        return complex(self._taylor_y[j])

    def support_radius(self, eps: float) -> float:
        degree = self._p.size - 1
        return self._scale * (math.sqrt(math.log(1.0 / eps)) + 0.5 * degree + 3.0)

    def scaled(self, a: float) -> "HermiteGaussian":
        return HermiteGaussian(self._p, self._scale * a, None if self._label is None else f"{self._label}|x/{a!r}")

    def reflected(self) -> "HermiteGaussian":
        signs = np.array([(-1) ** j for j in range(self._p.size)])
        return HermiteGaussian(self._p * signs, self._scale, None if self._label is None else f"{self._label}|-x")

    def x_dphi(self) -> "HermiteGaussian":
        # x φ'(x) = (y p'(y) - 2 y^2 p(y)) e^{-y^2}, y = x / s
        q = poly.polysub(poly.polymulx(poly.polyder(self._p)), 2 * poly.polymulx(poly.polymulx(self._p)))
        return HermiteGaussian(q, self._scale, None if self._label is None else f"x*d/dx {self._label}")

    def fourier_transform(self) -> "HermiteGaussian":
        """
        F[φ](ξ) = ∫ φ(x) e^{iξx} dx, again of the form q(ξ/s') e^{-(ξ/s')^2}
        with s' = 2/s.
        """
        s = self._scale
        q = np.zeros(self._p.size, dtype=complex)
        root2 = math.sqrt(2.0)
        for j, pj in enumerate(self._p):
            if pj == 0:
                continue
            he_j = herme.herme2poly([0] * j + [1])
            he_j = he_j * root2 ** np.arange(he_j.size)
            q[: he_j.size] += pj * (1j ** j) * 2.0 ** (-j / 2.0) * he_j
        q *= s * math.sqrt(math.pi)
        return HermiteGaussian(q, 2.0 / s, None if self._label is None else f"F[{self._label}]")

    def __repr__(self) -> str:
        return f"HermiteGaussian({self.label})"


class ExponentialProbe(TestFunction):
    def __init__(self, m: float):
        if not (m > 0 and math.isfinite(m)):
            raise NonPositiveScale(f"exponential rate must be positive, got {m!r}")
        self.m = float(m)

    decay_bound = "exponential on (0, inf)"

    @property
    def scale(self) -> float:
        return 1.0 / self.m

    @property
    def label(self) -> str:
        return f"exp:{self.m!r}"

    def value(self, x: ArrayLike) -> np.ndarray:
        return np.exp(-self.m * np.asarray(x, dtype=float)).astype(complex)

    def taylor_coeff(self, j: int) -> complex:
        return complex((-self.m) ** j / math.factorial(j))

    def unit_taylor_coeff(self, j: int) -> complex:
        return complex((-1) ** j / math.factorial(j))

    def support_radius(self, eps: float) -> float:
        return (math.log(1.0 / eps) + 40.0) / self.m

    def scaled(self, a: float) -> "ExponentialProbe":
        return ExponentialProbe(self.m / a)

    def __repr__(self) -> str:
        return f"ExponentialProbe({self.m!r})"


def parse_probe(text: str) -> TestFunction:
    """
    'hermite:1,0,1'      -> (1 + He_2(x)) e^{-x^2}
    'hermite:0,1@2.5'    -> He_1(x/2.5) e^{-(x/2.5)^2}
    'exp:2'              -> e^{-2x}, positive half-line only
    """
    kind, _, body = text.strip().partition(":")
    try:
        if kind == "hermite":
            coeffs_txt, _, scale_txt = body.partition("@")
            coeffs = [float(c) for c in coeffs_txt.split(",") if c.strip()]
            if not coeffs or len(coeffs) > 13:
                raise ValueError("between 1 and 13 Hermite coefficients required")
            return HermiteGaussian.from_hermite(coeffs, float(scale_txt) if scale_txt else 1.0)
        if kind == "exp":
            return ExponentialProbe(float(body))
    except ValueError as e:
        raise ParseError(f"bad test function {text!r}: {e}", 0, "hermite:<c0,c1,...>[@scale] or exp:<m>") from e
    raise ParseError(f"unknown test function {text!r}", 0, "hermite:<c0,c1,...>[@scale] or exp:<m>")


def parse_probes(texts: Iterable[str]) -> list:
    return [parse_probe(t) for t in texts]
