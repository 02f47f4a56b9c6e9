"""
Regularized pairing ⟨f, φ⟩ of QAHD expressions with test functions.

x_+^λ log^k x_+, Re λ > -n-1 (n = subtraction_order(λ)):
    ∫_0^1 x^λ log^k x (φ(x) - Σ_{j<n} φ_j x^j) dx
  + ∫_1^∞ x^λ log^k x φ(x) dx
  + Σ_{j<n} (-1)^k k! φ_j / (λ+j+1)^{k+1}                 φ_j = φ^{(j)}(0)/j!

P(x_+^{-n} log^k x_+):
    ∫_0^∞ x^{-n} log^k x (φ(x) - Σ_{j≤n-2} φ_j x^j - φ_{n-1} x^{n-1} H(1-x)) dx
  split at 1; the (1, ∞) part of the global subtraction is integrated exactly.

x_- and P(x_-^{...}) pair against φ(-x); δ^{(m)} gives (-1)^m φ^{(m)}(0).
"""
import math
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy import integrate

from .errors import InvalidTerm, NonPositiveScale, PreconditionError, QuadratureFailure
from .probes import TestFunction
from .qahd_algebra import Family, QahdExpr, QahdTerm, as_scalar, is_near_pole
from .settings import DEFAULT_TOL, PANEL_LIMIT

logger = logging.getLogger("services.pairing")

# ---------------------------------------------------------------------
# Results
# ---------------------------------------------------------------------
@dataclass
class PairingResult:
    value: complex
    abs_error_estimate: float
    pieces: List[Dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        from .expr_text import complex_to_json
        return {
            "value": complex_to_json(self.value),
            "error_estimate": self.abs_error_estimate,
            "pieces": [
                {
                    "term": p["term"],
                    "coeff": complex_to_json(p["coeff"]),
                    "near": complex_to_json(p["near"]),
                    "tail": complex_to_json(p["tail"]),
                    "correction": complex_to_json(p["correction"]),
                }
                for p in self.pieces
            ],
        }


def subtraction_order(lam: complex) -> int:
    """Smallest n ≥ 0 with Re λ > -n-1."""
    lam = as_scalar(lam, "degree")
    if is_near_pole(lam):
        raise InvalidTerm(f"degree {lam} is a pole of the x_+ family")
    return max(0, math.floor(-lam.real))


def scaled_argument(phi: TestFunction, a: float) -> TestFunction:
    """x ↦ φ(x/a)."""
    a = float(a)
    if not math.isfinite(a) or a <= 0.0:
        raise NonPositiveScale(f"scale factor must be a positive real, got {a!r}")
    if a == 1.0:
        return phi
    return phi.scaled(a)


# ---------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------
def _breakpoints(lo: float, hi: float, width: float) -> List[float]:
    pts = {lo, hi}
    pts.update(width * c for c in (0.5, 1.0, 2.0, 4.0, 8.0))
    # decades only where φ is not yet flat
    start = max(lo, width * 1e-2)
    if start < hi:
        for e in range(math.floor(math.log10(start)), math.ceil(math.log10(hi)) + 1):
            pts.add(10.0 ** e)
    return sorted(p for p in pts if lo <= p <= hi)


class PairingEngine:
    """
    Adaptive Gauss-Kronrod pairing. One engine per tolerance; stateless
    otherwise, so an instance can be shared between workers.
    """

    def __init__(self, tol: float = DEFAULT_TOL, panel_limit: int = PANEL_LIMIT):
        if not tol > 0:
            raise PreconditionError(f"tolerance must be positive, got {tol!r}")
        self.tol = float(tol)
        self.panel_limit = int(panel_limit)

    def _quad(self, fn: Callable[[float], complex], lo: float, hi: float) -> Tuple[complex, float]:
        total, err = 0j, 0.0
        seen: Dict[float, complex] = {}

        def cached(x: float) -> complex:
            if x not in seen:
                seen[x] = fn(x)
            return seen[x]

        for part in ("real", "imag"):
            def integrand(x, _part=part):
                v = cached(x)
                return v.real if _part == "real" else v.imag
            out = integrate.quad(
                integrand, lo, hi,
                epsabs=self.tol * 1e-3, epsrel=self.tol,
                limit=self.panel_limit, full_output=1,
            )
            value, abserr = out[0], out[1]
            if 0.0 < abs(value) < 1.0 and abserr > self.tol * abs(value):
                # small panels (narrow probes) still owe a relative tolerance
                out = integrate.quad(
                    integrand, lo, hi,
                    epsabs=self.tol * abs(value) * 1e-3, epsrel=self.tol,
                    limit=self.panel_limit, full_output=1,
                )
                value, abserr = out[0], out[1]
            if not (math.isfinite(value) and math.isfinite(abserr)):
                raise QuadratureFailure(f"quadrature on ({lo:.6g}, {hi:.6g}) returned {value!r} ± {abserr!r}")
            if len(out) > 3 and abserr > self.tol * max(1.0, abs(value)):
                raise QuadratureFailure(
                    f"quadrature on ({lo:.6g}, {hi:.6g}) did not reach tol={self.tol:g}: "
                    f"error estimate {abserr:.3g} ({out[3].splitlines()[0] if out[3] else 'no message'})"
                )
            total += value if part == "real" else 1j * value
            err += abserr
        return total, err

    def _panels(self, fn: Callable[[float], complex], lo: float, hi: float, width: float) -> Tuple[complex, float]:
        if hi <= lo:
            return 0j, 0.0
        pts = _breakpoints(lo, hi, width)
        total, err = 0j, 0.0
        for a, b in zip(pts[:-1], pts[1:]):
            v, e = self._quad(fn, a, b)
            total += v
            err += e
        logger.debug("Integrated (%g, %g) over %d panels: %r ± %.3g", lo, hi, len(pts) - 1, total, err)
        return total, err

    # -----------------------------------------------------------------
    # Plus-side rules
    # -----------------------------------------------------------------
    @staticmethod
    def _kernel(lam: complex, k: int) -> Callable[[np.ndarray], np.ndarray]:
        def power_log(x):
            lx = np.log(x)
            return np.exp(lam * lx) * lx ** k
        return power_log

    def _tail(self, lam: complex, k: int, phi: TestFunction) -> Tuple[complex, float]:
        kernel = self._kernel(lam, k)
        cutoff = phi.support_radius(self.tol * 1e-3)

        def fn(x: float) -> complex:
            xs = np.array([x])
            return complex((kernel(xs) * phi.value(xs))[0])
        return self._panels(fn, 1.0, max(1.0, cutoff), phi.scale)

    def _near(self, lam: complex, k: int, phi: TestFunction, n: int) -> Tuple[complex, float]:
        kernel = self._kernel(lam, k)

        def fn(x: float) -> complex:
            xs = np.array([x])
            return complex((kernel(xs) * phi.taylor_remainder(xs, n))[0])
        return self._panels(fn, 0.0, 1.0, phi.scale)

    def power_plus(self, lam: complex, k: int, phi: TestFunction, n: Optional[int] = None) -> Tuple[complex, complex, complex, float]:
        """(near, tail, correction, error) of ⟨x_+^λ log^k x_+, φ⟩."""
        if n is None:
            n = subtraction_order(lam)
            # x^{λ+n} with Re(λ+n) near -1 is beyond QUADPACK; one more exact term carries it
            if lam.real + n < -0.5:
                n += 1
        elif n < subtraction_order(lam):
            raise PreconditionError(f"subtraction order {n} too small for degree {lam}")
        near, e_near = self._near(lam, k, phi, n)
        tail, e_tail = self._tail(lam, k, phi)
        correction = sum(
            ((-1) ** k) * math.factorial(k) * phi.taylor_coeff(j) / (lam + j + 1) ** (k + 1)
            for j in range(n)
        )
        return near, tail, complex(correction), e_near + e_tail

    def finite_part_plus(self, n: int, k: int, phi: TestFunction) -> Tuple[complex, complex, complex, float]:
        """(near, tail, correction, error) of ⟨P(x_+^{-n} log^k x_+), φ⟩."""
        lam = complex(-n)
        near, e_near = self._near(lam, k, phi, n)
        tail, e_tail = self._tail(lam, k, phi)
        # ∫_1^∞ x^{j-n} log^k x dx = k! / (n-1-j)^{k+1}
        correction = -sum(
            phi.taylor_coeff(j) * math.factorial(k) / (n - 1 - j) ** (k + 1)
            for j in range(n - 1)
        )
        return near, tail, complex(correction), e_near + e_tail

    # -----------------------------------------------------------------
    # Public API
    # -----------------------------------------------------------------
    def pair_term(self, term: QahdTerm, phi: TestFunction, subtraction: Optional[int] = None) -> PairingResult:
        fam = term.family
        if fam is Family.DELTA:
            value = ((-1) ** term.m) * phi.deriv_at_zero(term.m)
            pieces = [{"term": str(term), "coeff": 1.0, "near": 0j, "tail": 0j, "correction": value}]
            return PairingResult(complex(value), 0.0, pieces)

        side = phi if fam in (Family.XPLUS, Family.PFPLUS) else phi.reflected()
        if fam in (Family.XPLUS, Family.XMINUS):
            near, tail, corr, err = self.power_plus(term.degree, term.k, side, subtraction)
        else:
            near, tail, corr, err = self.finite_part_plus(term.n, term.k, side)
        value = near + tail + corr
        logger.debug("⟨%s, %s⟩ = %r (near %r, tail %r, correction %r)", term, phi.label, value, near, tail, corr)
        pieces = [{"term": str(term), "coeff": 1.0, "near": near, "tail": tail, "correction": corr}]
        return PairingResult(value, err, pieces)

    def pair(self, expr: QahdExpr, phi: TestFunction) -> PairingResult:
        total, err, pieces = 0j, 0.0, []
        for term, coeff in expr.items():
            res = self.pair_term(term, phi)
            total += coeff * res.value
            err += abs(coeff) * res.abs_error_estimate
            for p in res.pieces:
                pieces.append(dict(p, coeff=coeff))
        return PairingResult(total, err, pieces)


def pair_term(term: QahdTerm, phi: TestFunction, tol: float = DEFAULT_TOL, subtraction: Optional[int] = None) -> PairingResult:
    return PairingEngine(tol).pair_term(term, phi, subtraction)


def pair(expr: QahdExpr, phi: TestFunction, tol: float = DEFAULT_TOL) -> PairingResult:
    return PairingEngine(tol).pair(expr, phi)


def pair_value(expr: QahdExpr, phi: TestFunction, tol: float = DEFAULT_TOL) -> complex:
    return pair(expr, phi, tol).value
