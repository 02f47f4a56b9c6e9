"""
Fourier transforms of QAHDs and the associated homogeneous Γ-functions.

Convention: F[φ](ξ) = ∫ φ(x) e^{iξx} dx, so F[f](i m) = ⟨f, e^{-mx}⟩ for f
supported on [0, ∞).

Frequency basis:
  xiplusi0        (ξ+i0)^μ log^j(ξ+i0)
  ximinusi0       (ξ-i0)^μ log^j(ξ-i0)
  xipolylog       ξ^p log^j(ξ+i0)         p = 0, 1, 2, ...
  xipolylogminus  ξ^p log^j(ξ-i0)

Table:
  x_+^λ log^k x_+           Σ_j A_j (ξ+i0)^{-λ-1} log^j(ξ+i0),  j = 0..k
  P(x_+^{-n} log^k x_+)     Σ_j B_j ξ^{n-1} log^j(ξ+i0),       j = 0..k+1
  δ^{(m)}                   (-i)^m ξ^m
  x_- families              F[f(-x)](ξ) = F[f](-ξ), rewritten on the (ξ-i0) branch
"""
import cmath
import math
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    BranchUnsupported,
    IllConditioned,
    InvalidTerm,
    PreconditionError,
    Unsupported,
    ZeroFrequency,
)
from .expr_text import complex_from_json, complex_to_json, format_complex, format_expr
from .gamma_kernel import EULER_GAMMA, laplace_moment, loggamma_derivs, pf_laplace_moment
from .pairing import pair
from .probes import TestFunction
from .qahd_algebra import (
    DegreeOrder,
    Family,
    QahdExpr,
    QahdTerm,
    as_scalar,
    canonicalize,
    expand_i0,
    is_near_pole,
)
from .settings import COND_MAX, DEFAULT_TOL, DROP_EPS, MERGE_EPS

logger = logging.getLogger("services.fourier_table")

HALF_PI_I = 0.5j * math.pi  # log i on the principal branch
# tolerance of the Laplace moments feeding the P-family solve
SOLVE_TOL = 1e-12
MAX_SYSTEM = 8


class FreqFamily(str, Enum):
    XIPLUSI0 = "xiplusi0"
    XIMINUSI0 = "ximinusi0"
    XIPOLYLOG = "xipolylog"
    XIPOLYLOGMINUS = "xipolylogminus"


POLY_FAMILIES = (FreqFamily.XIPOLYLOG, FreqFamily.XIPOLYLOGMINUS)
MINUS_BRANCH = (FreqFamily.XIMINUSI0, FreqFamily.XIPOLYLOGMINUS)


@dataclass(frozen=True)
class FreqTerm:
    family: FreqFamily
    exponent: Union[complex, int]
    log_power: int = 0

    def __post_init__(self):
        fam = FreqFamily(self.family)
        object.__setattr__(self, "family", fam)
        if self.log_power < 0 or int(self.log_power) != self.log_power:
            raise InvalidTerm(f"log power must be a nonnegative integer, got {self.log_power!r}")
        object.__setattr__(self, "log_power", int(self.log_power))
        if fam in POLY_FAMILIES:
            if isinstance(self.exponent, complex) or int(self.exponent) != self.exponent or self.exponent < 0:
                raise InvalidTerm(f"{fam.value} needs a nonnegative integer exponent, got {self.exponent!r}")
            object.__setattr__(self, "exponent", int(self.exponent))
            # ξ^p needs no branch
            if fam is FreqFamily.XIPOLYLOGMINUS and self.log_power == 0:
                object.__setattr__(self, "family", FreqFamily.XIPOLYLOG)
        else:
            object.__setattr__(self, "exponent", as_scalar(self.exponent, "exponent"))

    @property
    def degree(self) -> complex:
        return complex(self.exponent)

    def __str__(self) -> str:
        branch = "xi-i0" if self.family in MINUS_BRANCH else "xi+i0"
        if self.family in POLY_FAMILIES:
            base = f"xi^{self.exponent}"
        else:
            base = f"({branch})^({format_complex(self.exponent)})"
        if self.log_power == 0:
            return base
        return f"{base}*log^{self.log_power}({branch})"


class FreqExpr:
    """Canonical combination of frequency terms; build it through canonicalize_freq()."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Dict[FreqTerm, complex]] = None):
        self._terms: Dict[FreqTerm, complex] = dict(terms or {})

    @property
    def terms(self) -> Dict[FreqTerm, complex]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[FreqTerm, complex]]:
        return iter(self._terms.items())

    def coeff(self, term: FreqTerm) -> complex:
        return self._terms.get(term, 0j)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FreqExpr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: "FreqExpr") -> "FreqExpr":
        return canonicalize_freq(list(self.items()) + list(other.items()))

    def __mul__(self, scalar) -> "FreqExpr":
        c = as_scalar(scalar)
        return canonicalize_freq([(t, c * v) for t, v in self.items()])

    __rmul__ = __mul__

    def degree_order(self) -> List[DegreeOrder]:
        groups: List[Tuple[complex, int]] = []
        for term, _ in self.items():
            deg = term.degree
            for i, (d, o) in enumerate(groups):
                if abs(d - deg) <= MERGE_EPS:
                    groups[i] = (d, max(o, term.log_power))
                    break
            else:
                groups.append((deg, term.log_power))
        groups.sort(key=lambda g: (g[0].real, g[0].imag))
        return [DegreeOrder(d, o) for d, o in groups]

    def as_qahd(self) -> QahdExpr:
        """The same distribution read in the x-basis, with ξ as the variable."""
        raw: List[Tuple[QahdTerm, complex]] = []
        for term, coeff in self.items():
            sign = "minus" if term.family in MINUS_BRANCH else "plus"
            part = expand_i0(sign, term.exponent, term.log_power)
            raw.extend((t, coeff * c) for t, c in part.items())
        return canonicalize(raw)

    def __repr__(self) -> str:
        return f"FreqExpr({format_freq(self)!r})"


def _freq_sort_key(term: FreqTerm) -> Tuple:
    deg = term.degree
    return (list(FreqFamily).index(term.family), deg.real, deg.imag, term.log_power)


def canonicalize_freq(raw_terms: Iterable[Tuple[FreqTerm, complex]]) -> FreqExpr:
    sums: Dict[FreqTerm, complex] = {}
    peaks: Dict[FreqTerm, float] = {}
    for term, coeff in raw_terms:
        c = as_scalar(coeff)
        key = term
        if term.family not in POLY_FAMILIES:
            for existing in sums:
                if (
                    existing.family is term.family
                    and existing.log_power == term.log_power
                    and abs(existing.degree - term.degree) <= MERGE_EPS
                ):
                    key = existing
                    break
        sums[key] = sums.get(key, 0j) + c
        peaks[key] = max(peaks.get(key, 0.0), abs(c))
    return FreqExpr({t: c for t, c in sums.items() if abs(c) > DROP_EPS * peaks[t]})


def format_freq(expr: FreqExpr) -> str:
    if expr.is_zero():
        return "0"
    return " + ".join(
        f"{format_complex(c)}*{t}" for t, c in sorted(expr.items(), key=lambda tc: _freq_sort_key(tc[0]))
    )


# ---------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------
def _log_plus(xi: complex) -> complex:
    # +0.0 imaginary part keeps the negative axis on the upper edge
    if xi.imag == 0.0:
        xi = complex(xi.real, 0.0)
    return cmath.log(xi)


def _log_minus(xi: complex) -> complex:
    return complex(math.log(abs(xi.real)), -math.pi if xi.real < 0 else 0.0)


def eval_freq_term(term: FreqTerm, xi: complex) -> complex:
    xi = as_scalar(xi, "frequency")
    if xi == 0:
        raise ZeroFrequency("frequency terms are evaluated away from ξ = 0")
    if term.family in MINUS_BRANCH:
        if xi.imag != 0.0:
            raise BranchUnsupported(f"{term.family.value} is only evaluated on the real axis, got ξ = {xi}")
        log = _log_minus(xi)
    else:
        if xi.imag < 0.0:
            raise BranchUnsupported(f"(ξ+i0) branch needs Im ξ ≥ 0, got ξ = {xi}")
        log = _log_plus(xi)
    if term.family in POLY_FAMILIES:
        base = xi ** term.exponent
    else:
        base = cmath.exp(term.exponent * log)
    return base * log ** term.log_power


def eval_freq(expr: FreqExpr, xi: complex) -> complex:
    return sum((c * eval_freq_term(t, xi) for t, c in expr.items()), 0j)


# ---------------------------------------------------------------------
# Coefficients
# ---------------------------------------------------------------------
@dataclass
class FtCoefficients:
    """Coefficients of log^j, j = 0..len-1, with solve diagnostics."""

    coeffs: np.ndarray
    residual: float = 0.0
    condition: float = 1.0
    method: str = "closed-form"

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, j: int) -> complex:
        return complex(self.coeffs[j])


def _check_power_degree(lam: complex) -> complex:
    lam = as_scalar(lam, "degree")
    if is_near_pole(lam):
        raise InvalidTerm(f"degree {lam} is a pole of x_+^λ; use the P family")
    return lam


def ft_closed_form_coeffs(lam: complex, k: int) -> FtCoefficients:
    """
    A_j for F[x_+^λ log^k x_+] by differentiating g(λ) = e^{iπ(λ+1)/2} Γ(λ+1) in λ:
        A_j = C(k, j) (-1)^j g^{(k-j)}(λ)
    """
    lam = _check_power_degree(lam)
    derivs = loggamma_derivs(lam + 1, k)
    phase = cmath.exp(HALF_PI_I * (lam + 1))

    def g(p: int) -> complex:
        return phase * sum(math.comb(p, q) * HALF_PI_I ** (p - q) * derivs[q] for q in range(p + 1))

    coeffs = np.array([math.comb(k, j) * (-1) ** j * g(k - j) for j in range(k + 1)], dtype=complex)
    return FtCoefficients(coeffs)


def solve_ft_coeffs(family: Union[str, Family], param: Union[complex, int], k: int) -> FtCoefficients:
    """
    Substitute ξ = i, 2i, ... into F[f] = Σ_j c_j b(ξ) log^j(ξ+i0), take the
    left side from the Laplace moments ⟨f, e^{-mx}⟩, and solve the square system.
    """
    fam = Family(family)
    if fam is Family.XPLUS:
        lam = _check_power_degree(param)
        size = k + 1
        mu = -lam - 1
        rhs = [laplace_moment(lam, k, m) for m in range(1, size + 1)]
        base = [cmath.exp(mu * _log_plus(1j * m)) for m in range(1, size + 1)]
    elif fam is Family.PFPLUS:
        n = int(param)
        if n != param or n < 1:
            raise InvalidTerm(f"pole order must be a positive integer, got {param!r}")
        size = k + 2
        rhs = [pf_laplace_moment(n, k, m, SOLVE_TOL) for m in range(1, size + 1)]
        base = [(1j * m) ** (n - 1) for m in range(1, size + 1)]
    else:
        raise Unsupported(f"coefficient solve is defined for xplus and pfplus, not {fam.value}")
    if size > MAX_SYSTEM:
        raise PreconditionError(f"system of size {size} exceeds {MAX_SYSTEM}")

    matrix = np.array(
        [[base[r] * _log_plus(1j * (r + 1)) ** j for j in range(size)] for r in range(size)],
        dtype=complex,
    )
    cond = float(np.linalg.cond(matrix))
    if not math.isfinite(cond) or cond > COND_MAX:
        raise IllConditioned(f"substitution system has condition number {cond:.3g} > {COND_MAX:g}")
    b = np.array(rhs, dtype=complex)
    coeffs = np.linalg.solve(matrix, b)
    residual = float(np.linalg.norm(matrix @ coeffs - b) / max(1.0, np.linalg.norm(b)))
    logger.debug("solve_ft_coeffs(%s, %s, %d): cond=%.3g residual=%.3g", fam.value, param, k, cond, residual)
    return FtCoefficients(coeffs, residual, cond, "substitution")


# ---------------------------------------------------------------------
# Transform
# ---------------------------------------------------------------------
def _reflect(expr: FreqExpr) -> FreqExpr:
    """F(ξ) ↦ F(-ξ) for a combination of (ξ+i0) terms."""
    raw: List[Tuple[FreqTerm, complex]] = []
    for term, coeff in expr.items():
        j = term.log_power
        if term.family is FreqFamily.XIPLUSI0:
            # (-ξ+i0)^μ = e^{iπμ} (ξ-i0)^μ
            factor, target = cmath.exp(1j * math.pi * term.exponent), FreqFamily.XIMINUSI0
        elif term.family is FreqFamily.XIPOLYLOG:
            factor, target = (-1.0) ** term.exponent, FreqFamily.XIPOLYLOGMINUS
        else:
            raise Unsupported(f"{term.family.value} is already on the (ξ-i0) branch")
        # log(-ξ+i0) = log(ξ-i0) + iπ
        for r in range(j + 1):
            raw.append((FreqTerm(target, term.exponent, r), coeff * factor * math.comb(j, r) * (1j * math.pi) ** (j - r)))
    return canonicalize_freq(raw)


def _transform_plus(term: QahdTerm, method: str) -> FreqExpr:
    if term.family in (Family.XPLUS, Family.XMINUS):
        lam = term.degree
        if term.k == 0 or method == "closed-form":
            coeffs = ft_closed_form_coeffs(lam, term.k)
        else:
            coeffs = solve_ft_coeffs(Family.XPLUS, lam, term.k)
        return canonicalize_freq(
            (FreqTerm(FreqFamily.XIPLUSI0, -lam - 1, j), coeffs[j]) for j in range(term.k + 1)
        )
    n = term.n
    coeffs = solve_ft_coeffs(Family.PFPLUS, n, term.k)
    return canonicalize_freq((FreqTerm(FreqFamily.XIPOLYLOG, n - 1, j), coeffs[j]) for j in range(term.k + 2))


def fourier_term(term: QahdTerm, method: str = "substitution") -> FreqExpr:
    if method not in ("substitution", "closed-form"):
        raise PreconditionError(f"unknown coefficient method {method!r}")
    if term.family is Family.DELTA:
        return canonicalize_freq([(FreqTerm(FreqFamily.XIPOLYLOG, term.m, 0), (-1j) ** term.m)])
    plus = _transform_plus(term, method)
    if term.family in (Family.XPLUS, Family.PFPLUS):
        return plus
    return _reflect(plus)


def fourier(expr: QahdExpr, method: str = "substitution") -> FreqExpr:
    raw: List[Tuple[FreqTerm, complex]] = []
    for term, coeff in expr.items():
        raw.extend((t, coeff * c) for t, c in fourier_term(term, method).items())
    out = canonicalize_freq(raw)
    logger.info("Fourier transform of %d terms -> %d frequency terms", len(expr), len(out))
    return out


# ---------------------------------------------------------------------
# Associated homogeneous Γ-functions
# ---------------------------------------------------------------------
class GammaValue(NamedTuple):
    j: int
    order: int
    argument: complex
    value: complex


def _nonpositive_integer(z: complex) -> Optional[int]:
    if z.imag == 0.0 and z.real <= 0 and z.real == math.floor(z.real):
        return int(-z.real)
    return None


def gamma_assoc(j: int, argument: complex, k: int, method: str = "closed-form") -> GammaValue:
    """
    Γ_j(λ+1; k) = i^{-λ-1} (log i)^j A_j     argument λ+1 off the nonpositive integers
    Γ_j(-n+1; k) = i^{n-1} (log i)^j B_j     argument -n+1, B from P(x_+^{-n} log^{k-1} x_+)
    """
    if not 0 <= j <= k:
        raise PreconditionError(f"index j={j} outside 0..{k}")
    z = as_scalar(argument, "argument")
    neg = _nonpositive_integer(z)
    if neg is not None:
        n = neg + 1
        if k < 1:
            raise PreconditionError("the P family starts at order 1")
        if k == 1 and method == "closed-form":
            value = pf_gamma_closed_form(n)[j]
        else:
            coeffs = solve_ft_coeffs(Family.PFPLUS, n, k - 1)
            value = (1j ** (n - 1)) * HALF_PI_I ** j * coeffs[j]
    else:
        lam = z - 1
        if method == "closed-form" or k == 0:
            coeffs = ft_closed_form_coeffs(lam, k)
        else:
            coeffs = solve_ft_coeffs(Family.XPLUS, lam, k)
        value = cmath.exp(-HALF_PI_I * (lam + 1)) * HALF_PI_I ** j * coeffs[j]
    return GammaValue(j, k, z, complex(value))


def gamma_table(k: int, arguments: Sequence[complex], method: str = "closed-form") -> List[GammaValue]:
    rows = []
    for z in arguments:
        for j in range(k + 1):
            rows.append(gamma_assoc(j, z, k, method))
    return rows


def pf_gamma_closed_form(n: int) -> Tuple[complex, complex]:
    """(Γ_0(-n+1; 1), Γ_1(-n+1; 1)) in closed form."""
    harmonic = sum(1.0 / i for i in range(1, n))
    sign = (-1.0) ** (n - 1) / math.factorial(n - 1)
    gamma0 = sign * (harmonic - EULER_GAMMA + HALF_PI_I)
    gamma1 = -HALF_PI_I * sign
    return complex(gamma0), complex(gamma1)


# ---------------------------------------------------------------------
# Parseval cross-check
# ---------------------------------------------------------------------
class ParsevalResult(NamedTuple):
    x_side: complex
    xi_side: complex
    relative_error: float


def parseval_check(expr: QahdExpr, phi: TestFunction, tol: float = DEFAULT_TOL, method: str = "substitution") -> ParsevalResult:
    """⟨f, F[φ]⟩ against ⟨F[f], φ⟩, the latter paired with the x-side rules in ξ."""
    try:
        xi_expr = fourier(expr, method).as_qahd()
    except Unsupported as e:
        # x_+^n log^k x_+ (n ≥ 0 integer, k ≥ 1) transforms onto pole degrees with logs
        raise PreconditionError(
            f"Parseval needs the transform of {format_expr(expr)} in the x-basis, but it has none: {e}"
        ) from e
    x_side = pair(expr, phi.fourier_transform(), tol).value
    xi_side = pair(xi_expr, phi, tol).value
    # both sides vanish for parity-odd pairings; compare absolutely there
    scale = max(abs(x_side), abs(xi_side))
    rel = abs(x_side - xi_side) / scale if scale > 1e-12 else abs(x_side - xi_side)
    return ParsevalResult(x_side, xi_side, rel)


# ---------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------
def freq_to_json(expr: FreqExpr) -> List[Dict[str, Any]]:
    rows = []
    for term, coeff in sorted(expr.items(), key=lambda tc: _freq_sort_key(tc[0])):
        exponent = term.exponent if term.family in POLY_FAMILIES else complex_to_json(term.exponent)
        rows.append({
            "family": term.family.value,
            "exponent": exponent,
            "log_power": term.log_power,
            "coeff": complex_to_json(coeff),
        })
    return rows


def freq_from_json(rows: List[Dict[str, Any]]) -> FreqExpr:
    raw = []
    for row in rows:
        fam = FreqFamily(row["family"])
        exponent = row["exponent"] if fam in POLY_FAMILIES else complex_from_json(row["exponent"])
        raw.append((FreqTerm(fam, exponent, row.get("log_power", 0)), complex_from_json(row.get("coeff", 1.0))))
    return canonicalize_freq(raw)
