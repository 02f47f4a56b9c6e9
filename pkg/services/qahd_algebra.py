"""
Symbolic layer for one-dimensional quasi associated homogeneous distributions.

Basis (canonical families):
  xplus(λ, k)   = x_+^λ log^k x_+        λ ∉ {-1, -2, ...}
  xminus(λ, k)  = x_-^λ log^k x_-
  pfplus(n, k)  = P(x_+^{-n} log^k x_+)  finite part, order k + 1
  pfminus(n, k) = P(x_-^{-n} log^k x_-)
  delta(m)      = δ^{(m)}                degree -m-1, order 0

An expression is a finite complex linear combination of basis terms, kept
canonical: equal degrees merged, cancelled coefficients dropped.
"""
import cmath
import math
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

from .errors import InvalidTerm, NonPositiveScale, NotDifferentiableInLambda, OrderZero, PreconditionError, Unsupported
from .settings import DROP_EPS, MERGE_EPS, POLE_EPS

logger = logging.getLogger("services.qahd_algebra")

Scalar = Union[int, float, complex]


class Family(str, Enum):
    XPLUS = "xplus"
    XMINUS = "xminus"
    PFPLUS = "pfplus"
    PFMINUS = "pfminus"
    DELTA = "delta"


POWER_FAMILIES = (Family.XPLUS, Family.XMINUS)
PF_FAMILIES = (Family.PFPLUS, Family.PFMINUS)


def as_scalar(value: Scalar, what: str = "coefficient") -> complex:
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InvalidTerm(f"{what} must be finite, got {value!r}")
    return z


def pole_distance(lam: complex) -> float:
    """Distance from λ to the nearest point of {-1, -2, -3, ...}."""
    nearest = min(-1.0, float(round(lam.real)))
    return abs(lam - nearest)


def is_near_pole(lam: complex) -> bool:
    return pole_distance(lam) <= POLE_EPS


@dataclass(frozen=True)
class QahdTerm:
    family: Family
    degree: Optional[complex] = None
    n: Optional[int] = None
    k: int = 0
    m: Optional[int] = None

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        if fam in POWER_FAMILIES:
            if self.degree is None:
                raise InvalidTerm(f"{fam.value} needs a degree")
            lam = as_scalar(self.degree, "degree")
            object.__setattr__(self, "degree", lam)
            if is_near_pole(lam):
                raise InvalidTerm(
                    f"{fam.value} degree {lam} is within {POLE_EPS:g} of a negative integer; "
                    f"use pfplus/pfminus for the finite part"
                )
        elif fam in PF_FAMILIES:
            if self.n is None or int(self.n) != self.n or self.n < 1:
                raise InvalidTerm(f"{fam.value} needs a positive integer pole order, got {self.n!r}")
            object.__setattr__(self, "n", int(self.n))
        else:
            if self.m is None or int(self.m) != self.m or self.m < 0:
                raise InvalidTerm(f"delta needs a nonnegative derivative order, got {self.m!r}")
            object.__setattr__(self, "m", int(self.m))
        if int(self.k) != self.k or self.k < 0:
            raise InvalidTerm(f"log power must be a nonnegative integer, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))
        if fam is Family.DELTA and self.k != 0:
            raise InvalidTerm("delta carries no log power")

    @property
    def effective_degree(self) -> complex:
        if self.family in POWER_FAMILIES:
            return self.degree
        if self.family in PF_FAMILIES:
            return complex(-self.n)
        return complex(-self.m - 1)

    @property
    def order(self) -> int:
        if self.family in POWER_FAMILIES:
            return self.k
        if self.family in PF_FAMILIES:
            return self.k + 1
        return 0

    def with_log_power(self, k: int) -> "QahdTerm":
        return replace(self, k=k)

    def __str__(self) -> str:
        from .expr_text import format_term
        return format_term(self)


def xplus(lam: Scalar, k: int = 0) -> QahdTerm:
    return QahdTerm(Family.XPLUS, degree=lam, k=k)


def xminus(lam: Scalar, k: int = 0) -> QahdTerm:
    return QahdTerm(Family.XMINUS, degree=lam, k=k)


def pfplus(n: int, k: int = 0) -> QahdTerm:
    return QahdTerm(Family.PFPLUS, n=n, k=k)


def pfminus(n: int, k: int = 0) -> QahdTerm:
    return QahdTerm(Family.PFMINUS, n=n, k=k)


def delta(m: int = 0) -> QahdTerm:
    return QahdTerm(Family.DELTA, m=m)


class QahdExpr:
    """Immutable canonical linear combination; build it through canonicalize()."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Dict[QahdTerm, complex]] = None):
        self._terms: Dict[QahdTerm, complex] = dict(terms or {})

    @property
    def terms(self) -> Dict[QahdTerm, complex]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[QahdTerm, complex]]:
        return iter(self._terms.items())

    def coeff(self, term: QahdTerm) -> complex:
        return self._terms.get(term, 0j)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QahdExpr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: "QahdExpr") -> "QahdExpr":
        return canonicalize(list(self.items()) + list(other.items()))

    def __sub__(self, other: "QahdExpr") -> "QahdExpr":
        return self + (-1) * other

    def __neg__(self) -> "QahdExpr":
        return (-1) * self

    def __mul__(self, scalar: Scalar) -> "QahdExpr":
        c = as_scalar(scalar)
        return canonicalize([(t, c * v) for t, v in self.items()])

    __rmul__ = __mul__

    def isclose(self, other: "QahdExpr", rel_tol: float = 1e-12, abs_tol: float = 1e-14) -> bool:
        diff = self - other
        scale = max([abs(v) for _, v in self.items()] + [abs(v) for _, v in other.items()] + [0.0])
        return all(abs(v) <= max(abs_tol, rel_tol * scale) for _, v in diff.items())

    def __repr__(self) -> str:
        from .expr_text import format_expr
        return f"QahdExpr({format_expr(self)!r})"


def _merge_key(index: Dict[tuple, List[QahdTerm]], term: QahdTerm) -> QahdTerm:
    if term.family not in POWER_FAMILIES:
        return term
    bucket = index.setdefault((term.family, term.k), [])
    for existing in bucket:
        if abs(existing.degree - term.degree) <= MERGE_EPS:
            return existing
    bucket.append(term)
    return term


def canonicalize(raw_terms: Iterable[Tuple[QahdTerm, Scalar]]) -> QahdExpr:
    """
    Merge a raw list of (term, coefficient) pairs.
    A coefficient is dropped when it cancels to within DROP_EPS of the
    largest contribution summed into it.
    """
    sums: Dict[QahdTerm, complex] = {}
    peaks: Dict[QahdTerm, float] = {}
    index: Dict[tuple, List[QahdTerm]] = {}
    for term, coeff in raw_terms:
        if not isinstance(term, QahdTerm):
            raise InvalidTerm(f"not a basis term: {term!r}")
        c = as_scalar(coeff)
        key = _merge_key(index, term)
        sums[key] = sums.get(key, 0j) + c
        peaks[key] = max(peaks.get(key, 0.0), abs(c))
    kept = {t: c for t, c in sums.items() if abs(c) > DROP_EPS * peaks[t]}
    return QahdExpr(kept)


def expr_of(*pairs: Tuple[QahdTerm, Scalar]) -> QahdExpr:
    return canonicalize(pairs)


def single(term: QahdTerm, coeff: Scalar = 1.0) -> QahdExpr:
    return canonicalize([(term, coeff)])


@dataclass(frozen=True)
class DegreeOrder:
    degree: complex
    order: int


def _same_degree(a: complex, b: complex) -> bool:
    return abs(a - b) <= MERGE_EPS


def components(expr: QahdExpr) -> List[Tuple[complex, QahdExpr]]:
    """Split an expression into degree-homogeneous pieces, sorted by (Re, Im) degree."""
    groups: List[Tuple[complex, List[Tuple[QahdTerm, complex]]]] = []
    for term, coeff in expr.items():
        lam = term.effective_degree
        for deg, bucket in groups:
            if _same_degree(deg, lam):
                bucket.append((term, coeff))
                break
        else:
            groups.append((lam, [(term, coeff)]))
    groups.sort(key=lambda g: (g[0].real, g[0].imag))
    return [(deg, QahdExpr(dict(bucket))) for deg, bucket in groups]


def degree_order(expr: QahdExpr) -> List[DegreeOrder]:
    return [
        DegreeOrder(deg, max(t.order for t, _ in part.items()))
        for deg, part in components(expr)
    ]


def single_component(expr: QahdExpr) -> Tuple[complex, int]:
    classes = degree_order(expr)
    if len(classes) != 1:
        raise PreconditionError(f"expected a single degree-homogeneous component, got {len(classes)}")
    return classes[0].degree, classes[0].order


def _log_expansion(term: QahdTerm) -> List[Tuple[int, QahdTerm, float]]:
    """
    Coefficients of a^{-deg} · term(ax) as a polynomial in log a:
    a list of (power r, basis term, numeric factor).
    """
    fam, k = term.family, term.k
    if fam in POWER_FAMILIES:
        return [(r, term.with_log_power(k - r), float(math.comb(k, r))) for r in range(k + 1)]
    if fam in PF_FAMILIES:
        n = term.n
        out = [(r, term.with_log_power(k - r), float(math.comb(k, r))) for r in range(k + 1)]
        # Heaviside window of the finite part leaves a δ^{(n-1)} behind;
        # on the minus side the reflection cancels the (-1)^{n-1}.
        sign = (-1) ** (n - 1) if fam is Family.PFPLUS else 1
        out.append((k + 1, delta(n - 1), sign / ((k + 1) * math.factorial(n - 1))))
        return out
    return [(0, term, 1.0)]


def _check_scale(a: float) -> float:
    a = float(a)
    if not math.isfinite(a) or a <= 0.0:
        raise NonPositiveScale(f"dilation factor must be a positive real, got {a!r}")
    return a


def power_of_scale(a: float, lam: complex) -> complex:
    """a^λ for a > 0 on the real-log branch."""
    return cmath.exp(lam * math.log(a))


def dilate(expr: QahdExpr, a: float) -> QahdExpr:
    """Exact expression of f(ax)."""
    a = _check_scale(a)
    la = math.log(a)
    raw: List[Tuple[QahdTerm, complex]] = []
    for term, coeff in expr.items():
        scale = coeff * power_of_scale(a, term.effective_degree)
        for r, basis, factor in _log_expansion(term):
            raw.append((basis, scale * factor * la ** r))
    return canonicalize(raw)


@dataclass(frozen=True)
class ScalingExpansion:
    degree: complex
    order: int
    companions: Tuple[QahdExpr, ...]
    component: QahdExpr = field(default_factory=QahdExpr)

    def companion(self, r: int) -> QahdExpr:
        """Coefficient of a^λ log^r a, r = 1..order."""
        return self.companions[r - 1]

    def predicted_dilation(self, a: float) -> QahdExpr:
        a = _check_scale(a)
        la = math.log(a)
        acc = list(self.component.items())
        for r, comp in enumerate(self.companions, start=1):
            acc.extend((t, c * la ** r) for t, c in comp.items())
        return power_of_scale(a, self.degree) * canonicalize(acc)


def scaling_expansion(expr: QahdExpr) -> List[ScalingExpansion]:
    out = []
    for deg, part in components(expr):
        order = max(t.order for t, _ in part.items())
        buckets: List[List[Tuple[QahdTerm, complex]]] = [[] for _ in range(order)]
        for term, coeff in part.items():
            for r, basis, factor in _log_expansion(term):
                if r > 0:
                    buckets[r - 1].append((basis, coeff * factor))
        out.append(ScalingExpansion(deg, order, tuple(canonicalize(b) for b in buckets), part))
    return out


def d_dlambda(term: QahdTerm) -> QahdTerm:
    if term.family not in POWER_FAMILIES:
        raise NotDifferentiableInLambda(
            f"{term.family.value} is not a value of x_±^λ log^k x_± in λ; no λ-derivative"
        )
    return term.with_log_power(term.k + 1)


def d_dlambda_expr(expr: QahdExpr) -> QahdExpr:
    return canonicalize([(d_dlambda(t), c) for t, c in expr.items()])


def _sign_of(sign: Union[str, int]) -> int:
    if sign in ("plus", "+", 1):
        return 1
    if sign in ("minus", "-", -1):
        return -1
    raise InvalidTerm(f"boundary-value sign must be plus or minus, got {sign!r}")


def _exact_negative_integer(lam: complex) -> Optional[int]:
    if lam.imag == 0.0 and lam.real < 0 and lam.real == math.floor(lam.real):
        return int(-lam.real)
    return None


def principal_value(n: int) -> QahdExpr:
    """P(x^{-n}) = pfplus(n, 0) + (-1)^n pfminus(n, 0)."""
    return canonicalize([(pfplus(n, 0), 1.0), (pfminus(n, 0), (-1.0) ** n)])


def expand_i0(sign: Union[str, int], lam: Scalar, k: int = 0) -> QahdExpr:
    """(x ± i0)^λ log^k(x ± i0) in the canonical basis."""
    s = _sign_of(sign)
    lam = as_scalar(lam, "degree")
    n = _exact_negative_integer(lam)
    if n is not None:
        if k != 0:
            raise Unsupported(f"(x±i0)^{{-{n}}} log^{k}(x±i0) has no canonical expansion for k >= 1")
        jump = -s * 1j * math.pi * (-1) ** (n - 1) / math.factorial(n - 1)
        return principal_value(n) + single(delta(n - 1), jump)
    raw: List[Tuple[QahdTerm, complex]] = [(xplus(lam, k), 1.0)]
    phase = cmath.exp(s * 1j * math.pi * lam)
    for j in range(k + 1):
        raw.append((xminus(lam, k - j), math.comb(k, j) * (s * 1j * math.pi) ** j * phase))
    return canonicalize(raw)


class QuasiAsymptotics(NamedTuple):
    automodel_degree: complex
    automodel_log_power: int
    limit: QahdExpr


def quasi_asymptotics(expr: QahdExpr, at: str = "infinity", strict: bool = False) -> QuasiAsymptotics:
    """
    Leading homogeneous term of f(ax) (at infinity) or f(x/a) (at zero) as
    a → ∞, against the automodel a^{±λ} log^k a.
    """
    if at not in ("infinity", "zero"):
        raise PreconditionError(f"quasi-asymptotics point must be 'infinity' or 'zero', got {at!r}")
    lam, order = single_component(expr)
    auto_degree = lam if at == "infinity" else -lam
    if order == 0:
        if strict:
            raise OrderZero("homogeneous component: its quasi-asymptotics is itself")
        return QuasiAsymptotics(auto_degree, 0, expr)
    expansion = scaling_expansion(expr)[0]
    limit = expansion.companion(order)
    if at == "zero":
        limit = (-1) ** order * limit
    return QuasiAsymptotics(auto_degree, order, limit)
