"""
Numerical verification of the symbolic laws against the pairing oracle.

  scaling        ⟨f, φ(x/a)⟩ = a^{λ+1} (⟨f, φ⟩ + Σ_r log^r a ⟨f_r, φ⟩)
  euler          -⟨f, x φ'⟩ = (λ+1) ⟨f, φ⟩ + ⟨f_1, φ⟩, down the companion chain
  independence   smallest / largest singular value of [⟨t_i, φ_j⟩]
  quasi          a^{∓λ} log^{-k} a · f(a^{±1} x) → f_0 (or (-1)^k f_0 at zero)

Independent samples fan out through joblib.
"""
import math
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, NamedTuple, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from .errors import PreconditionError
from .expr_text import complex_to_json, format_expr
from .pairing import PairingEngine, scaled_argument
from .probes import TestFunction
from .qahd_algebra import QahdExpr, QahdTerm, canonicalize, power_of_scale, quasi_asymptotics, scaling_expansion, single_component
from .settings import DEFAULT_TOL, INDEP_EPS, N_JOBS

logger = logging.getLogger("services.laws")

SCALING_TOL = 1e-7
EULER_TOL = 1e-7
# slack on the fitted C/log a envelope
QUASI_SLACK = 1.25


@dataclass
class LawSample:
    params: Dict[str, Any]
    lhs: complex
    rhs: complex
    residual: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "params": self.params,
            "lhs": complex_to_json(self.lhs),
            "rhs": complex_to_json(self.rhs),
            "residual": self.residual,
        }


@dataclass
class LawReport:
    law_name: str
    tolerance: float
    samples: List[LawSample] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return max((s.residual for s in self.samples), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance

    def to_dict(self) -> Dict[str, Any]:
        out = {
            "law": self.law_name,
            "tolerance": self.tolerance,
            "samples": [s.to_dict() for s in self.samples],
            "max_residual": self.max_residual,
            "passed": self.passed,
        }
        if self.details:
            out["details"] = self.details
        return out


def _relative(lhs: complex, rhs: complex) -> float:
    return abs(lhs - rhs) / (1.0 + abs(lhs))


def _fan_out(fn: Callable, jobs: Sequence[Tuple], n_jobs: int) -> List[Any]:
    if n_jobs == 1 or len(jobs) < 2:
        return [fn(*args) for args in jobs]
    return Parallel(n_jobs=n_jobs)(delayed(fn)(*args) for args in jobs)


# ---------------------------------------------------------------------
# Scaling
# ---------------------------------------------------------------------
def _scaling_samples(expr: QahdExpr, phi: TestFunction, a_grid: Sequence[float], pair_tol: float) -> List[LawSample]:
    engine = PairingEngine(pair_tol)
    expansion = scaling_expansion(expr)[0]
    base = engine.pair(expr, phi).value
    companions = [engine.pair(c, phi).value for c in expansion.companions]
    out = []
    for a in a_grid:
        lhs = engine.pair(expr, scaled_argument(phi, a)).value
        la = math.log(a)
        inner = base + sum(v * la ** r for r, v in enumerate(companions, start=1))
        rhs = power_of_scale(a, expansion.degree + 1) * inner
        out.append(LawSample({"phi": phi.label, "a": a}, lhs, rhs, _relative(lhs, rhs)))
    return out


def verify_scaling(
    expr: QahdExpr,
    phis: Sequence[TestFunction],
    a_grid: Sequence[float],
    tol: float = SCALING_TOL,
    pair_tol: float = DEFAULT_TOL,
    n_jobs: int = N_JOBS,
) -> LawReport:
    lam, order = single_component(expr)
    batches = _fan_out(_scaling_samples, [(expr, phi, list(a_grid), pair_tol) for phi in phis], n_jobs)
    report = LawReport("scaling", tol, [s for batch in batches for s in batch])
    report.details = {"expr": format_expr(expr), "degree": complex_to_json(lam), "order": order}
    logger.info("Scaling law for %s: max residual %.3g over %d samples", format_expr(expr), report.max_residual, len(report.samples))
    return report


# ---------------------------------------------------------------------
# Euler system
# ---------------------------------------------------------------------
def euler_chain(expr: QahdExpr) -> List[QahdExpr]:
    """[f_k, f_{k-1}, ..., f_0] with f_{r-1} the first companion of f_r."""
    chain = [expr]
    while True:
        expansion = scaling_expansion(chain[-1])[0]
        if expansion.order == 0:
            return chain
        chain.append(expansion.companion(1))


def _euler_samples(chain: List[QahdExpr], lam: complex, phi: TestFunction, pair_tol: float) -> List[LawSample]:
    engine = PairingEngine(pair_tol)
    x_dphi = phi.x_dphi()
    values = [engine.pair(f, phi).value for f in chain]
    out = []
    for level, f in enumerate(chain):
        lhs = -engine.pair(f, x_dphi).value
        lower = values[level + 1] if level + 1 < len(chain) else 0j
        rhs = (lam + 1) * values[level] + lower
        out.append(LawSample({"phi": phi.label, "level": len(chain) - 1 - level}, lhs, rhs, _relative(lhs, rhs)))
    return out


def verify_euler(
    expr: QahdExpr,
    phis: Sequence[TestFunction],
    tol: float = EULER_TOL,
    pair_tol: float = DEFAULT_TOL,
    n_jobs: int = N_JOBS,
) -> LawReport:
    lam, order = single_component(expr)
    chain = euler_chain(expr)
    batches = _fan_out(_euler_samples, [(chain, lam, phi, pair_tol) for phi in phis], n_jobs)
    report = LawReport("euler", tol, [s for batch in batches for s in batch])
    report.details = {"expr": format_expr(expr), "chain": [format_expr(f) for f in chain]}
    logger.info("Euler system for %s: max residual %.3g", format_expr(expr), report.max_residual)
    return report


# ---------------------------------------------------------------------
# Linear independence
# ---------------------------------------------------------------------
class IndependenceResult(NamedTuple):
    min_singular_value: float
    passed: bool
    ratio: float = 0.0


def pairing_matrix(terms: Sequence[QahdTerm], phis: Sequence[TestFunction], pair_tol: float = DEFAULT_TOL) -> np.ndarray:
    engine = PairingEngine(pair_tol)
    return np.array([[engine.pair_term(t, phi).value for phi in phis] for t in terms], dtype=complex)


def verify_independence(
    terms: Sequence[QahdTerm],
    phis: Sequence[TestFunction],
    eps: float = INDEP_EPS,
    pair_tol: float = DEFAULT_TOL,
) -> IndependenceResult:
    terms = list(terms)
    if not terms:
        raise PreconditionError("no terms to check")
    if len(phis) < len(terms):
        raise PreconditionError(f"need at least {len(terms)} test functions, got {len(phis)}")
    if len(canonicalize((t, 1.0) for t in terms)) != len(terms):
        raise PreconditionError("terms must be pairwise distinct")
    sv = np.linalg.svd(pairing_matrix(terms, phis, pair_tol), compute_uv=False)
    ratio = float(sv[-1] / sv[0]) if sv[0] > 0 else 0.0
    logger.info("Independence of %d terms: singular values %s (ratio %.3g)", len(terms), np.array2string(sv, precision=3), ratio)
    return IndependenceResult(float(sv[-1]), ratio >= eps, ratio)


def independence_report(
    terms: Sequence[QahdTerm],
    phis: Sequence[TestFunction],
    eps: float = INDEP_EPS,
    pair_tol: float = DEFAULT_TOL,
) -> LawReport:
    """verify_independence as a report: residual eps / ratio, passing at 1."""
    result = verify_independence(terms, phis, eps, pair_tol)
    residual = eps / result.ratio if result.ratio > 0 else math.inf
    params = {"terms": [str(t) for t in terms], "phis": [phi.label for phi in phis]}
    report = LawReport("independence", 1.0, [LawSample(params, result.ratio, eps, residual)])
    report.details = {"min_singular_value": result.min_singular_value, "ratio": result.ratio, "eps": eps}
    return report


# ---------------------------------------------------------------------
# Quasi-asymptotics
# ---------------------------------------------------------------------
def quasi_residuals(errors: Sequence[float], grid: Sequence[float]) -> Tuple[float, List[float]]:
    """
    Fitted C and per-sample residuals against min(QUASI_SLACK · C / log a, previous error).
    A residual ≤ 1 needs an error strictly below the previous one.
    """
    logs = [math.log(a) for a in grid]
    fitted_c = sum(e / L for e, L in zip(errors, logs)) / sum(1.0 / L ** 2 for L in logs)
    residuals = []
    for i, (err, L) in enumerate(zip(errors, logs)):
        bound = QUASI_SLACK * fitted_c / L
        if i:
            bound = min(bound, math.nextafter(errors[i - 1], 0.0))
        if bound > 0:
            residuals.append(err / bound)
        else:
            residuals.append(0.0 if err == 0 and i == 0 else math.inf)
    return fitted_c, residuals


def verify_quasi_asymptotics(
    expr: QahdExpr,
    phi: TestFunction,
    a_grid: Sequence[float],
    at: str = "infinity",
    pair_tol: float = DEFAULT_TOL,
) -> LawReport:
    """
    Errors e(a) = |ratio(a) - target| / |target| must decrease strictly along the grid
    and must stay under QUASI_SLACK · C / log a, C fitted by least squares.
    Each sample's residual is e(a) over that bound, so the report passes at 1.
    """
    grid = [float(a) for a in a_grid]
    if not grid or any(a < 10 for a in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise PreconditionError("a_grid must be increasing with every a ≥ 10")
    qa = quasi_asymptotics(expr, at=at, strict=True)
    engine = PairingEngine(pair_tol)
    target = engine.pair(qa.limit, phi).value
    if target == 0:
        raise PreconditionError(f"{phi.label} annihilates the limit; pick another test function")
    lam, k = single_component(expr)

    ratios, errors = [], []
    for a in grid:
        log_k = math.log(a) ** k
        if at == "infinity":
            value = engine.pair(expr, scaled_argument(phi, a)).value / a
            ratio = value / (power_of_scale(a, lam) * log_k)
        else:
            value = engine.pair(expr, scaled_argument(phi, 1.0 / a)).value * a
            ratio = value / (power_of_scale(a, -lam) * log_k)
        ratios.append(ratio)
        errors.append(abs(ratio - target) / abs(target))

    fitted_c, residuals = quasi_residuals(errors, grid)
    samples = []
    for a, ratio, err, residual in zip(grid, ratios, errors, residuals):
        samples.append(LawSample({"phi": phi.label, "a": a, "at": at, "error": err}, ratio, target, residual))

    report = LawReport("quasi", 1.0, samples)
    report.details = {
        "expr": format_expr(expr),
        "at": at,
        "automodel_degree": complex_to_json(qa.automodel_degree),
        "automodel_log_power": qa.automodel_log_power,
        "limit": format_expr(qa.limit),
        "fitted_c": fitted_c,
    }
    logger.info("Quasi-asymptotics of %s at %s: errors %s", format_expr(expr), at, ", ".join(f"{e:.3g}" for e in errors))
    return report
