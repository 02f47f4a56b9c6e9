"""
End-to-end acceptance battery: one step line per criterion, exit 1 if any fails.

  python -m workflows.acceptance_run [--quick] [--jobs N]
"""
import os
import sys
import math
import logging
import argparse
from typing import Callable, List, Tuple

import numpy as np
from dotenv import load_dotenv

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

load_dotenv()

from services.settings import N_JOBS, load_verification_defaults
from services.qahd_algebra import (
    QahdExpr,
    delta,
    dilate,
    expr_of,
    pfminus,
    pfplus,
    pole_distance,
    power_of_scale,
    single,
    xminus,
    xplus,
)
from services.probes import HermiteGaussian, parse_probes
from services.gamma_kernel import EULER_GAMMA, cgamma, loggamma_derivs, pf_laplace_moment
from services.fourier_table import (
    FreqFamily,
    FreqTerm,
    fourier,
    ft_closed_form_coeffs,
    gamma_assoc,
    parseval_check,
    solve_ft_coeffs,
)
from services.laws import verify_euler, verify_independence, verify_quasi_asymptotics, verify_scaling
from presentation import present_step, setup_logging

logger = logging.getLogger("workflows.acceptance_run")

SEED = 20240917


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def _admissible(rng: np.random.Generator, re_lo: float, re_hi: float, im_max: float, count: int) -> List[complex]:
    out: List[complex] = []
    while len(out) < count:
        lam = complex(rng.uniform(re_lo, re_hi), rng.uniform(-im_max, im_max))
        if pole_distance(lam) > 0.05:
            out.append(lam)
    return out


# ---------------------------------------------------------------------
# Criteria
# ---------------------------------------------------------------------
def scaling_suite(phis, quick: bool, n_jobs: int) -> Tuple[bool, str]:
    a_grid = [0.3, 0.7, 2.0, 5.0, 10.0]
    degrees = [0.5, -0.5, -1.5, 1.3, complex(0.2, 0.7)]
    orders = range(2) if quick else range(4)
    cases: List[QahdExpr] = []
    for k in orders:
        for lam in degrees[: 2 if quick else 5]:
            cases += [single(xplus(lam, k)), single(xminus(lam, k))]
        for n in range(1, 3 if quick else 6):
            cases += [single(pfplus(n, k)), single(pfminus(n, k))]
    cases += [single(delta(m)) for m in range(5)]
    worst = 0.0
    for expr in cases:
        worst = max(worst, verify_scaling(expr, phis, a_grid, n_jobs=n_jobs).max_residual)
    return worst <= 1e-7, f"{len(cases)} expressions, max residual {worst:.2g}"


def log_square_identity() -> Tuple[bool, str]:
    a = 3.0
    la = math.log(a)
    expected = expr_of((xplus(0, 2), 1.0), (xplus(0, 1), 2.0 * la), (xplus(0, 0), la ** 2))
    return dilate(single(xplus(0, 2)), a) == expected, "log²(ax) = log²x + 2 log a log x + log²a"


def delta_companion(phis) -> Tuple[bool, str]:
    a = 2.0
    coeff = dilate(single(pfplus(1, 0)), a).coeff(delta(0))
    exact = abs(coeff - power_of_scale(a, -1) * math.log(a)) <= 1e-15
    report = verify_scaling(single(pfplus(1, 0)), phis, [a])
    return exact and report.passed, f"δ coefficient {coeff.real:.17g}, residual {report.max_residual:.2g}"


def euler_suite(phis, quick: bool, n_jobs: int) -> Tuple[bool, str]:
    rng = np.random.default_rng(SEED)
    worst, count = 0.0, 0
    for lam in _admissible(rng, -3.5, 2.0, 2.0, 4 if quick else 20):
        for k in range(4):
            for term in (xplus(lam, k), xminus(lam, k)):
                worst = max(worst, verify_euler(single(term), phis, n_jobs=n_jobs).max_residual)
                count += 1
    for n in range(1, 4):
        for k in range(3):
            worst = max(worst, verify_euler(single(pfplus(n, k)), phis, n_jobs=n_jobs).max_residual)
            count += 1
    return worst <= 1e-7, f"{count} chains, max residual {worst:.2g}"


def fourier_golden() -> Tuple[bool, str]:
    rng = np.random.default_rng(SEED + 1)
    worst0 = 0.0
    for lam in _admissible(rng, -0.9, 3.0, 1.0, 10):
        coeff = fourier(single(xplus(lam, 0))).coeff(FreqTerm(FreqFamily.XIPLUSI0, -lam - 1, 0))
        worst0 = max(worst0, _rel(coeff, 1j ** (lam + 1) * cgamma(lam + 1)))
    lam = 0.3
    g, dg = loggamma_derivs(lam + 1, 1)
    phase = 1j ** (lam + 1)
    f1 = fourier(single(xplus(lam, 1)))
    worst1 = max(
        _rel(f1.coeff(FreqTerm(FreqFamily.XIPLUSI0, -lam - 1, 1)), -phase * g),
        _rel(f1.coeff(FreqTerm(FreqFamily.XIPLUSI0, -lam - 1, 0)), phase * (dg + 0.5j * math.pi * g)),
    )
    fp = fourier(single(pfplus(1, 0)))
    worst_p = max(
        _rel(fp.coeff(FreqTerm(FreqFamily.XIPOLYLOG, 0, 1)), -1.0),
        _rel(fp.coeff(FreqTerm(FreqFamily.XIPOLYLOG, 0, 0)), -EULER_GAMMA + 0.5j * math.pi),
    )
    ok = worst0 <= 1e-10 and worst1 <= 1e-8 and worst_p <= 1e-8
    return ok, f"k=0 {worst0:.2g}, k=1 {worst1:.2g}, P(1/x_+) {worst_p:.2g}"


def solver_vs_closed_form() -> Tuple[bool, str]:
    worst = 0.0
    for lam in [-0.7, -0.3, 0.3, 0.7, 1.5, complex(0.4, 0.6), complex(-0.5, -0.8)]:
        solved = solve_ft_coeffs("xplus", lam, 1)
        closed = ft_closed_form_coeffs(lam, 1)
        worst = max(worst, max(_rel(solved[j], closed[j]) for j in range(2)))
    return worst <= 1e-8, f"max relative deviation {worst:.2g}"


def gamma_identities() -> Tuple[bool, str]:
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    lam = 0.3
    worst = max(worst, _rel(gamma_assoc(1, lam + 1, 1).value, -0.5j * math.pi * cgamma(lam + 1)))
    g, dg = loggamma_derivs(lam + 1, 1)
    worst = max(worst, _rel(gamma_assoc(0, lam + 1, 1).value, dg + 0.5j * math.pi * g))
    for lam in _admissible(rng, 0.2, 4.0, 1.0, 20):
        if pole_distance(lam - 1) < 0.05:
            continue
        worst = max(worst, _rel(gamma_assoc(1, lam + 1, 1).value, lam * gamma_assoc(1, lam, 1).value))
        worst = max(worst, _rel(gamma_assoc(0, lam + 1, 1).value, lam * gamma_assoc(0, lam, 1).value + cgamma(lam)))
    for n in range(1, 7):
        upper = gamma_assoc(0, -n + 1, 1, method="substitution").value
        lower = gamma_assoc(0, -n, 1, method="substitution").value
        worst = max(worst, _rel(upper, -n * lower + (-1) ** n / math.factorial(n)))
        upper1 = gamma_assoc(1, -n + 1, 1, method="substitution").value
        lower1 = gamma_assoc(1, -n, 1, method="substitution").value
        worst = max(worst, _rel(upper1, -n * lower1))
    return worst <= 1e-9, f"max relative deviation {worst:.2g}"


def parseval_suite(phis) -> Tuple[bool, str]:
    worst = 0.0
    for expr in [single(xplus(0.5, 0)), single(xplus(0.5, 1)), single(pfplus(1, 0)), single(delta(1))]:
        for phi in phis:
            worst = max(worst, parseval_check(expr, phi).relative_error)
    return worst <= 1e-6, f"max relative deviation {worst:.2g}"


def independence_suite() -> Tuple[bool, str]:
    phis = [HermiteGaussian.from_hermite(c, s) for c in ([1], [0, 1], [1, 0, 1], [0, 0, 0, 1]) for s in (0.5, 2.0)]
    first = verify_independence([xplus(0.5, k) for k in range(4)], phis, eps=1e-6)
    mixed = verify_independence(
        [xplus(0.3, 0), xplus(0.7, 0), delta(2), pfplus(1, 0), xminus(-0.4, 1)], phis, eps=1e-6
    )
    return first.passed and mixed.passed, f"ratios {first.ratio:.2g} and {mixed.ratio:.2g}"


def quasi_suite(phi) -> Tuple[bool, str]:
    grid = [1e2, 1e3, 1e4, 1e5]
    notes, ok = [], True
    for expr, order in [(single(xplus(0.5, 1)), 1), (single(xplus(0.5, 2)), 2), (single(pfplus(1, 0)), 1)]:
        for at in ("infinity", "zero"):
            report = verify_quasi_asymptotics(expr, phi, grid, at=at)
            errors = [s.params["error"] for s in report.samples]
            # order 2 converges like 1/log a with a larger constant
            ok = ok and report.passed and (order > 1 or errors[-1] < 0.05)
            notes.append(f"{errors[-1]:.2g}")
    return ok, "final errors " + ", ".join(notes)


def pf_moment_golden() -> Tuple[bool, str]:
    value = pf_laplace_moment(1, 0, 1.0)
    return abs(value + EULER_GAMMA) <= 1e-9, f"{value.real:.15f} vs -γ"


# ---------------------------------------------------------------------
# Runner
# ---------------------------------------------------------------------
def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Run the acceptance battery")
    parser.add_argument("--quick", action="store_true", help="smaller grids")
    parser.add_argument("--jobs", type=int, default=N_JOBS)
    args = parser.parse_args(argv)

    log_mode = setup_logging()
    defaults = load_verification_defaults()
    phis = parse_probes(defaults["phi_battery"])

    steps: List[Tuple[str, Callable[[], Tuple[bool, str]]]] = [
        ("Scaling law suite", lambda: scaling_suite(phis, args.quick, args.jobs)),
        ("log² dilation identity", log_square_identity),
        ("δ companion of P(1/x_+)", lambda: delta_companion(phis)),
        ("Euler system", lambda: euler_suite(phis, args.quick, args.jobs)),
        ("Fourier golden values", fourier_golden),
        ("Solver vs closed form", solver_vs_closed_form),
        ("Γ_j identities", gamma_identities),
        ("Parseval cross-check", lambda: parseval_suite(phis)),
        ("Linear independence", independence_suite),
        ("Quasi-asymptotics", lambda: quasi_suite(phis[0])),
        ("P-moment golden value", pf_moment_golden),
    ]
    failures = 0
    for name, step in steps:
        try:
            ok, status = step()
        except Exception as e:
            logger.exception("%s raised", name)
            ok, status = False, f"error: {e}"
        present_step(name, ("OK " if ok else "FAILED ") + status, log_mode)
        failures += 0 if ok else 1
    present_step("Acceptance battery", "all passed" if not failures else f"{failures} failed", log_mode)
    return 0 if failures == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
