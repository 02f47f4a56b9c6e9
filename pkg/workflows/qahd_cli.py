"""
Command-line front end.

  python -m workflows.qahd_cli pair "xplus(1,0)" --phi hermite:1
  python -m workflows.qahd_cli dilate "delta(0)" --a 2
  python -m workflows.qahd_cli expand "xplus(0.5,2)"
  python -m workflows.qahd_cli fourier "pfplus(1,0)"
  python -m workflows.qahd_cli gamma-table --k 1 --grid 1.3,2.5,0,-1
  python -m workflows.qahd_cli verify --law scaling "xplus(0.5,1)"

Exit codes: 0 ok, 1 law failed, 2 invalid input, 3 numerical failure.
Documents go to stdout, error JSON to stderr.
"""
import os
import sys
import logging
import argparse
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

# Ensure services can be imported
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

load_dotenv()

from services.errors import NumericalError, PreconditionError, QahdError
from services.settings import DEFAULT_TOL, INDEP_EPS, N_JOBS, load_verification_defaults
from services.expr_text import complex_to_json, expr_to_json, format_expr, parse_complex, parse_expr
from services.probes import parse_probes
from services.qahd_algebra import components, degree_order, dilate, quasi_asymptotics, scaling_expansion
from services.pairing import pair
from services.fourier_table import format_freq, fourier, freq_to_json, gamma_table
from services.laws import independence_report, verify_euler, verify_quasi_asymptotics, verify_scaling
from presentation import emit_csv, emit_error, emit_json, gamma_table_frame, present_report, setup_logging

logger = logging.getLogger("workflows.qahd_cli")

VERBS = ("pair", "dilate", "expand", "fourier", "gamma-table", "verify")
LAWS = ("scaling", "euler", "independence", "quasi")

EXIT_OK = 0
EXIT_LAW_FAILED = 1


@dataclass
class Command:
    verb: str
    expr_text: str = ""
    options: Dict[str, Any] = field(default_factory=dict)

    def validate(self) -> None:
        if self.verb not in VERBS:
            raise PreconditionError(f"unknown verb {self.verb!r}")
        if self.verb != "gamma-table" and not self.expr_text.strip():
            raise PreconditionError(f"{self.verb} needs an expression")
        if self.verb == "dilate" and self.options.get("a") is None:
            raise PreconditionError("dilate needs --a")
        if self.verb == "verify" and self.options.get("law") not in LAWS:
            raise PreconditionError(f"verify needs --law one of {', '.join(LAWS)}")


def _expr_document(expr) -> Dict[str, Any]:
    return {"expr": format_expr(expr), "terms": expr_to_json(expr)}


def _phis(options: Dict[str, Any], defaults: Dict[str, Any]) -> List:
    return parse_probes(options.get("phi") or defaults["phi_battery"])


# ---------------------------------------------------------------------
# Verbs
# ---------------------------------------------------------------------
def _run_pair(cmd: Command, defaults: Dict[str, Any]) -> int:
    expr = parse_expr(cmd.expr_text)
    phis = _phis(cmd.options, {"phi_battery": defaults["phi_battery"][:1]})
    tol = cmd.options.get("tol") or DEFAULT_TOL
    results = []
    for phi in phis:
        res = pair(expr, phi, tol)
        doc = res.to_dict()
        doc["phi"] = phi.label
        results.append(doc)
    emit_json(results[0] if len(results) == 1 else results)
    return EXIT_OK


def _run_dilate(cmd: Command, defaults: Dict[str, Any]) -> int:
    emit_json(_expr_document(dilate(parse_expr(cmd.expr_text), cmd.options["a"])))
    return EXIT_OK


def _run_expand(cmd: Command, defaults: Dict[str, Any]) -> int:
    expr = parse_expr(cmd.expr_text)
    classes = degree_order(expr)
    out = []
    for (deg, part), expansion, cls in zip(components(expr), scaling_expansion(expr), classes):
        block = {
            "degree": complex_to_json(deg),
            "order": cls.order,
            "component": _expr_document(part),
            "companions": [_expr_document(c) for c in expansion.companions],
        }
        for at in ("infinity", "zero"):
            qa = quasi_asymptotics(part, at=at)
            block[f"quasi_{at}"] = {
                "automodel_degree": complex_to_json(qa.automodel_degree),
                "automodel_log_power": qa.automodel_log_power,
                "limit": _expr_document(qa.limit),
            }
        out.append(block)
    emit_json({"expr": format_expr(expr), "components": out})
    return EXIT_OK


def _run_fourier(cmd: Command, defaults: Dict[str, Any]) -> int:
    freq = fourier(parse_expr(cmd.expr_text), cmd.options.get("method") or "substitution")
    emit_json({"freq": format_freq(freq), "terms": freq_to_json(freq)})
    return EXIT_OK


def _run_gamma_table(cmd: Command, defaults: Dict[str, Any]) -> int:
    k = cmd.options.get("k") or 1
    grid = [parse_complex(t) for t in (cmd.options.get("grid") or "").split(",") if t.strip()]
    if not grid:
        raise PreconditionError("gamma-table needs --grid with at least one argument")
    rows = gamma_table(k, grid, cmd.options.get("method") or "closed-form")
    emit_csv(gamma_table_frame(rows))
    return EXIT_OK


def _run_verify(cmd: Command, defaults: Dict[str, Any]) -> int:
    expr = parse_expr(cmd.expr_text)
    law = cmd.options["law"]
    tol = cmd.options.get("tol")
    pair_tol = cmd.options.get("pair_tol") or DEFAULT_TOL
    n_jobs = cmd.options.get("jobs") or N_JOBS
    if law == "scaling":
        report = verify_scaling(
            expr, _phis(cmd.options, defaults), cmd.options.get("a_grid") or defaults["a_grid"],
            **({"tol": tol} if tol else {}), pair_tol=pair_tol, n_jobs=n_jobs,
        )
    elif law == "euler":
        report = verify_euler(
            expr, _phis(cmd.options, defaults), **({"tol": tol} if tol else {}), pair_tol=pair_tol, n_jobs=n_jobs,
        )
    elif law == "independence":
        terms = [t for t, _ in expr.items()]
        report = independence_report(terms, _phis(cmd.options, defaults), tol or INDEP_EPS, pair_tol)
    else:
        phi = _phis(cmd.options, defaults)[0]
        report = verify_quasi_asymptotics(
            expr, phi, cmd.options.get("a_grid") or defaults["quasi_grid"], cmd.options.get("at") or "infinity", pair_tol,
        )
    doc = report.to_dict()
    if cmd.options.get("format") == "table":
        present_report(doc)
    else:
        emit_json(doc)
    return EXIT_OK if report.passed else EXIT_LAW_FAILED


_DISPATCH = {
    "pair": _run_pair,
    "dilate": _run_dilate,
    "expand": _run_expand,
    "fourier": _run_fourier,
    "gamma-table": _run_gamma_table,
    "verify": _run_verify,
}


def run(command: Command, defaults: Optional[Dict[str, Any]] = None) -> int:
    """Execute one command; returns the process exit code."""
    try:
        command.validate()
        defaults = defaults or load_verification_defaults(command.options.get("defaults"))
        return _DISPATCH[command.verb](command, defaults)
    except QahdError as e:
        logger.debug("%s failed", command.verb, exc_info=True)
        emit_error(e.to_dict())
        return e.exit_code
    except ArithmeticError as e:
        # overflow or zero division out of numpy/scipy counts as a numerical failure
        logger.exception("%s hit a floating-point error", command.verb)
        emit_error({"ok": False, "kind": type(e).__name__, "error": str(e)})
        return NumericalError.exit_code


# ---------------------------------------------------------------------
# argparse
# ---------------------------------------------------------------------
def _floats(text: str) -> List[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qahd", description="Quasi associated homogeneous distributions in one dimension")
    parser.add_argument("--defaults", help="path of the verification defaults JSON")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("pair", help="regularized pairing ⟨f, φ⟩")
    p.add_argument("expr")
    p.add_argument("--phi", action="append", help="hermite:<c0,c1,...>[@scale] or exp:<m>; repeatable")
    p.add_argument("--tol", type=float)

    p = sub.add_parser("dilate", help="exact expression of f(ax)")
    p.add_argument("expr")
    p.add_argument("--a", type=float, required=True)

    p = sub.add_parser("expand", help="degree/order classes, scaling companions, quasi-asymptotics")
    p.add_argument("expr")

    p = sub.add_parser("fourier", help="Fourier transform into the frequency basis")
    p.add_argument("expr")
    p.add_argument("--method", choices=["substitution", "closed-form"], default="substitution")

    p = sub.add_parser("gamma-table", help="CSV of associated homogeneous Γ-functions")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--grid", required=True, help="comma-separated arguments, e.g. 1.3,2+1i,0")
    p.add_argument("--method", choices=["substitution", "closed-form"], default="closed-form")

    p = sub.add_parser("verify", help="numerical law check; exit 1 when it fails")
    p.add_argument("expr")
    p.add_argument("--law", choices=LAWS, required=True)
    p.add_argument("--phi", action="append")
    p.add_argument("--a", dest="a_grid", type=_floats, help="comma-separated dilation grid")
    p.add_argument("--at", choices=["infinity", "zero"], default="infinity")
    p.add_argument("--tol", type=float)
    p.add_argument("--pair-tol", dest="pair_tol", type=float)
    p.add_argument("--jobs", type=int)
    p.add_argument("--format", choices=["json", "table"], default="json")
    return parser


def parse_command(argv: Optional[List[str]] = None) -> Command:
    args = vars(build_parser().parse_args(argv))
    verb = args.pop("verb")
    expr_text = args.pop("expr", "") or ""
    return Command(verb, expr_text, {k: v for k, v in args.items() if v is not None})


def main(argv: Optional[List[str]] = None) -> int:
    setup_logging()
    return run(parse_command(argv))


if __name__ == "__main__":
    sys.exit(main())
