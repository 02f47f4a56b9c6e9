# presentation/reasons.py
from typing import Any, Dict, List


def _params(p: Dict[str, Any]) -> str:
    return ", ".join(f"{k}={v}" for k, v in p.items() if k != "error")


def derive_reasons(report: Dict[str, Any], limit: int = 5) -> List[str]:
    """
    Human-friendly explanation of a law report (as produced by LawReport.to_dict()).
    Lists the worst failing samples first.
    """
    if report.get("passed"):
        return ["All samples within tolerance"]

    tol = float(report.get("tolerance", 0.0))
    failing = [s for s in report.get("samples", []) if float(s.get("residual", 0.0)) > tol]
    failing.sort(key=lambda s: -float(s["residual"]))

    law = report.get("law", "")
    out: List[str] = []
    for s in failing[:limit]:
        params = s.get("params", {})
        if law == "quasi":
            out.append(
                f"{_params(params)}: error {params.get('error', float('nan')):.3g} "
                f"breaks the decreasing C/log a envelope (x{s['residual']:.3g})"
            )
        else:
            out.append(f"{_params(params)}: residual {s['residual']:.3g} > {tol:g}")
    if len(failing) > limit:
        out.append(f"... and {len(failing) - limit} more failing samples")
    if not out:
        out.append("Report failed without failing samples")
    return out
