# presentation/presenter.py
import os
import sys
import json
from typing import Any, Dict, List, Optional, TextIO

import pandas as pd

from .reasons import derive_reasons

CSV_FLOAT_FORMAT = "%.17g"
GAMMA_TABLE_COLUMNS = ["j", "k", "argument_re", "argument_im", "value_re", "value_im"]


def present_step(message: str, status: Optional[str] = None, log_mode: Optional[str] = None) -> None:
    """
    One-line progress update without payloads.
    """
    if log_mode is None:
        log_mode = (os.getenv("LOG_MODE", "presentation") or "presentation").lower()

    if log_mode == "presentation":
        if status:
            print(f"• {message} — {status}")
        else:
            print(f"• {message}")
    else:
        if status:
            print(f"[STEP] {message} — {status}")
        else:
            print(f"[STEP] {message}")


def emit_json(document: Any, stream: Optional[TextIO] = None) -> None:
    # json renders floats with repr, i.e. shortest round-trip (≤ 17 digits)
    stream = stream or sys.stdout
    stream.write(json.dumps(document, indent=2, default=str))
    stream.write("\n")


def emit_error(error: Dict[str, Any], stream: Optional[TextIO] = None) -> None:
    stream = stream or sys.stderr
    stream.write(json.dumps(error))
    stream.write("\n")


def gamma_table_frame(rows: List[Any]) -> pd.DataFrame:
    """rows of GammaValue -> the gamma-table columns."""
    records = [
        {
            "j": r.j,
            "k": r.order,
            "argument_re": complex(r.argument).real,
            "argument_im": complex(r.argument).imag,
            "value_re": complex(r.value).real,
            "value_im": complex(r.value).imag,
        }
        for r in rows
    ]
    return pd.DataFrame.from_records(records, columns=GAMMA_TABLE_COLUMNS)


def emit_csv(frame: pd.DataFrame, stream: Optional[TextIO] = None) -> None:
    stream = stream or sys.stdout
    frame.to_csv(stream, index=False, float_format=CSV_FLOAT_FORMAT)


def report_frame(report: Dict[str, Any]) -> pd.DataFrame:
    rows = []
    for s in report.get("samples", []):
        row = dict(s.get("params", {}))
        row["lhs"] = complex(s["lhs"]["re"], s["lhs"]["im"])
        row["rhs"] = complex(s["rhs"]["re"], s["rhs"]["im"])
        row["residual"] = s["residual"]
        rows.append(row)
    return pd.DataFrame(rows)


def present_report(report: Dict[str, Any], log_mode: Optional[str] = None, stream: Optional[TextIO] = None) -> None:
    """
    Law report for humans:
    - presentation mode: summary, sample table, reasons on failure
    - debug mode: pretty JSON of the whole report
    """
    if log_mode is None:
        log_mode = (os.getenv("LOG_MODE", "presentation") or "presentation").lower()
    stream = stream or sys.stdout

    if log_mode != "presentation":
        stream.write("\n=== FULL LAW REPORT (DEBUG) ===\n")
        emit_json(report, stream)
        return

    verdict = "PASSED" if report.get("passed") else "FAILED"
    stream.write(f"\n=== {str(report.get('law', '')).upper()}: {verdict} ===\n")
    details = report.get("details") or {}
    if "expr" in details:
        stream.write(f"Expression   : {details['expr']}\n")
    stream.write(f"Max residual : {report.get('max_residual', 0.0):.3g} (tolerance {report.get('tolerance', 0.0):g})\n")
    frame = report_frame(report)
    if not frame.empty:
        stream.write(frame.to_string(index=False))
        stream.write("\n")
    if not report.get("passed"):
        stream.write("Reasons      : " + "; ".join(derive_reasons(report)) + "\n")
    stream.write("\n")
