# presentation/__init__.py
from .logging_config import setup_logging
from .presenter import present_step, present_report, emit_json, emit_error, emit_csv, gamma_table_frame
from .reasons import derive_reasons

__all__ = [
    "setup_logging",
    "present_step",
    "present_report",
    "emit_json",
    "emit_error",
    "emit_csv",
    "gamma_table_frame",
    "derive_reasons",
]
