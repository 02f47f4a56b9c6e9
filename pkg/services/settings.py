"""
Runtime knobs, read once from the environment.

Entry points call ``load_dotenv()`` before importing services, so a local
``.env`` can override any of these:
  - QAHD_POLE_EPS, QAHD_MERGE_EPS, QAHD_DROP_EPS
  - QAHD_DEFAULT_TOL, QAHD_PANEL_LIMIT
  - QAHD_INDEP_EPS, QAHD_COND_MAX
  - QAHD_N_JOBS (joblib workers for law fan-out)
  - QAHD_DEFAULTS_FILE (default phi battery and dilation grid)
"""
import os
import json
from typing import Any, Dict

POLE_EPS = float(os.getenv("QAHD_POLE_EPS", "1e-6"))
MERGE_EPS = float(os.getenv("QAHD_MERGE_EPS", "1e-12"))
DROP_EPS = float(os.getenv("QAHD_DROP_EPS", "1e-14"))

DEFAULT_TOL = float(os.getenv("QAHD_DEFAULT_TOL", "1e-9"))
PANEL_LIMIT = int(os.getenv("QAHD_PANEL_LIMIT", "2000"))

INDEP_EPS = float(os.getenv("QAHD_INDEP_EPS", "1e-8"))
COND_MAX = float(os.getenv("QAHD_COND_MAX", "1e8"))

# highest Gamma derivative the kernel will assemble
MAX_GAMMA_DERIV = 8

N_JOBS = int(os.getenv("QAHD_N_JOBS", "1"))

DEFAULTS_FILE = os.getenv(
    "QAHD_DEFAULTS_FILE",
    os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "verification_defaults.json"),
)

_FALLBACK_DEFAULTS: Dict[str, Any] = {
    "phi_battery": ["hermite:1", "hermite:0,1", "hermite:1,0,1", "hermite:0,0,0,1"],
    "a_grid": [0.3, 0.7, 1.0, 2.0, 5.0, 10.0],
    "quasi_grid": [1e2, 1e3, 1e4, 1e5],
}


def load_verification_defaults(path: str = None) -> Dict[str, Any]:
    """
    Default phi battery and dilation grids. Missing file or keys fall back to
    the built-in values.
    """
    path = path or DEFAULTS_FILE
    merged = dict(_FALLBACK_DEFAULTS)
    if os.path.exists(path):
        with open(path, "r", encoding="utf-8") as fh:
            merged.update(json.load(fh))
    return merged
