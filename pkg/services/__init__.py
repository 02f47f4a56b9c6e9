"""
Service layer package for:
- qahd_algebra (canonical QAHD expressions, dilation, scaling expansions)
- probes (Hermite-Gaussian and exponential test functions)
- pairing (regularized ⟨f, φ⟩)
- gamma_kernel (complex Γ, derivatives, Laplace moments)
- fourier_table (Fourier transforms, associated Γ-functions)
- laws (scaling / Euler / independence / quasi-asymptotics checks)
- expr_text (expression grammar and JSON)
"""

from .errors import QahdError, NumericalError
from .qahd_algebra import (
    Family,
    QahdTerm,
    QahdExpr,
    DegreeOrder,
    ScalingExpansion,
    canonicalize,
    xplus,
    xminus,
    pfplus,
    pfminus,
    delta,
    single,
    degree_order,
    dilate,
    scaling_expansion,
    d_dlambda,
    d_dlambda_expr,
    expand_i0,
    quasi_asymptotics,
)
from .probes import TestFunction, HermiteGaussian, ExponentialProbe, parse_probe
from .pairing import PairingEngine, PairingResult, subtraction_order, pair_term, pair, scaled_argument
from .gamma_kernel import cgamma, loggamma_derivs, laplace_moment, pf_laplace_moment
from .fourier_table import (
    FreqFamily,
    FreqTerm,
    FreqExpr,
    GammaValue,
    eval_freq,
    fourier,
    solve_ft_coeffs,
    ft_closed_form_coeffs,
    gamma_assoc,
    parseval_check,
)
from .laws import LawReport, verify_scaling, verify_euler, verify_independence, verify_quasi_asymptotics
from .expr_text import parse_expr, format_expr, expr_to_json, expr_from_json

__all__ = [
    "QahdError",
    "NumericalError",
    "Family",
    "QahdTerm",
    "QahdExpr",
    "DegreeOrder",
    "ScalingExpansion",
    "canonicalize",
    "xplus",
    "xminus",
    "pfplus",
    "pfminus",
    "delta",
    "single",
    "degree_order",
    "dilate",
    "scaling_expansion",
    "d_dlambda",
    "d_dlambda_expr",
    "expand_i0",
    "quasi_asymptotics",
    "TestFunction",
    "HermiteGaussian",
    "ExponentialProbe",
    "parse_probe",
    "PairingEngine",
    "PairingResult",
    "subtraction_order",
    "pair_term",
    "pair",
    "scaled_argument",
    "cgamma",
    "loggamma_derivs",
    "laplace_moment",
    "pf_laplace_moment",
    "FreqFamily",
    "FreqTerm",
    "FreqExpr",
    "GammaValue",
    "eval_freq",
    "fourier",
    "solve_ft_coeffs",
    "ft_closed_form_coeffs",
    "gamma_assoc",
    "parseval_check",
    "LawReport",
    "verify_scaling",
    "verify_euler",
    "verify_independence",
    "verify_quasi_asymptotics",
    "parse_expr",
    "format_expr",
    "expr_to_json",
    "expr_from_json",
]
