"""Certified verification of the potential-decay inequalities."""

from .bnb import (
    BUDGET_EXHAUSTED,
    CERTIFIED,
    FAILED,
    BoundCertificate,
    Box,
    MinimumEnclosure,
    certified_minimum,
    certify_lower_bound,
    recheck,
    taylor_lower_bound,
)
from .expr import Expr, Var, eta, q
from .inequalities import INEQUALITY_NAMES, TARGETS, Inequality, build_inequality
from .poly import MultiPoly
from .proofs import (
    CertificateRecord,
    ItemResult,
    ScalarCheck,
    TaylorExpansion,
    TaylorReport,
    VerificationReport,
    certify_inequality,
    load_summary,
    taylor_coefficients,
    verify_all,
    verify_convexity_reduction,
    verify_taylor_bounds,
)

__all__ = [
    "BUDGET_EXHAUSTED",
    "CERTIFIED",
    "FAILED",
    "BoundCertificate",
    "Box",
    "CertificateRecord",
    "Expr",
    "INEQUALITY_NAMES",
    "Inequality",
    "ItemResult",
    "MinimumEnclosure",
    "MultiPoly",
    "ScalarCheck",
    "TARGETS",
    "TaylorExpansion",
    "TaylorReport",
    "Var",
    "VerificationReport",
    "build_inequality",
    "certified_minimum",
    "certify_inequality",
    "certify_lower_bound",
    "eta",
    "load_summary",
    "q",
    "recheck",
    "taylor_coefficients",
    "taylor_lower_bound",
    "verify_all",
    "verify_convexity_reduction",
    "verify_taylor_bounds",
]
