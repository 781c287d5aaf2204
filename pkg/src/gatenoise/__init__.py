"""Exact tools for noisy 2-input gate formulas near the threshold (3 - sqrt7)/4."""

from .numeric import BETA2, SQRT7, X0, RationalInterval, SurdEnclosure, SurdNumber, enclose_surd, surd_sign
from .potential import Q_MAX, Q_MIN, BiasPoint, check_dpi, eta, gate_output, q_eval
from .formula import Const, Gate, GateOp, Input, Not, normalize, parse_formula, render_formula
from .propagate import WirePosterior, check_invariant_chain, propagate

__all__ = [
    "BETA2",
    "SQRT7",
    "X0",
    "Q_MAX",
    "Q_MIN",
    "BiasPoint",
    "Const",
    "Gate",
    "GateOp",
    "Input",
    "Not",
    "RationalInterval",
    "SurdEnclosure",
    "SurdNumber",
    "WirePosterior",
    "check_dpi",
    "check_invariant_chain",
    "enclose_surd",
    "eta",
    "gate_output",
    "normalize",
    "parse_formula",
    "propagate",
    "q_eval",
    "render_formula",
    "surd_sign",
]
