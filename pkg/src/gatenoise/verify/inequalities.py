"""The named polynomial inequalities in (a, b) and their boxes."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..numeric import BETA2, X0, RationalInterval, SurdNumber, as_fraction, enclose_surd
from .bnb import Box
from .expr import Expr, Var, eta, q
from .poly import MultiPoly

VARIABLES = ("a", "b")
BOX_BITS = 64
TAYLOR_RADIUS = Fraction(1, 50)

INEQUALITY_NAMES = (
    "prop1",
    "fact1_mu0",
    "fact1_muxi",
    "fact2a_plus",
    "fact2a_minus",
    "fact2b_plus",
    "fact2b_minus",
    "fact3_mu0",
    "fact3_case_a",
    "fact3_case_b",
)

TARGETS = {
    "prop1": Fraction(0),
    "fact1_mu0": Fraction(3, 10000),
    "fact1_muxi": Fraction(1, 100),
    "fact2a_plus": Fraction(48, 100),
    "fact2a_minus": Fraction(55, 100),
    "fact2b_plus": Fraction(51, 100),
    "fact2b_minus": Fraction(48, 100),
    "fact3_mu0": Fraction(23, 100),
    "fact3_case_a": Fraction(22, 100),
    "fact3_case_b": Fraction(22, 100),
}


@dataclass
class Inequality:
    """``poly >= target`` on every box in ``boxes``."""

    name: str
    expr: Expr
    poly: MultiPoly
    boxes: tuple[Box, ...]
    target: Fraction
    beta: object

    def evaluate(self, a, b) -> SurdNumber:
        return self.poly.evaluate((a, b))


def _lo(x) -> Fraction:
    if isinstance(x, SurdNumber) and not x.is_rational:
        return enclose_surd(x, Fraction(1, 2**BOX_BITS)).lo
    return as_fraction(x.rat if isinstance(x, SurdNumber) else x)


def _hi(x) -> Fraction:
    if isinstance(x, SurdNumber) and not x.is_rational:
        return enclose_surd(x, Fraction(1, 2**BOX_BITS)).hi
    return as_fraction(x.rat if isinstance(x, SurdNumber) else x)


def _iv(lo, hi) -> RationalInterval:
    """Rational interval containing ``[lo, hi]`` (endpoints rounded outward)."""
    return RationalInterval(_lo(lo), _hi(hi))


def _beta(beta) -> SurdNumber:
    beta = SurdNumber.lift(beta)
    if not (0 < beta < Fraction(1, 2)):
        raise ValueError("beta must lie in (0, 1/2)")
    return beta


def prop1_expr(beta=BETA2, mu=0) -> Expr:
    """``q(a)q(b) - (1-2beta)(a q(a) + b q(b)) q(eta(ab + mu))``."""
    a, b = Var("a"), Var("b")
    k = 1 - 2 * beta
    return q(a) * q(b) - k * (a * q(a) + b * q(b)) * q(eta(beta, a * b + mu))


def parity_expr(beta, sign_a: int, mu) -> Expr:
    """``q(a)q(b) - (s(2a-1)q(a) + (2b-1)q(b))(1-2beta) q(eta(ab+(1-a)(1-b)+mu))``."""
    a, b = Var("a"), Var("b")
    k = 1 - 2 * beta
    lead = (2 * a - 1) if sign_a > 0 else (1 - 2 * a)
    inner = a * b + (1 - a) * (1 - b) + mu
    return q(a) * q(b) - k * (lead * q(a) + (2 * b - 1) * q(b)) * q(eta(beta, inner))


def fact3_expr(beta, mu) -> Expr:
    """``q(a) - (1-2beta) b q(eta(ab + mu))``."""
    a, b = Var("a"), Var("b")
    return q(a) - (1 - 2 * beta) * b * q(eta(beta, a * b + mu))


def build_inequality(name: str, beta=BETA2) -> Inequality:
    """Polynomial, boxes and target for one named inequality.

    ``beta`` replaces the threshold everywhere it enters (noise, box
    edges and the mu endpoints); ``x0`` and ``q`` stay fixed.
    """
    if name not in TARGETS:
        raise KeyError(f"unknown inequality {name!r}; expected one of {', '.join(INEQUALITY_NAMES)}")
    beta = _beta(beta)
    a, b = Var("a"), Var("b")
    top = 1 - beta
    full = _iv(beta, top)
    half = Fraction(1, 2)
    lower_half = Box(VARIABLES, (_iv(beta, half), full))
    upper_half = Box(VARIABLES, (_iv(half, top), full))
    fact1_boxes = (
        Box(VARIABLES, (_iv(beta, X0 - TAYLOR_RADIUS), full)),
        Box(VARIABLES, (_iv(X0 + TAYLOR_RADIUS, top), full)),
    )
    if name == "prop1":
        expr, boxes = prop1_expr(beta), (Box(VARIABLES, (full, full)),)
    elif name == "fact1_mu0":
        expr, boxes = prop1_expr(beta), fact1_boxes
    elif name == "fact1_muxi":
        expr, boxes = prop1_expr(beta, (top - a) * (top - b)), fact1_boxes
    elif name.startswith("fact2a"):
        xi = 2 * (top - a) * (top - b)
        expr = parity_expr(beta, 1, xi if name.endswith("plus") else -xi)
        boxes = (upper_half,)
    elif name.startswith("fact2b"):
        xi = 2 * (a - beta) * (top - b)
        expr = parity_expr(beta, -1, xi if name.endswith("plus") else -xi)
        boxes = (lower_half,)
    elif name == "fact3_mu0":
        expr, boxes = fact3_expr(beta, 0), (Box(VARIABLES, (full, full)),)
    elif name == "fact3_case_a":
        expr, boxes = fact3_expr(beta, -(a - beta) * (top - b)), (lower_half,)
    else:
        expr, boxes = fact3_expr(beta, -(top - a) * (top - b)), (upper_half,)
    return Inequality(name, expr, expr.to_poly(VARIABLES), boxes, TARGETS[name], beta)
