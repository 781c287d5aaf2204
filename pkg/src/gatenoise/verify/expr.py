"""Structured expressions over q and eta.

An :class:`Expr` can be expanded into a :class:`MultiPoly`, evaluated
exactly in Q(sqrt7), or evaluated on a box.  Box evaluation keeps ``q``
factored so that each ``q(.)`` contributes its exact range.
"""

from __future__ import annotations

from fractions import Fraction

from ..numeric import RationalInterval, SurdNumber, to_interval
from ..potential import q_eval
from .poly import MultiPoly


class Expr:
    def __add__(self, other):
        return Sum((self, lift(other)))

    def __radd__(self, other):
        return Sum((lift(other), self))

    def __sub__(self, other):
        return Sum((self, Scaled(-1, lift(other))))

    def __rsub__(self, other):
        return Sum((lift(other), Scaled(-1, self)))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, SurdNumber)):
            return Scaled(SurdNumber.lift(other), self)
        return Prod((self, lift(other)))

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, SurdNumber)):
            return Scaled(SurdNumber.lift(other), self)
        return Prod((lift(other), self))

    def __neg__(self):
        return Scaled(-1, self)

    # subclasses implement these three
    def to_poly(self, variables) -> MultiPoly:
        raise NotImplementedError

    def exact(self, env: dict):
        raise NotImplementedError

    def interval(self, env: dict) -> RationalInterval:
        raise NotImplementedError


def lift(x) -> Expr:
    if isinstance(x, Expr):
        return x
    return Const(x)


class Var(Expr):
    def __init__(self, name: str):
        self.name = name

    def to_poly(self, variables):
        return MultiPoly.var(self.name, variables)

    def exact(self, env):
        return SurdNumber.lift(env[self.name])

    def interval(self, env):
        return env[self.name]

    def __repr__(self):
        return self.name


class Const(Expr):
    def __init__(self, value):
        self.value = SurdNumber.lift(value)
        self._iv = None

    def to_poly(self, variables):
        return MultiPoly.constant(variables, self.value)

    def exact(self, env):
        return self.value

    def interval(self, env):
        if self._iv is None:
            self._iv = to_interval(self.value)
        return self._iv

    def __repr__(self):
        return f"({self.value})"


class Scaled(Expr):
    def __init__(self, factor, arg: Expr):
        self.factor = SurdNumber.lift(factor)
        self.arg = arg
        self._iv = None

    def to_poly(self, variables):
        return self.arg.to_poly(variables) * self.factor

    def exact(self, env):
        return self.factor * self.arg.exact(env)

    def interval(self, env):
        if self._iv is None:
            self._iv = to_interval(self.factor)
        return self._iv * self.arg.interval(env)

    def __repr__(self):
        return f"{self.factor}*{self.arg!r}"


class Sum(Expr):
    def __init__(self, terms):
        self.terms = tuple(terms)

    def to_poly(self, variables):
        out = MultiPoly(variables)
        for t in self.terms:
            out = out + t.to_poly(variables)
        return out

    def exact(self, env):
        total = SurdNumber(0)
        for t in self.terms:
            total = total + t.exact(env)
        return total

    def interval(self, env):
        total = RationalInterval.point(0)
        for t in self.terms:
            total = total + t.interval(env)
        return total

    def __repr__(self):
        return "(" + " + ".join(map(repr, self.terms)) + ")"


class Prod(Expr):
    def __init__(self, factors):
        self.factors = tuple(factors)

    def to_poly(self, variables):
        out = MultiPoly.constant(variables, 1)
        for f in self.factors:
            out = out * f.to_poly(variables)
        return out

    def exact(self, env):
        total = SurdNumber(1)
        for f in self.factors:
            total = total * f.exact(env)
        return total

    def interval(self, env):
        total = RationalInterval.point(1)
        for f in self.factors:
            total = total * f.interval(env)
        return total

    def __repr__(self):
        return "*".join(map(repr, self.factors))


class Potential(Expr):
    """``q(arg)`` kept as a single node."""

    def __init__(self, arg: Expr):
        self.arg = arg

    def to_poly(self, variables):
        from ..potential import C0, C2, C4

        t = self.arg.to_poly(variables) - Fraction(1, 2)
        t2 = t * t
        return t2 * (t2 * C4 + C2) + C0

    def exact(self, env):
        return q_eval(self.arg.exact(env))

    def interval(self, env):
        return q_eval(self.arg.interval(env))

    def __repr__(self):
        return f"q({self.arg!r})"


def q(x) -> Expr:
    return Potential(lift(x))


def eta(epsilon, x) -> Expr:
    """``(1 - 2 epsilon) x + epsilon`` as an expression."""
    epsilon = SurdNumber.lift(epsilon)
    return (1 - 2 * epsilon) * lift(x) + epsilon
