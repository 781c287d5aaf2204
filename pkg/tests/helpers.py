"""Independent oracles shared by the tests."""

from __future__ import annotations

from fractions import Fraction
from itertools import product

import numpy as np

from gatenoise.formula import Gate, evaluate, walk


def enumerate_p_zero(f, assignment):
    """``P[F = 0]`` by summing over every pattern of gate failures."""
    gates = [(i, n.noise) for i, n, _ in walk(f) if isinstance(n, Gate)]
    total = Fraction(0)
    for pattern in product((0, 1), repeat=len(gates)):
        weight = 1
        for (_, eps), flip in zip(gates, pattern):
            weight = weight * (eps if flip else 1 - eps)
        flips = {i: flip for (i, _), flip in zip(gates, pattern)}
        if evaluate(f, assignment, flips) == 0:
            total = total + weight
    return total


def float_poly(poly):
    """Vectorised float evaluator for a MultiPoly."""
    terms = [(np.array(e), float(c)) for e, c in poly.terms.items()]

    def run(*xs):
        xs = [np.asarray(x, dtype=float) for x in xs]
        out = np.zeros_like(xs[0])
        for e, c in terms:
            t = np.full_like(xs[0], c)
            for x, k in zip(xs, e):
                if k:
                    t = t * x**k
            out = out + t
        return out

    return run


def q_float(x):
    t2 = (np.asarray(x, dtype=float) - 0.5) ** 2
    c4 = 29 / 2 + 2 * 7**0.5
    c2 = 5 * 7**0.5 / 2 - 13 / 4
    c0 = 73 / 32 - 7**0.5 / 2
    return c4 * t2 * t2 + c2 * t2 + c0
