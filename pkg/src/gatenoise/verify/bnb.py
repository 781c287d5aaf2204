"""Rigorous lower bounds for polynomials on boxes by branch and bound.

Each box keeps its polynomial re-expanded in normalized coordinates
``t in [-1, 1]^n`` as integer coefficients over a common denominator, so a
bisection is an integer Taylor shift by +-1.  The Taylor-form lower bound
``G_0 - sum |G_a|`` (dropping even monomials with positive coefficient) is
combined with the natural interval extension of a structured expression.
Everything is exact rational arithmetic; surd coefficients enter through
enclosures whose total error is bounded once per run.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..numeric import RationalInterval, SurdNumber, as_fraction, enclose_surd
from .poly import MultiPoly

CERTIFIED = "certified"
FAILED = "failed"
BUDGET_EXHAUSTED = "budget_exhausted"

DEFAULT_BUDGET = 2_000_000
DEFAULT_MIN_WIDTH = Fraction(1, 2**30)
COEFF_BITS = 160
LOCALIZE_STEPS = 40


@dataclass(frozen=True)
class Box:
    variables: tuple[str, ...]
    intervals: tuple[RationalInterval, ...]

    @classmethod
    def of(cls, **ranges) -> "Box":
        names = tuple(ranges)
        ivs = []
        for r in ranges.values():
            ivs.append(r if isinstance(r, RationalInterval) else RationalInterval(*r))
        return cls(names, tuple(ivs))

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def env(self) -> dict[str, RationalInterval]:
        return dict(zip(self.variables, self.intervals))

    def center(self) -> tuple[Fraction, ...]:
        return tuple(iv.midpoint() for iv in self.intervals)

    def width(self) -> Fraction:
        return max(iv.width for iv in self.intervals)

    def widest(self) -> int:
        widths = [iv.width for iv in self.intervals]
        return widths.index(max(widths))

    def bisect(self, i: int) -> tuple["Box", "Box"]:
        lo, hi = self.intervals[i].split()
        left = self.intervals[:i] + (lo,) + self.intervals[i + 1 :]
        right = self.intervals[:i] + (hi,) + self.intervals[i + 1 :]
        return Box(self.variables, left), Box(self.variables, right)

    def volume(self) -> Fraction:
        v = Fraction(1)
        for iv in self.intervals:
            v *= iv.width
        return v

    def contains(self, other) -> bool:
        if isinstance(other, Box):
            return all(a.contains(b) for a, b in zip(self.intervals, other.intervals))
        return all(iv.contains(x) for iv, x in zip(self.intervals, other))

    def __str__(self):
        return " x ".join(f"{v}∈{iv}" for v, iv in zip(self.variables, self.intervals))


@dataclass
class BoundCertificate:
    """Outcome of :func:`certify_lower_bound` on one box.

    ``certified`` means every leaf of the recorded subdivision has an
    interval lower bound of at least ``target``; ``margin`` is the smallest
    such leaf bound minus the target.
    """

    name: str
    box: Box
    target: Fraction
    status: str
    boxes_processed: int
    margin: Fraction | None = None
    witness: Box | None = None
    witness_point: tuple | None = None
    witness_value: SurdNumber | None = None
    leaves: tuple[Box, ...] = ()
    note: str = ""

    @property
    def certified(self) -> bool:
        return self.status == CERTIFIED


# ---------------------------------------------------------------------------
# Normalized integer Taylor form
# ---------------------------------------------------------------------------


class _Shape:
    """Dense exponent layout for a polynomial with per-variable degrees."""

    def __init__(self, degrees: Sequence[int]):
        self.degrees = tuple(degrees)
        self.strides = []
        s = 1
        for d in reversed(self.degrees):
            self.strides.append(s)
            s *= d + 1
        self.strides.reverse()
        self.size = s
        self.exponents = [self.unflatten(i) for i in range(s)]
        self.all_even = [all(k % 2 == 0 for k in e) for e in self.exponents]

    def flatten(self, exp) -> int:
        return sum(k * s for k, s in zip(exp, self.strides))

    def unflatten(self, idx: int) -> tuple[int, ...]:
        out = []
        for s in self.strides:
            out.append(idx // s)
            idx %= s
        return tuple(out)


@dataclass
class _Node:
    box: Box
    coeffs: list[int]
    denom: int


class TaylorBounder:
    """Lower/upper bounds of a polynomial on sub-boxes of a root box."""

    def __init__(self, poly: MultiPoly, root: Box):
        if poly.variables != root.variables:
            poly = poly.reorder(root.variables)
        self.poly = poly
        self.root = root
        degrees = [poly.degree_in(v) for v in poly.variables] or []
        self.shape = _Shape(degrees)
        mid_terms, err = {}, Fraction(0)
        bounds = [max(abs(iv.lo), abs(iv.hi)) for iv in root]
        for exp, c in poly.terms.items():
            if c.is_rational:
                mid_terms[exp] = c.rat
                continue
            iv = enclose_surd(c, Fraction(1, 2**COEFF_BITS))
            mid_terms[exp] = iv.midpoint()
            mag = Fraction(1)
            for b, k in zip(bounds, exp):
                mag *= b**k
            err += iv.width / 2 * mag
        self.error = err  # |poly - poly_mid| <= error on the root box
        self.mid_poly = MultiPoly(poly.variables, mid_terms)

    def root_node(self) -> _Node:
        return self.node_for(self.root)

    def node_for(self, box: Box) -> _Node:
        """Expand around the centre of ``box`` from scratch (rational arithmetic)."""
        names = self.poly.variables
        tvars = tuple(f"_t{i}" for i in range(len(names)))
        mapping = {}
        for i, (v, iv) in enumerate(zip(names, box)):
            t = MultiPoly.var(tvars[i], tvars)
            mapping[v] = t * ((iv.hi - iv.lo) / 2) + iv.midpoint()
        local = self.mid_poly.substitute(mapping, tvars)
        fracs = {e: c.rat for e, c in local.terms.items()}
        denom = 1
        for c in fracs.values():
            denom = denom * c.denominator // math.gcd(denom, c.denominator)
        coeffs = [0] * self.shape.size
        for e, c in fracs.items():
            coeffs[self.shape.flatten(e)] = c.numerator * (denom // c.denominator)
        return _Node(box, coeffs, denom)

    def split(self, node: _Node, var: int) -> tuple[_Node, _Node]:
        lo_box, hi_box = node.box.bisect(var)
        return self._half(node, var, -1, lo_box), self._half(node, var, 1, hi_box)

    def _half(self, node: _Node, var: int, side: int, box: Box) -> _Node:
        shape = self.shape
        d = shape.degrees[var]
        stride = shape.strides[var]
        coeffs = list(node.coeffs)
        # t_var = (side + t') / 2; multiply through by 2**d
        for idx in range(shape.size):
            c = coeffs[idx]
            if c:
                k = (idx // stride) % (d + 1)
                coeffs[idx] = c << (d - k)
        # Taylor shift by `side` along `var` for every slice
        block = stride * (d + 1)
        for base in range(0, shape.size, block):
            for off in range(stride):
                start = base + off
                sl = [coeffs[start + j * stride] for j in range(d + 1)]
                if not any(sl):
                    continue
                if side > 0:
                    for i in range(d):
                        for j in range(d - 1, i - 1, -1):
                            sl[j] += sl[j + 1]
                else:
                    for i in range(d):
                        for j in range(d - 1, i - 1, -1):
                            sl[j] -= sl[j + 1]
                for j in range(d + 1):
                    coeffs[start + j * stride] = sl[j]
        denom = node.denom << d
        g = denom
        for c in coeffs:
            if c:
                g = math.gcd(g, c)
                if g == 1:
                    break
        if g > 1:
            coeffs = [c // g for c in coeffs]
            denom //= g
        return _Node(box, coeffs, denom)

    def lower_numerator(self, node: _Node) -> int:
        coeffs, even = node.coeffs, self.shape.all_even
        total = coeffs[0]
        for i in range(1, len(coeffs)):
            c = coeffs[i]
            if c < 0:
                total += c
            elif c > 0 and not even[i]:
                total -= c
        return total

    def upper_numerator(self, node: _Node) -> int:
        coeffs, even = node.coeffs, self.shape.all_even
        total = coeffs[0]
        for i in range(1, len(coeffs)):
            c = coeffs[i]
            if c > 0:
                total += c
            elif c < 0 and not even[i]:
                total -= c
        return total

    def lower(self, node: _Node) -> Fraction:
        return Fraction(self.lower_numerator(node), node.denom) - self.error

    def upper(self, node: _Node) -> Fraction:
        return Fraction(self.upper_numerator(node), node.denom) + self.error

    def center_enclosure(self, node: _Node) -> RationalInterval:
        c = Fraction(node.coeffs[0], node.denom)
        return RationalInterval(c - self.error, c + self.error)


def taylor_lower_bound(poly: MultiPoly, box: Box) -> Fraction:
    """Taylor-form lower bound on ``box`` computed from scratch."""
    tb = TaylorBounder(poly, box)
    return tb.lower(tb.root_node())


# ---------------------------------------------------------------------------
# Branch and bound
# ---------------------------------------------------------------------------


def _natural(poly: MultiPoly, expr, box: Box) -> RationalInterval:
    if expr is not None:
        return expr.interval(box.env())
    return poly.interval(box)


def certify_lower_bound(
    p: MultiPoly,
    box: Box,
    target,
    budget: int = DEFAULT_BUDGET,
    min_width=DEFAULT_MIN_WIDTH,
    *,
    expr=None,
    name: str = "",
    record_leaves: bool = True,
) -> BoundCertificate:
    """Prove ``p >= target`` on ``box`` or find a point where it fails.

    Depth-first bisection of the widest variable.  A box is a certified
    leaf when either the Taylor form or the natural interval extension
    (of ``expr`` if given, otherwise of ``p`` term by term) has lower
    endpoint ``>= target``.  A box whose centre violates the bound ends
    the search with an exact counterexample; a violating box narrower than
    ``min_width`` ends it as unresolved.  ``budget`` caps the number of
    boxes examined.
    """
    target = as_fraction(target)
    min_width = as_fraction(min_width)
    if budget < 1:
        raise ValueError("budget must be at least 1")
    if min_width <= 0:
        raise ValueError("min_width must be positive")
    tb = TaylorBounder(p, box)
    need = target + tb.error  # lower_numerator / denom must reach this
    stack = [tb.root_node()]
    processed = 0
    leaves: list[Box] = []
    min_lower: Fraction | None = None
    while stack:
        if processed >= budget:
            return BoundCertificate(
                name, box, target, BUDGET_EXHAUSTED, processed, None, witness=stack[-1].box,
                note="budget exhausted before the subdivision closed",
            )
        node = stack.pop()
        processed += 1
        num = tb.lower_numerator(node)
        if num * need.denominator >= need.numerator * node.denom:
            lower = Fraction(num, node.denom) - tb.error
        else:
            nat = _natural(p, expr, node.box)
            lower = nat.lo if nat.lo >= target else None
        if lower is not None:
            if record_leaves:
                leaves.append(node.box)
            min_lower = lower if min_lower is None else min(min_lower, lower)
            continue
        point, value = _center_violation(p, tb, node, target)
        if point is not None:
            wbox, point, value = _localize(p, tb, node, target, min_width, point, value)
            return BoundCertificate(
                name, box, target, FAILED, processed, None, wbox, point, value,
                note="counterexample: value below target at witness point",
            )
        if node.box.width() < min_width:
            point, value = _corner_violation(p, node.box, target)
            if point is not None:
                return BoundCertificate(
                    name, box, target, FAILED, processed, None, node.box, point, value,
                    note="counterexample: value below target at witness point",
                )
            return BoundCertificate(
                name, box, target, FAILED, processed, None, node.box,
                note="unresolved: box narrower than min_width still not certified",
            )
        lo, hi = tb.split(node, node.box.widest())
        stack.append(hi)
        stack.append(lo)
    margin = (min_lower - target) if min_lower is not None else None
    return BoundCertificate(name, box, target, CERTIFIED, processed, margin, leaves=tuple(leaves))


def _center_violation(p, tb: TaylorBounder, node: _Node, target):
    enc = tb.center_enclosure(node)
    if enc.lo >= target:
        return None, None
    point = node.box.center()
    value = p.evaluate(point)
    if value < target:
        return point, value
    return None, None


def _corner_violation(p, box: Box, target):
    for corner in itertools.product(*((iv.lo, iv.hi) for iv in box)):
        value = p.evaluate(corner)
        if value < target:
            return corner, value
    return None, None


def _localize(p, tb, node, target, min_width, point, value):
    """Shrink a violating box towards the smallest lower bound."""
    best = (node.box, point, value)
    for _ in range(LOCALIZE_STEPS):
        if node.box.width() < min_width:
            break
        candidates = []
        for child in tb.split(node, node.box.widest()):
            pt, val = _center_violation(p, tb, child, target)
            if pt is not None:
                candidates.append((tb.lower(child), val, child, pt))
        if not candidates:
            break
        candidates.sort(key=lambda c: (c[0], c[1]))
        _, val, node, pt = candidates[0]
        best = (node.box, pt, val)
    return best


# ---------------------------------------------------------------------------
# Certified minimum (used to report the best provable bound)
# ---------------------------------------------------------------------------


@dataclass
class MinimumEnclosure:
    lower: Fraction  # certified: p >= lower on the box
    upper: SurdNumber  # attained: p(point) == upper
    point: tuple
    boxes_processed: int


def certified_minimum(p: MultiPoly, box: Box, tolerance=Fraction(1, 10**4), budget: int = DEFAULT_BUDGET, *, expr=None) -> MinimumEnclosure:
    """Enclose ``min p`` over ``box`` to within ``tolerance`` (best-first search)."""

    tolerance = as_fraction(tolerance)
    tb = TaylorBounder(p, box)
    root = tb.root_node()
    best_point = box.center()
    best = p.evaluate(best_point)
    heap = [(tb.lower(root), 0, root)]
    counter = 1
    processed = 0
    while heap and processed < budget:
        lower, _, node = heapq.heappop(heap)
        if not lower < best - tolerance:
            heapq.heappush(heap, (lower, 0, node))
            break
        processed += 1
        for child in tb.split(node, node.box.widest()):
            pt = child.box.center()
            enc = tb.center_enclosure(child)
            if enc.lo < best:
                val = p.evaluate(pt)
                if val < best:
                    best, best_point = val, pt
            lo_t = tb.lower(child)
            nat = _natural(p, expr, child.box).lo
            heapq.heappush(heap, (max(lo_t, nat), counter, child))
            counter += 1
    lower = min(heap[0][0], _floor_surd(best))
    return MinimumEnclosure(lower, best, best_point, processed)


def _floor_surd(x: SurdNumber) -> Fraction:
    return enclose_surd(x, Fraction(1, 2**64)).lo


def recheck(cert: BoundCertificate, p: MultiPoly, *, expr=None, every: int = 1) -> bool:
    """Re-validate a certified result from its recorded leaves.

    Checks that the leaves lie in the root box and their volumes add up to
    it (they come from bisection, so they are disjoint up to faces), then
    recomputes a lower bound on every ``every``-th leaf from scratch.
    """
    if not cert.certified or not cert.leaves:
        return False
    if any(not cert.box.contains(leaf) for leaf in cert.leaves):
        return False
    if sum(leaf.volume() for leaf in cert.leaves) != cert.box.volume():
        return False
    for leaf in cert.leaves[::every]:
        lower = taylor_lower_bound(p, leaf)
        if lower < cert.target:
            lower = max(lower, _natural(p, expr, leaf).lo)
        if lower < cert.target:
            return False
    return True
