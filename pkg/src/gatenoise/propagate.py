"""Two-world probability propagation through noisy formulas.

For a distinguished input ``x_i`` every wire carries the pair
``(P[wire=0 | x_i=0], P[wire=0 | x_i=1])``.  Subformulas of a tree are
independent, so each gate acts on the two worlds separately.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .formula import OR, XOR, Const, Formula, Gate, Input, Not, formula_depth, walk
from .numeric import BETA2, RationalInterval, SurdNumber, as_fraction
from .potential import Q_MAX, BiasPoint, q_eval

EXACT_DEPTH_LIMIT = 64


class PropagationError(ValueError):
    pass


@dataclass(frozen=True)
class WirePosterior:
    p0_world0: object
    p0_world1: object
    depth: int = 0

    @property
    def a(self):
        return (self.p0_world0 + self.p0_world1) * Fraction(1, 2)

    @property
    def delta(self):
        return self.p0_world0 - self.p0_world1

    @property
    def bias_point(self) -> BiasPoint:
        return BiasPoint(self.a, self.delta)

    @property
    def weighted_bias(self):
        return abs(self.delta) * q_eval(self.a)


@dataclass(frozen=True)
class WireRecord:
    node_id: int
    kind: str  # "distinguished", "input", "const", "not", "or", "parity"
    depth: int
    posterior: WirePosterior
    weighted_bias: object
    children: tuple[int, ...] = ()
    noise: object = None
    gate_ratio: object = None  # |delta_c| q(c) / max over children, binary gates only
    in_contraction_region: bool = False  # noise >= beta2 and both children within [beta2, 1-beta2]


@dataclass
class PropagationTrace:
    wires: list[WireRecord]
    distinguished: str | None
    mode: str = "exact"

    @property
    def output(self) -> WirePosterior:
        return self.wires[-1].posterior

    @property
    def output_bias(self):
        return abs(self.output.delta)

    def gates(self) -> list[WireRecord]:
        return [w for w in self.wires if w.kind in ("or", "parity")]

    def distinguished_depths(self) -> list[int]:
        return [w.depth for w in self.wires if w.kind == "distinguished"]

    def max_gate_ratio(self):
        ratios = [w.gate_ratio for w in self.gates() if w.gate_ratio is not None]
        if not ratios:
            return None
        if isinstance(ratios[0], RationalInterval):
            return max(r.hi for r in ratios)
        return max(ratios)


def _le(x, y) -> bool:
    """Sound ``x <= y`` where either side may be an enclosure."""
    if isinstance(x, RationalInterval):
        x = x.hi
    if isinstance(y, RationalInterval):
        y = y.lo
    return x <= y


def _within(p, lo, hi) -> bool:
    return _le(lo, p) and _le(p, hi)


def _gate_worlds(kind: str, eps, pa, pb, rounding):
    k = 1 - 2 * eps
    if kind == "or":
        out = [k * (x * y) + eps for x, y in zip(pa, pb)]
    else:
        out = [k * (x * y + (1 - x) * (1 - y)) + eps for x, y in zip(pa, pb)]
    return [rounding(v) for v in out]


def _kind(node: Gate) -> str:
    if node.op == OR:
        return "or"
    if node.op == XOR:
        return "parity"
    raise PropagationError(f"gate {node.op.name!r} is not in the basis; normalize the formula first")


def _resolve_mode(f: Formula, mode: str) -> str:
    if mode == "auto":
        return "exact" if formula_depth(f) <= EXACT_DEPTH_LIMIT else "interval"
    if mode not in ("exact", "interval"):
        raise ValueError(f"unknown mode {mode!r}")
    return mode


def propagate(
    f: Formula,
    distinguished: str | None,
    fixed: dict[str, int] | None = None,
    *,
    soft: dict[str, tuple] | None = None,
    mode: str = "exact",
    bits: int = 96,
) -> PropagationTrace:
    """Propagate the two worlds ``x_i = 0`` / ``x_i = 1`` leaf to root.

    ``fixed`` assigns every other input; ``soft`` gives explicit
    ``(P[leaf=0|x_i=0], P[leaf=0|x_i=1])`` pairs for leaves that depend on
    ``x_i`` through some external process.  ``mode="interval"`` replaces
    exact values by enclosures rounded outward to ``2**-bits``.
    """
    fixed = dict(fixed or {})
    soft = dict(soft or {})
    mode = _resolve_mode(f, mode)
    if mode == "interval":
        lift = RationalInterval.point
        rounding = lambda v: v.round_out(bits)  # noqa: E731
    else:
        lift = lambda v: v  # noqa: E731
        rounding = lift
    names = {n.name for _, n, _ in walk(f) if isinstance(n, Input)}
    if distinguished is not None and distinguished not in names and not soft:
        raise PropagationError(f"distinguished input {distinguished!r} does not occur in the formula")
    missing = sorted(names - set(fixed) - set(soft) - {distinguished})
    if missing:
        raise PropagationError(f"inputs not fixed: {', '.join(missing)}")

    wires: list[WireRecord] = []
    stack: list[int] = []
    for node_id, node, depth in walk(f):
        if isinstance(node, Input):
            if node.name == distinguished:
                kind, worlds = "distinguished", (Fraction(1), Fraction(0))
            elif node.name in soft:
                kind, worlds = "distinguished", tuple(_prob(v) for v in soft[node.name])
            else:
                v = fixed[node.name]
                if v not in (0, 1):
                    raise PropagationError(f"input {node.name} must be fixed to 0 or 1")
                kind, worlds = "input", (Fraction(1 - v),) * 2
            worlds = tuple(lift(w) for w in worlds)
            kids: tuple[int, ...] = ()
        elif isinstance(node, Const):
            kind, worlds, kids = "const", (lift(Fraction(1 - node.bit)),) * 2, ()
        elif isinstance(node, Not):
            child = stack.pop()
            c = wires[child].posterior
            kind, kids = "not", (child,)
            worlds = (1 - c.p0_world0, 1 - c.p0_world1)
        else:
            right, left = stack.pop(), stack.pop()
            kind, kids = _kind(node), (left, right)
            A, B = wires[left].posterior, wires[right].posterior
            worlds = tuple(
                _gate_worlds(kind, node.noise, (A.p0_world0, A.p0_world1), (B.p0_world0, B.p0_world1), rounding)
            )
        post = WirePosterior(worlds[0], worlds[1], depth)
        wb = post.weighted_bias
        ratio, applicable = None, False
        if isinstance(node, Gate):
            rhs = max(wires[kids[0]].weighted_bias, wires[kids[1]].weighted_bias, key=_upper)
            ratio = _ratio(wb, rhs)
            hi = 1 - BETA2
            applicable = node.noise >= BETA2 and all(
                _within(p, BETA2, hi)
                for k in kids
                for p in (wires[k].posterior.p0_world0, wires[k].posterior.p0_world1)
            )
        wires.append(
            WireRecord(
                node_id,
                kind,
                depth,
                post,
                wb,
                kids,
                node.noise if isinstance(node, Gate) else None,
                ratio,
                applicable,
            )
        )
        stack.append(node_id)
    return PropagationTrace(wires, distinguished, mode)


def _prob(v):
    if isinstance(v, (SurdNumber, RationalInterval)):
        return v
    return as_fraction(v)


def _upper(x):
    return x.hi if isinstance(x, RationalInterval) else x


def _ratio(lhs, rhs):
    if isinstance(rhs, RationalInterval) or isinstance(lhs, RationalInterval):
        lhs_i = lhs if isinstance(lhs, RationalInterval) else RationalInterval.point(lhs)
        rhs_i = rhs if isinstance(rhs, RationalInterval) else RationalInterval.point(rhs)
        if rhs_i.lo > 0:
            return lhs_i / rhs_i
        return None
    if rhs == 0:
        return Fraction(0)
    return lhs / rhs


def output_bias(f: Formula, distinguished: str, fixed: dict[str, int] | None = None, **kwargs):
    """Signed root bias ``P[out=0 | x_i=0] - P[out=0 | x_i=1]``."""
    return propagate(f, distinguished, fixed, **kwargs).output.delta


def p_zero(f: Formula, assignment: dict[str, int]):
    """Exact ``P[F(x) = 0]`` for a full assignment (any gate basis)."""
    stack: list = []
    for _, node, _ in walk(f):
        if isinstance(node, Input):
            stack.append(Fraction(1 - assignment[node.name]))
        elif isinstance(node, Const):
            stack.append(Fraction(1 - node.bit))
        elif isinstance(node, Not):
            stack.append(1 - stack.pop())
        else:
            pb, pa = stack.pop(), stack.pop()
            # P[op(l, r) = 0] before the output flip
            z = 0
            for l, pl in ((0, pa), (1, 1 - pa)):
                for r, pr in ((0, pb), (1, 1 - pb)):
                    if node.op(l, r) == 0:
                        z = z + pl * pr
            stack.append((1 - 2 * node.noise) * z + node.noise)
    return stack.pop()


# ---------------------------------------------------------------------------
# The depth-indexed invariant
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChainViolation:
    node_id: int
    depth: int
    weighted_bias: object
    bound: object


@dataclass
class ChainReport:
    D: int
    checked: int
    violations: list[ChainViolation] = field(default_factory=list)
    gate_violations: list[int] = field(default_factory=list)
    noise_ok: bool = True

    @property
    def holds(self) -> bool:
        return not self.violations and not self.gate_violations

    @property
    def first_violation(self) -> ChainViolation | None:
        return self.violations[0] if self.violations else None


def chain_bound(depth: int, D: int, Delta, theta):
    if not isinstance(Delta, SurdNumber):
        Delta = as_fraction(Delta)
    if not isinstance(theta, SurdNumber):
        theta = as_fraction(theta)
    return max(Delta / 2, theta ** (D - depth) * Q_MAX)


def check_invariant_chain(trace: PropagationTrace, epsilon_min, Delta, theta, D: int | None = None) -> ChainReport:
    """Check ``q(c)|delta_c| <= max(Delta/2, theta**(D-d) q_max)`` on wires of depth ``d <= D``.

    ``D`` defaults to one less than the shallowest distinguished leaf,
    the largest value for which the induction applies.  Binary gates whose
    hypotheses hold are also checked for ``ratio <= 1``.
    """
    if D is None:
        depths = trace.distinguished_depths()
        D = (min(depths) - 1) if depths else -1
    noise_ok = all(w.noise >= epsilon_min for w in trace.gates()) and epsilon_min >= BETA2
    report = ChainReport(D, 0, noise_ok=noise_ok)
    for w in trace.wires:
        if w.depth > D:
            continue
        report.checked += 1
        bound = chain_bound(w.depth, D, Delta, theta)
        if not _le(w.weighted_bias, bound):
            report.violations.append(ChainViolation(w.node_id, w.depth, w.weighted_bias, bound))
    for w in trace.gates():
        if w.in_contraction_region and w.gate_ratio is not None and not _le(w.gate_ratio, 1):
            report.gate_violations.append(w.node_id)
    return report


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------


def simulate_p_zero(f: Formula, assignment: dict[str, int], trials: int, seed: int = 0) -> float:
    """Frequency of output 0 under independent gate flips."""
    rng = np.random.default_rng(seed)
    stack: list[np.ndarray] = []
    for _, node, _ in walk(f):
        if isinstance(node, Input):
            stack.append(np.full(trials, assignment[node.name], dtype=np.uint8))
        elif isinstance(node, Const):
            stack.append(np.full(trials, node.bit, dtype=np.uint8))
        elif isinstance(node, Not):
            stack.append(1 - stack.pop())
        else:
            r, l = stack.pop(), stack.pop()
            table = np.array([node.op(a, b) for a in (0, 1) for b in (0, 1)], dtype=np.uint8)
            out = table[2 * l + r]
            flips = rng.random(trials) < float(node.noise)
            stack.append(out ^ flips.astype(np.uint8))
    return float(np.mean(stack.pop() == 0))
