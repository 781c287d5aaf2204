"""Numerical experiments around the noise threshold.

* bias decay through balanced trees of noisy OR / PARITY gates,
* the dependence bound ``c(Delta)``,
* the fixed point of the balanced-NAND map and its stability transition,
* consistency of concrete formulas with the depth-indexed invariant.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .formula import (
    Const,
    Formula,
    Gate,
    GateOp,
    Input,
    Not,
    build_balanced,
    dependent_bits,
    evaluate,
    normalize,
    walk,
    with_uniform_noise,
)
from .numeric import BETA2, SurdNumber, as_fraction
from .potential import Q_MAX, Q_MIN
from .propagate import check_invariant_chain, p_zero, propagate

LEAF_PATTERNS = ("all", "one", "mixed")
DISTINGUISHED = "x1"
OTHER = "y"


def _noise(eps):
    if isinstance(eps, SurdNumber):
        value = eps.rat if eps.is_rational else eps
    else:
        value = as_fraction(eps)
    if not (0 <= value <= Fraction(1, 2)):
        raise ValueError(f"noise {eps} outside [0, 1/2]")
    return value


# ---------------------------------------------------------------------------
# Threshold scan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanRow:
    epsilon: object
    depth: int
    delta_out: object
    weighted_bias_out: object
    max_gate_ratio: object


@dataclass
class ScanResult:
    gate_kind: str
    leaf_pattern: str
    rows: list[ScanRow] = field(default_factory=list)

    def series(self, epsilon) -> list[ScanRow]:
        return [r for r in self.rows if r.epsilon == epsilon]

    def decay_factor(self, epsilon) -> float | None:
        """Geometric-mean ratio of successive weighted biases at ``epsilon``."""
        s = [r for r in self.series(epsilon) if r.weighted_bias_out != 0]
        if len(s) < 2:
            return None
        first, last = s[0], s[-1]
        ratio = float(last.weighted_bias_out) / float(first.weighted_bias_out)
        return ratio ** (1 / (last.depth - first.depth))


def scan_leaves(gate_kind: str, leaf_pattern: str) -> tuple[list, dict]:
    """Leaf sequence and fixed inputs for a balanced scan tree.

    ``all`` puts the distinguished input on every leaf, ``one`` on the
    first leaf only (the rest carry an input fixed to 0), ``mixed``
    alternates the two.
    """
    if leaf_pattern == "all":
        return [DISTINGUISHED], {}
    if leaf_pattern == "one":
        return None, {OTHER: 0}
    if leaf_pattern == "mixed":
        return [DISTINGUISHED, OTHER], {OTHER: 0}
    raise ValueError(f"unknown leaf pattern {leaf_pattern!r}; expected one of {', '.join(LEAF_PATTERNS)}")


def default_leaf_pattern(gate_kind: str) -> str:
    # parity of identical copies cancels the bias, so use a single copy there
    return "one" if gate_kind in ("parity", "xor") else "all"


def _scan_formula(gate_kind: str, eps, depth: int, leaf_pattern: str) -> tuple[Formula, dict]:
    leaves, fixed = scan_leaves(gate_kind, leaf_pattern)
    if leaves is None:
        leaves = [DISTINGUISHED] + [OTHER] * (2**depth - 1)
    f = build_balanced(GateOp.named(gate_kind), eps, depth, leaves)
    return f, fixed


def threshold_scan(gate_kind: str, epsilons, depths, leaf_pattern: str | None = None, mode: str = "exact") -> ScanResult:
    """Output bias of balanced noisy trees over a grid of noise levels and depths.

    Rows come out in ``epsilons``-major order.  ``max_gate_ratio`` is the
    largest ``|delta_c| q(c) / max(|delta_a| q(a), |delta_b| q(b))`` over
    the gates of the tree (``None`` at depth 0).
    """
    if gate_kind not in ("or", "parity", "xor"):
        raise ValueError("gate_kind must be 'or' or 'parity'")
    gate_kind = "xor" if gate_kind == "parity" else gate_kind
    leaf_pattern = leaf_pattern or default_leaf_pattern(gate_kind)
    scan_leaves(gate_kind, leaf_pattern)
    epsilons = [_noise(e) for e in epsilons]
    result = ScanResult("parity" if gate_kind == "xor" else gate_kind, leaf_pattern)
    for eps in epsilons:
        for depth in depths:
            if depth < 0:
                raise ValueError("depths must be non-negative")
            f, fixed = _scan_formula(gate_kind, eps, depth, leaf_pattern)
            trace = propagate(f, DISTINGUISHED, fixed, mode=mode)
            out = trace.output
            result.rows.append(
                ScanRow(eps, depth, abs(out.delta), trace.wires[-1].weighted_bias, trace.max_gate_ratio())
            )
    return result


# ---------------------------------------------------------------------------
# Dependence bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DependenceBound:
    Delta: object
    theta: object  # after clamping to at least 1 - 2 beta2
    c_of_Delta: float
    clamped: bool = False


def dependence_bound(Delta, theta) -> DependenceBound:
    """``c(Delta) = 2 (Delta q_min / q_max) ** (1 / log2 theta)``.

    ``theta`` below ``1 - 2 beta2`` is raised to that value; ``theta`` must
    lie in ``(0, 1)``.
    """
    Delta = Delta if isinstance(Delta, SurdNumber) else as_fraction(Delta)
    theta = theta if isinstance(theta, SurdNumber) else as_fraction(theta)
    if not Delta > 0:
        raise ValueError("Delta must be positive")
    if not (0 < theta < 1):
        raise ValueError("theta must lie in (0, 1)")
    floor = 1 - 2 * BETA2
    clamped = theta < floor
    if clamped:
        theta = floor
    base = Delta * Q_MIN / Q_MAX
    if base == 1:
        return DependenceBound(Delta, theta, 2.0, clamped)
    exponent = 1 / math.log2(float(theta))
    return DependenceBound(Delta, theta, 2 * float(base) ** exponent, clamped)


# ---------------------------------------------------------------------------
# Balanced NAND map
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NandFixedPoint:
    """Attractor of ``m(x) = (1-eps)(1-x^2) + eps x^2``, with ``x = P[wire = 1]``.

    ``derivative`` is ``|m'(x*)|`` at the fixed point.  When that exceeds 1
    the attractor is the 2-cycle ``cycle`` with multiplier
    ``cycle_derivative = |(m o m)'|``: the output keeps a signal.
    """

    epsilon: object
    fixed_point: float
    derivative: float
    stable: bool
    cycle: tuple[float, float] | None = None
    cycle_derivative: float | None = None


def nand_map(epsilon, x):
    return (1 - epsilon) * (1 - x * x) + epsilon * x * x


def _stability_gap(epsilon: Fraction) -> Fraction:
    """``4 (1-eps)(1-2eps) - 3``: positive iff the fixed point is unstable."""
    return 4 * (1 - epsilon) * (1 - 2 * epsilon) - 3


def nand_fixed_point(epsilon) -> NandFixedPoint:
    eps = _noise(epsilon)
    e = float(eps)
    A, B = 1 - e, 1 - 2 * e  # m(x) = A - B x^2
    if B == 0:
        return NandFixedPoint(eps, 0.5, 0.0, True)
    x = (-1 + math.sqrt(1 + 4 * A * B)) / (2 * B)
    deriv = 2 * B * x
    gap = _stability_gap(eps)
    if gap > 0:
        root = math.sqrt(4 * A * B - 3)
        cycle = ((1 - root) / (2 * B), (1 + root) / (2 * B))
        return NandFixedPoint(eps, x, deriv, False, cycle, abs(4 * (1 - A * B)))
    return NandFixedPoint(eps, x, deriv, True)


def iterate_nand(epsilon, x: float, steps: int) -> list[float]:
    e = float(epsilon)
    out = [x]
    for _ in range(steps):
        x = nand_map(e, x)
        out.append(x)
    return out


@dataclass(frozen=True)
class NandTransition:
    lo: Fraction  # fixed point unstable here
    hi: Fraction  # fixed point stable here
    steps: int

    @property
    def estimate(self) -> Fraction:
        return (self.lo + self.hi) / 2


def nand_critical_noise(tolerance=Fraction(1, 10**9)) -> NandTransition:
    """Bisect ``[0, 1/2]`` for the noise where the NAND fixed point turns stable.

    The bracket signs are decided exactly in rational arithmetic.
    """
    tolerance = as_fraction(tolerance)
    lo, hi = Fraction(0), Fraction(1, 2)
    if not (_stability_gap(lo) > 0 >= _stability_gap(hi)):
        raise ArithmeticError("stability test does not bracket a transition")
    steps = 0
    while hi - lo > tolerance:
        mid = (lo + hi) / 2
        if _stability_gap(mid) > 0:
            lo = mid
        else:
            hi = mid
        steps += 1
    return NandTransition(lo, hi, steps)


# ---------------------------------------------------------------------------
# Formulas against the depth-indexed invariant
# ---------------------------------------------------------------------------


def input_depths(f: Formula) -> dict[str, int]:
    """Smallest depth of any wire carrying each input."""
    out: dict[str, int] = {}
    for _, node, depth in walk(f):
        if isinstance(node, Input):
            out[node.name] = min(out.get(node.name, depth), depth)
    return out


def computed_bias(f: Formula, table, names):
    """``min P[F(x)=0] over f(x)=0`` minus ``max P[F(y)=0] over f(y)=1``."""
    zeros, ones = [], []
    for idx, v in enumerate(table):
        assignment = {n: (idx >> i) & 1 for i, n in enumerate(names)}
        (ones if v else zeros).append(p_zero(f, assignment))
    if not zeros or not ones:
        return None
    return min(zeros) - max(ones)


@dataclass
class CandidateResult:
    formula: Formula
    bias: object  # achieved bias, None if f is constant
    computes: bool  # bias >= Delta_target (and > 0)
    distinguished: str | None = None
    distinguished_depth: int | None = None
    depth_property: bool = True
    theta: object = None
    fixings: int = 0
    chain_holds: bool = True
    gate_ratio_ok: bool = True
    prediction_holds: bool = True
    c_of_Delta: float | None = None
    note: str = ""

    @property
    def contradicts(self) -> bool:
        if not self.computes:
            return False
        return not (self.depth_property and self.chain_holds and self.gate_ratio_ok and self.prediction_holds)


@dataclass
class TheoremCheckReport:
    n: int
    d: int
    D: int
    epsilon: object
    candidates: list[CandidateResult] = field(default_factory=list)

    @property
    def violations(self) -> list[CandidateResult]:
        return [c for c in self.candidates if c.contradicts]

    @property
    def vacuous(self) -> bool:
        return self.d <= 1


def _clog2(d: int) -> int:
    return (d - 1).bit_length() if d > 0 else 0


def theorem_bound_check(truth_table, Delta_target=None, epsilon=BETA2, candidates=()) -> TheoremCheckReport:
    """Check candidate formulas for ``f`` against the depth argument.

    Each candidate is given gate noise ``epsilon``, normalized, and its
    achieved bias is computed exactly.  For candidates that compute ``f``
    (with at least ``Delta_target`` if given) the report checks that an
    input ``x_i`` of ``f`` has all its wires at depth ``>= ceil(log2 d(f))``,
    propagates the two worlds of ``x_i`` under every fixing of the other
    inputs that makes ``f`` flip with ``x_i``, and tests the invariant
    chain with the observed per-gate decay ``theta`` (at least
    ``1 - 2 beta2``).  The output bound ``q(o)|delta_o| <= max(Delta/2,
    theta^D q_max)`` and ``d(f) <= c(Delta)`` are checked last.
    """
    table = [int(bool(v)) for v in truth_table]
    n = len(table).bit_length() - 1
    if len(table) != 2**n:
        raise ValueError("truth table length must be a power of two")
    if n > 10:
        raise ValueError("at most 10 inputs are supported")
    eps = _noise(epsilon)
    if eps < BETA2:
        raise ValueError("epsilon must be at least beta2")
    deps = dependent_bits(table)
    d = len(deps)
    need = _clog2(d)
    report = TheoremCheckReport(n, d, need - 1, eps)
    names = [f"x{i}" for i in range(1, n + 1)]
    for cand in candidates:
        f = normalize(with_uniform_noise(cand, eps))
        unknown = set(input_depths(f)) - set(names)
        if unknown:
            raise ValueError(f"candidate uses inputs outside x1..x{n}: {sorted(unknown)}")
        bias = computed_bias(f, table, names)
        target = as_fraction(Delta_target) if Delta_target is not None else None
        computes = bias is not None and bias > 0 and (target is None or bias >= target)
        res = CandidateResult(f, bias, computes)
        report.candidates.append(res)
        if not computes or d <= 1:
            res.note = "vacuous" if computes else "does not compute f"
            continue
        _check_candidate(res, f, table, names, deps, need, target if target is not None else bias)
    return report


def _check_candidate(res: CandidateResult, f, table, names, deps, need, Delta):
    depths = input_depths(f)
    # inputs that never occur are at "infinite" depth
    best = max(sorted(deps), key=lambda i: depths.get(f"x{i}", 10**9))
    best_depth = depths.get(f"x{best}")
    res.distinguished = f"x{best}"
    res.distinguished_depth = best_depth
    res.depth_property = best_depth is None or best_depth >= need
    if best_depth is None:
        res.note = "distinguished input absent"
        return
    D = need - 1
    bit = 1 << (best - 1)
    traces = []
    for idx in range(len(table)):
        if idx & bit or table[idx] == table[idx | bit]:
            continue
        fixed = {n: (idx >> i) & 1 for i, n in enumerate(names) if i != best - 1}
        traces.append(propagate(f, res.distinguished, fixed))
    res.fixings = len(traces)
    theta = 1 - 2 * BETA2
    for t in traces:
        for w in t.gates():
            if w.depth < D and w.gate_ratio is not None and w.gate_ratio > theta:
                theta = w.gate_ratio
    res.theta = theta
    for t in traces:
        chain = check_invariant_chain(t, BETA2, Delta, theta, D)
        res.chain_holds &= not chain.violations
        res.gate_ratio_ok &= not chain.gate_violations
        out = t.wires[-1]
        bound = max(Delta / 2, theta**D * Q_MAX) if D >= 0 else None
        if bound is not None and out.weighted_bias > bound:
            res.prediction_holds = False
    if theta < 1:
        res.c_of_Delta = dependence_bound(Delta, theta).c_of_Delta
        if len(deps) > res.c_of_Delta:
            res.prediction_holds = False


# ---------------------------------------------------------------------------
# Candidate generation
# ---------------------------------------------------------------------------


def random_formula(rng: random.Random, n_inputs: int, max_depth: int, ops=None, const_prob: float = 0.05) -> Formula:
    """Random formula over ``x1..xn`` with 2-input gates from ``ops`` (all 16 by default)."""
    from .formula import ALL_GATE_OPS

    ops = list(ops or ALL_GATE_OPS)

    def build(depth: int) -> Formula:
        if depth == 0 or rng.random() < 0.15:
            if rng.random() < const_prob:
                return Const(rng.randint(0, 1))
            leaf = Input(f"x{rng.randint(1, n_inputs)}")
            return Not(leaf) if rng.random() < 0.2 else leaf
        node = Gate(rng.choice(ops), 0, build(depth - 1), build(depth - 1))
        return Not(node) if rng.random() < 0.1 else node

    return build(max_depth)


def noiseless_table(f: Formula, n_inputs: int) -> list[int]:
    names = [f"x{i}" for i in range(1, n_inputs + 1)]
    return [evaluate(f, {n: (idx >> i) & 1 for i, n in enumerate(names)}) for idx in range(2**n_inputs)]
