"""Potential function q, the noise map eta and the per-gate decay check."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .numeric import BETA2, RationalInterval, SurdNumber, as_fraction

HALF = Fraction(1, 2)

# q(x) = C4 (x - 1/2)^4 + C2 (x - 1/2)^2 + C0
C4 = SurdNumber(Fraction(29, 2), 2)
C2 = SurdNumber(Fraction(-13, 4), Fraction(5, 2))
C0 = SurdNumber(Fraction(73, 32), Fraction(-1, 2))


def q_eval(x):
    """Evaluate the potential.

    Exact for ints, Fractions and SurdNumbers (result in Q(sqrt7)); for a
    :class:`RationalInterval` the result is the exact range of q over it,
    since q is increasing in ``(x - 1/2)**2``.  Floats give floats.
    """
    if isinstance(x, float):
        t2 = (x - 0.5) ** 2
        return float(C0) + t2 * (float(C2) + float(C4) * t2)
    if isinstance(x, RationalInterval):
        t2 = (x - HALF).square()
        return C0 + t2 * (C2 + C4 * t2)
    t = SurdNumber.lift(x) - HALF
    t2 = t * t
    return C0 + t2 * (C2 + C4 * t2)


Q_MIN = q_eval(HALF)
Q_MAX = q_eval(BETA2)


@dataclass(frozen=True)
class PotentialConstants:
    c4: SurdNumber = C4
    c2: SurdNumber = C2
    c0: SurdNumber = C0
    q_min: SurdNumber = Q_MIN
    q_max: SurdNumber = Q_MAX


CONSTANTS = PotentialConstants()


def _check_unit(name, x, lo=0, hi=1):
    if isinstance(x, RationalInterval):
        ok = x.lo >= lo and x.hi <= hi
    else:
        ok = lo <= x <= hi
    if not ok:
        raise ValueError(f"{name}={x} outside [{lo}, {hi}]")


def eta(epsilon, x):
    """Probability of reading 0 after an epsilon-noisy binary symmetric channel."""
    _check_unit("epsilon", epsilon, 0, HALF)
    _check_unit("x", x)
    return (1 - 2 * epsilon) * x + epsilon


@dataclass(frozen=True)
class BiasPoint:
    """Average probability ``a`` of reading 0 and the two-world bias ``delta``."""

    a: object
    delta: object

    @classmethod
    def from_worlds(cls, p0_world0, p0_world1) -> "BiasPoint":
        return cls((p0_world0 + p0_world1) * HALF, p0_world0 - p0_world1)

    @property
    def worlds(self):
        """``(P[0 | x_i = 0], P[0 | x_i = 1])``."""
        return self.a + self.delta * HALF, self.a - self.delta * HALF

    def is_consistent(self) -> bool:
        return all(0 <= p <= 1 for p in self.worlds)


def weighted_bias(p: BiasPoint):
    """``|delta| * q(a)``."""
    return abs(p.delta) * q_eval(p.a)


class PreconditionError(ValueError):
    """Raised with one diagnostic per violated hypothesis."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class DPIResult:
    gate_kind: str
    c: object
    delta_c: object
    lhs: object
    rhs: object
    holds: bool
    ratio: object


GATE_KINDS = ("or", "parity")


def gate_output(gate_kind: str, epsilon, A: BiasPoint, B: BiasPoint) -> BiasPoint:
    """Closed-form ``(c, delta_c)`` for a noisy OR or PARITY gate."""
    a, da, b, db = A.a, A.delta, B.a, B.delta
    k = 1 - 2 * epsilon
    if gate_kind == "or":
        delta_c = (a * db + b * da) * k
        c = k * (a * b + da * db * Fraction(1, 4)) + epsilon
    elif gate_kind == "parity":
        delta_c = ((2 * a - 1) * db + (2 * b - 1) * da) * k
        c = k * (a * b + (1 - a) * (1 - b) + da * db * HALF) + epsilon
    else:
        raise ValueError(f"unknown gate kind {gate_kind!r}")
    return BiasPoint(c, delta_c)


def _hypothesis_violations(epsilon, A: BiasPoint, B: BiasPoint) -> list[str]:
    out = []
    if epsilon < BETA2:
        out.append(f"epsilon={epsilon} below beta2")
    if epsilon > HALF:
        out.append(f"epsilon={epsilon} above 1/2")
    hi = 1 - BETA2
    for wire, p in (("A", A), ("B", B)):
        for world, v in zip(("x_i=0", "x_i=1"), p.worlds):
            if v < BETA2:
                out.append(f"P[{wire}=0|{world}]={v} below beta2")
            if v > hi:
                out.append(f"P[{wire}=0|{world}]={v} above 1-beta2")
    return out


def check_dpi(gate_kind: str, epsilon, A: BiasPoint, B: BiasPoint, strict: bool = True) -> DPIResult:
    """Compare ``|delta_c| q(c)`` against ``max(|delta_a| q(a), |delta_b| q(b))``.

    With ``strict=False`` the noise and probability hypotheses are not
    enforced, so below-threshold behaviour can be inspected.
    """
    if strict:
        bad = _hypothesis_violations(epsilon, A, B)
        if bad:
            raise PreconditionError(bad)
    else:
        if not (0 <= epsilon <= HALF):
            raise PreconditionError([f"epsilon={epsilon} outside [0, 1/2]"])
        if not (A.is_consistent() and B.is_consistent()):
            raise PreconditionError(["world probabilities outside [0, 1]"])
    C = gate_output(gate_kind, epsilon, A, B)
    lhs = weighted_bias(C)
    rhs = max(weighted_bias(A), weighted_bias(B))
    ratio = lhs / rhs if rhs != 0 else Fraction(0)
    return DPIResult(gate_kind, C.a, C.delta, lhs, rhs, bool(lhs <= rhs), ratio)
