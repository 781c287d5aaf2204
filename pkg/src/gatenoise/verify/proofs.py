"""Certification of the potential-decay inequalities.

The tight inequality (``prop1``) is handled in two regimes: an exact
Taylor expansion around ``(x0, x0)`` with certified coefficient bounds, and
branch and bound away from it.  The non-tight inequalities are certified
directly at their endpoint values of ``mu``; convexity of ``q`` (checked
here as well) covers the interior values.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from ..numeric import BETA2, X0, SurdNumber, as_fraction, render_rational, round_down
from ..potential import C2, C4, Q_MAX, Q_MIN, q_eval
from .bnb import (
    BUDGET_EXHAUSTED,
    CERTIFIED,
    DEFAULT_BUDGET,
    DEFAULT_MIN_WIDTH,
    FAILED,
    BoundCertificate,
    Box,
    MinimumEnclosure,
    certified_minimum,
    certify_lower_bound,
)
from .inequalities import INEQUALITY_NAMES, TAYLOR_RADIUS, build_inequality
from .poly import MultiPoly

TAYLOR_BOUNDS = (None, 5, 31, 18, 68, 326) + (5000,) * 6
CHAIN_TARGET = Fraction(9, 10)
MINIMUM_TOLERANCE = Fraction(1, 10**5)


# ---------------------------------------------------------------------------
# Taylor regime
# ---------------------------------------------------------------------------


@dataclass
class TaylorExpansion:
    low: tuple[MultiPoly, MultiPoly]  # coefficients of s^0 and s^1
    r: list[MultiPoly]  # r[i] is the coefficient of s^(i+2), polynomials in k


def taylor_coefficients(beta=BETA2) -> TaylorExpansion:
    """Expand the ``prop1`` polynomial at ``a = x0 + k s``, ``b = x0 + s`` in powers of ``s``."""
    poly = build_inequality("prop1", beta).poly
    ks = ("k", "s")
    k, s = MultiPoly.var("k", ks), MultiPoly.var("s", ks)
    local = poly.substitute({"a": k * s + X0, "b": s + X0}, ks)
    coeffs = local.coefficients_in("s")
    zero = MultiPoly(("k",))
    degree = max(coeffs) if coeffs else 0
    r = [coeffs.get(i + 2, zero) for i in range(max(degree - 1, 0))]
    return TaylorExpansion((coeffs.get(0, zero), coeffs.get(1, zero)), r)


def expected_r0() -> MultiPoly:
    k = MultiPoly.var("k", ("k",))
    return (k * k + 1) * (3 - SurdNumber(0, Fraction(3, 4)))


@dataclass
class CoefficientBound:
    index: int
    bound: int
    upper: BoundCertificate  # bound - r_i >= 0
    lower: BoundCertificate  # bound + r_i >= 0

    @property
    def status(self) -> str:
        return _combine([self.upper.status, self.lower.status])


@dataclass
class TaylorReport:
    low_vanish: bool
    r0_exact: bool
    r0_min: SurdNumber
    symmetric: bool
    s_degree: int
    bounds: list[CoefficientBound] = field(default_factory=list)
    chain_value: SurdNumber | None = None
    failed_index: int | None = None

    @property
    def chain_ok(self) -> bool:
        return self.chain_value is not None and self.chain_value >= CHAIN_TARGET

    @property
    def status(self) -> str:
        if not (self.low_vanish and self.r0_exact and self.symmetric):
            return FAILED
        if self.bounds and self.bounds[-1].status != CERTIFIED:
            return self.bounds[-1].status
        return CERTIFIED if self.chain_ok else FAILED

    def lines(self) -> list[str]:
        out = [
            f"taylor: s^0 and s^1 coefficients vanish: {self.low_vanish}",
            f"taylor: r_0(k) = (3 - 3*sqrt7/4)(k^2 + 1): {self.r0_exact}",
            f"taylor: symmetric in (a, b): {self.symmetric}; highest power of s: {self.s_degree}",
        ]
        for b in self.bounds:
            out.append(f"taylor: |r_{b.index}(k)| <= {b.bound} on [-1, 1]: {b.status}")
        if self.chain_value is not None:
            out.append(
                f"taylor: r_0 min - sum bound_i (1/50)^i = {float(self.chain_value):.6f} >= 0.9: {self.chain_ok}"
            )
        if self.failed_index is not None:
            out.append(f"taylor: aborted at coefficient index {self.failed_index}")
        return out


def verify_taylor_bounds(beta=BETA2, budget: int = DEFAULT_BUDGET, min_width=DEFAULT_MIN_WIDTH) -> TaylorReport:
    """Certify the local argument on the square ``|a - x0|, |b - x0| <= 1/50``.

    With ``s = b - x0`` and ``a - x0 = k s`` (``|k| <= 1`` by symmetry) the
    polynomial is ``s^2 (r_0(k) + sum_i r_i(k) s^i)``; if each ``|r_i| <= B_i``
    on ``[-1, 1]`` then it is at least ``s^2 (min r_0 - sum B_i 50^-i)``.
    """
    exp = taylor_coefficients(beta)
    poly = build_inequality("prop1", beta).poly
    r0 = exp.r[0] if exp.r else MultiPoly(("k",))
    r0_min = (3 - SurdNumber(0, Fraction(3, 4))) if r0 == expected_r0() else r0.evaluate((0,))
    report = TaylorReport(
        low_vanish=all(c.is_zero() for c in exp.low),
        r0_exact=r0 == expected_r0(),
        r0_min=r0_min,
        symmetric=poly == poly.swap("a", "b"),
        s_degree=len(exp.r) + 1,
    )
    if not report.low_vanish:
        report.failed_index = -1
        return report
    if not report.r0_exact:
        report.failed_index = 0
        return report
    kbox = Box.of(k=(-1, 1))
    chain = report.r0_min
    for i in range(1, len(exp.r)):
        bound = TAYLOR_BOUNDS[i] if i < len(TAYLOR_BOUNDS) else TAYLOR_BOUNDS[-1]
        ri = exp.r[i]
        up = certify_lower_bound(bound - ri, kbox, 0, budget, min_width, name=f"r{i}_upper")
        lo = certify_lower_bound(bound + ri, kbox, 0, budget, min_width, name=f"r{i}_lower")
        cb = CoefficientBound(i, bound, up, lo)
        report.bounds.append(cb)
        if cb.status != CERTIFIED:
            report.failed_index = i
            return report
        chain = chain - bound * TAYLOR_RADIUS**i
    report.chain_value = chain
    return report


# ---------------------------------------------------------------------------
# Scalar steps
# ---------------------------------------------------------------------------


@dataclass
class ScalarCheck:
    name: str
    holds: bool
    value: object

    def line(self) -> str:
        v = self.value
        shown = f"{float(v):.6g}" if isinstance(v, (Fraction, SurdNumber, int)) else str(v)
        return f"scalar: {self.name}: {'ok' if self.holds else 'FAILED'} ({shown})"


def verify_convexity_reduction(beta=BETA2) -> list[ScalarCheck]:
    """Exact sign checks behind the convexity reduction and the local case."""
    beta = SurdNumber.lift(beta)
    k = 1 - 2 * beta
    r = TAYLOR_RADIUS
    corner_lo = k * (X0 - r) ** 2 + beta
    corner_hi = k * (X0 + r) ** 2 + beta
    gap = q_eval(Fraction(21, 50)) - q_eval(Fraction(13, 25))
    checks = [
        # q'' = 12 c4 (x-1/2)^2 + 2 c2 > 0 everywhere, so q is convex and
        # q(eta(ab + mu)) is maximised at an endpoint of any mu-interval
        ScalarCheck("c4 > 0", C4 > 0, C4),
        ScalarCheck("c2 > 0 (q convex)", C2 > 0, C2),
        ScalarCheck("q_min > 0.9", Q_MIN > Fraction(9, 10), Q_MIN),
        ScalarCheck("q_max < 2.1", Q_MAX < Fraction(21, 10), Q_MAX),
        # q is largest at the ends of [beta, 1 - beta]
        ScalarCheck("q(beta) <= q_max", q_eval(beta) <= Q_MAX, q_eval(beta)),
        ScalarCheck("q_min / (10 q_max) > 1/100", Q_MIN * 10 > Q_MAX, Q_MIN / (Q_MAX * 10)),
        ScalarCheck("q(0.42) - q(0.52) > 0.02", gap > Fraction(1, 50), gap),
        ScalarCheck("eta(ab) > 0.37 at a = b = x0 - 1/50", corner_lo > Fraction(37, 100), corner_lo),
        ScalarCheck("eta(ab) < 0.42 at a = b = x0 + 1/50", corner_hi < Fraction(42, 100), corner_hi),
        ScalarCheck("1 - beta - x0 + 1/50 < 0.33", 1 - beta - X0 + r < Fraction(33, 100), 1 - beta - X0 + r),
        ScalarCheck(
            "(1 - 2 beta) 0.33^2 < 0.1",
            k * Fraction(33, 100) ** 2 < Fraction(1, 10),
            k * Fraction(33, 100) ** 2,
        ),
    ]
    return checks


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------


def _combine(statuses) -> str:
    statuses = list(statuses)
    if FAILED in statuses:
        return FAILED
    if BUDGET_EXHAUSTED in statuses:
        return BUDGET_EXHAUSTED
    return CERTIFIED


@dataclass
class ItemResult:
    name: str
    target: Fraction
    certificates: list[BoundCertificate]
    minimum: MinimumEnclosure | None = None
    taylor: TaylorReport | None = None

    @property
    def status(self) -> str:
        statuses = [c.status for c in self.certificates]
        if self.taylor is not None:
            statuses.append(self.taylor.status)
        return _combine(statuses)

    @property
    def margin(self) -> Fraction | None:
        if self.status != CERTIFIED:
            return None
        margins = [c.margin for c in self.certificates if c.margin is not None]
        return min(margins) if margins else None

    @property
    def boxes_processed(self) -> int:
        n = sum(c.boxes_processed for c in self.certificates)
        if self.taylor is not None:
            n += sum(b.upper.boxes_processed + b.lower.boxes_processed for b in self.taylor.bounds)
        return n

    def witness(self) -> BoundCertificate | None:
        for c in self.certificates:
            if c.status == FAILED:
                return c
        return None

    def record(self) -> dict:
        return {
            "name": self.name,
            "target": render_rational(self.target),
            # rounded down, so still a valid certified margin
            "margin": None if self.margin is None else render_rational(round_down(self.margin, 64)),
            "boxes": self.boxes_processed,
            "status": self.status,
        }

    def lines(self) -> list[str]:
        margin = "-" if self.margin is None else f"{float(self.margin):.6g}"
        out = [
            f"{self.name}: {self.status} target={render_rational(self.target)} "
            f"margin={margin} boxes={self.boxes_processed}"
        ]
        w = self.witness()
        if w is not None:
            out.append(f"  witness box: {w.witness}")
            if w.witness_point is not None:
                pt = ", ".join(f"{float(x):.10g}" for x in w.witness_point)
                out.append(f"  witness point: ({pt}) value {float(w.witness_value):.10g}")
            out.append(f"  {w.note}")
        if self.minimum is not None:
            m = self.minimum
            out.append(f"  certified minimum in [{float(m.lower):.6g}, {float(m.upper):.6g}]")
        if self.taylor is not None:
            out.extend("  " + line for line in self.taylor.lines())
        return out


def certify_inequality(name: str, beta=BETA2, budget: int = DEFAULT_BUDGET, min_width=DEFAULT_MIN_WIDTH) -> ItemResult:
    """Run one named inequality; ``prop1`` uses the two-regime argument."""
    ineq = build_inequality(name, beta)
    if name == "prop1":
        outside = build_inequality("fact1_mu0", beta)
        certs = [
            certify_lower_bound(outside.poly, bx, 0, budget, min_width, expr=outside.expr, name="prop1_outside")
            for bx in outside.boxes
        ]
        taylor = verify_taylor_bounds(beta, budget, min_width)
        return ItemResult(name, ineq.target, certs, taylor=taylor)
    certs = [
        certify_lower_bound(ineq.poly, bx, ineq.target, budget, min_width, expr=ineq.expr, name=name)
        for bx in ineq.boxes
    ]
    item = ItemResult(name, ineq.target, certs)
    if item.status == FAILED:
        # report how far the bound actually reaches
        mins = [certified_minimum(ineq.poly, bx, MINIMUM_TOLERANCE, budget, expr=ineq.expr) for bx in ineq.boxes]
        item.minimum = min(mins, key=lambda m: m.lower)
    return item


@dataclass
class VerificationReport:
    beta: object
    items: list[ItemResult]
    scalars: list[ScalarCheck]

    @property
    def status(self) -> str:
        statuses = [i.status for i in self.items]
        if not all(s.holds for s in self.scalars):
            statuses.append(FAILED)
        return _combine(statuses)

    @property
    def exit_code(self) -> int:
        return {CERTIFIED: 0, FAILED: 1, BUDGET_EXHAUSTED: 2}[self.status]

    def item(self, name: str) -> ItemResult:
        for i in self.items:
            if i.name == name:
                return i
        raise KeyError(name)

    def lines(self) -> list[str]:
        out = [f"beta = {self.beta}"]
        for i in self.items:
            out.extend(i.lines())
        out.extend(s.line() for s in self.scalars)
        out.append(f"overall: {self.status}")
        return out

    def text(self) -> str:
        return "\n".join(self.lines()) + "\n"

    def summary(self) -> list[dict]:
        return [i.record() for i in self.items]

    def to_json(self) -> str:
        return json.dumps({"beta": str(self.beta), "status": self.status, "certificates": self.summary()}, indent=2)


@dataclass(frozen=True)
class CertificateRecord:
    name: str
    target: Fraction
    margin: Fraction | None
    boxes: int
    status: str


def load_summary(text: str) -> list[CertificateRecord]:
    """Parse the JSON written by :meth:`VerificationReport.to_json`."""
    data = json.loads(text)
    out = []
    for r in data["certificates"]:
        margin = None if r["margin"] is None else Fraction(r["margin"])
        out.append(CertificateRecord(r["name"], Fraction(r["target"]), margin, int(r["boxes"]), r["status"]))
    return out


def _run(args):
    name, beta, budget, min_width = args
    return certify_inequality(name, beta, budget, min_width)


def verify_all(
    beta=BETA2,
    budget: int = DEFAULT_BUDGET,
    min_width=DEFAULT_MIN_WIDTH,
    only=None,
    workers: int = 1,
) -> VerificationReport:
    """Certify every named inequality (or the subset ``only``) plus the scalar steps."""
    names = list(INEQUALITY_NAMES) if not only else list(only)
    for n in names:
        if n not in INEQUALITY_NAMES:
            raise KeyError(f"unknown inequality {n!r}")
    beta = SurdNumber.lift(beta)
    min_width = as_fraction(min_width)
    jobs = [(n, beta, budget, min_width) for n in names]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            items = list(pool.map(_run, jobs))
    else:
        items = [_run(j) for j in jobs]
    return VerificationReport(beta, items, verify_convexity_reduction(beta))
