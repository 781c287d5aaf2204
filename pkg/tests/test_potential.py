from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gatenoise.numeric import BETA2, X0, RationalInterval, SurdNumber
from gatenoise.potential import (
    C0,
    C2,
    C4,
    Q_MAX,
    Q_MIN,
    BiasPoint,
    PreconditionError,
    check_dpi,
    eta,
    gate_output,
    q_eval,
    weighted_bias,
)
from helpers import q_float

unit = st.fractions(min_value=0, max_value=1, max_denominator=10**4)


def test_constants_exact():
    assert C4 == SurdNumber(Fraction(29, 2), 2)
    assert C2 == SurdNumber(Fraction(-13, 4), Fraction(5, 2))
    assert C0 == SurdNumber(Fraction(73, 32), Fraction(-1, 2))
    assert Q_MIN == q_eval(Fraction(1, 2)) == SurdNumber(Fraction(73, 32), Fraction(-1, 2))
    assert Q_MAX == SurdNumber(Fraction(247, 128), Fraction(1, 16))


def test_q_normalized_at_x0():
    assert q_eval(X0) == 1


@given(unit)
def test_q_symmetric_and_matches_float(x):
    assert q_eval(x) == q_eval(1 - x)
    assert abs(float(q_eval(x)) - float(q_float(float(x)))) < 1e-12


@given(unit, unit)
def test_q_interval_is_exact_range(x, y):
    lo, hi = min(x, y), max(x, y)
    rng = q_eval(RationalInterval(lo, hi))
    for t in (lo, hi, (lo + hi) / 2):
        v = q_eval(t)
        assert rng.lo <= v <= rng.hi


def test_eta():
    assert eta(Fraction(1, 10), Fraction(1, 2)) == Fraction(1, 2)
    assert eta(0, Fraction(1, 3)) == Fraction(1, 3)
    assert eta(Fraction(1, 2), 1) == Fraction(1, 2)
    with pytest.raises(ValueError):
        eta(Fraction(3, 5), Fraction(1, 2))
    with pytest.raises(ValueError):
        eta(Fraction(1, 10), Fraction(3, 2))


def test_or_amplification_below_threshold():
    A = B = BiasPoint(Fraction(8, 10), Fraction(1, 10))
    C = gate_output("or", Fraction(1, 10), A, B)
    assert C.delta == Fraction(16, 125)
    assert C.delta > A.delta  # the naive bound |delta_c| <= max |delta| fails
    r = check_dpi("or", Fraction(1, 10), A, B, strict=False)
    assert r.delta_c == Fraction(16, 125)


@pytest.mark.parametrize("kind", ["or", "parity"])
@given(unit, unit, unit, unit, st.fractions(min_value=0, max_value=Fraction(1, 2), max_denominator=100))
def test_gate_output_matches_world_formulas(kind, p, r, s, t, eps):
    A, B = BiasPoint.from_worlds(p, r), BiasPoint.from_worlds(s, t)
    C = gate_output(kind, eps, A, B)
    if kind == "or":
        w0, w1 = eta(eps, p * s), eta(eps, r * t)
    else:
        w0, w1 = eta(eps, p * s + (1 - p) * (1 - s)), eta(eps, r * t + (1 - r) * (1 - t))
    assert C.worlds == (w0, w1)


def test_weighted_bias():
    assert weighted_bias(BiasPoint(Fraction(1, 2), Fraction(-1, 4))) == Q_MIN / 4


def test_preconditions_are_listed():
    A = BiasPoint(Fraction(1, 2), Fraction(1, 10))
    with pytest.raises(PreconditionError) as exc:
        check_dpi("or", Fraction(1, 20), A, BiasPoint(Fraction(1, 20), 0))
    msgs = exc.value.violations
    assert any("epsilon" in m for m in msgs)
    assert any("below beta2" in m and "B" in m for m in msgs)


def test_dpi_at_x0_is_tight():
    # tiny bias around x0 at the threshold: the ratio approaches 1 but stays below
    d = Fraction(1, 10**6)
    A = BiasPoint(X0, d)
    r = check_dpi("or", BETA2, A, A)
    assert r.holds
    assert r.ratio > Fraction(999, 1000)


def test_dpi_ratio_zero_when_no_bias():
    A = BiasPoint(Fraction(1, 2), 0)
    r = check_dpi("parity", BETA2, A, A)
    assert r.holds and r.ratio == 0
