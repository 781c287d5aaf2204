import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gatenoise.experiments import (
    dependence_bound,
    input_depths,
    iterate_nand,
    nand_critical_noise,
    nand_fixed_point,
    noiseless_table,
    random_formula,
    theorem_bound_check,
    threshold_scan,
)
from gatenoise.formula import XOR, Const, Gate, Input, build_balanced
from gatenoise.numeric import BETA2
from gatenoise.potential import Q_MAX, Q_MIN, q_eval

B2 = 0.08856217223385232  # (3 - sqrt 7) / 4


def _or_worlds(eps, depth):
    w0, w1 = Fraction(1), Fraction(0)
    for _ in range(depth):
        w0 = (1 - 2 * eps) * w0 * w0 + eps
        w1 = (1 - 2 * eps) * w1 * w1 + eps
    return w0, w1


def _parity_worlds(eps, depth):
    def gate(pa, pb):
        return (1 - 2 * eps) * (pa * pb + (1 - pa) * (1 - pb)) + eps

    w0, w1, sib = Fraction(1), Fraction(0), Fraction(1)
    for _ in range(depth):
        w0, w1, sib = gate(w0, sib), gate(w1, sib), gate(sib, sib)
    return w0, w1


@pytest.mark.parametrize("gate,oracle", [("or", _or_worlds), ("parity", _parity_worlds)])
def test_scan_matches_recursion(gate, oracle):
    eps = Fraction(1, 7)
    res = threshold_scan(gate, [eps], range(6))
    for row in res.rows:
        w0, w1 = oracle(eps, row.depth)
        assert row.delta_out == abs(w0 - w1)
        assert row.weighted_bias_out == abs(w0 - w1) * q_eval((w0 + w1) / 2)


@pytest.mark.parametrize("gate", ["or", "parity"])
def test_weighted_bias_non_increasing_at_threshold(gate):
    rows = threshold_scan(gate, [BETA2], range(0, 9)).rows
    for prev, cur in zip(rows, rows[1:]):
        assert cur.weighted_bias_out <= prev.weighted_bias_out
    assert all(r.max_gate_ratio is None or r.max_gate_ratio <= 1 for r in rows)


def test_full_noise_kills_bias():
    rows = threshold_scan("or", [Fraction(1, 2)], range(1, 5)).rows
    assert all(r.delta_out == 0 for r in rows)


@pytest.mark.parametrize("gate", ["or", "parity"])
def test_bias_decays_above_threshold(gate):
    eps = BETA2 + Fraction(1, 100)
    res = threshold_scan(gate, [eps], [5, 10])
    shallow, deep = res.rows
    assert deep.delta_out < shallow.delta_out
    assert 0 < res.decay_factor(eps) < 1


def test_scan_validation():
    with pytest.raises(ValueError):
        threshold_scan("and", [BETA2], [1])
    with pytest.raises(ValueError):
        threshold_scan("or", [BETA2], [1], "sparse")


# -- dependence bound -------------------------------------------------------


def test_dependence_bound_trivial_point():
    r = dependence_bound(Q_MAX / Q_MIN, Fraction(1, 2))
    assert r.c_of_Delta == 2.0 and r.clamped


def test_dependence_bound_closed_form():
    theta = Fraction(9, 10)
    r = dependence_bound(Fraction(1, 10), theta)
    qmin = 73 / 32 - math.sqrt(7) / 2
    qmax = (247 + 8 * math.sqrt(7)) / 128
    assert r.c_of_Delta == pytest.approx(2 * (0.1 * qmin / qmax) ** (1 / math.log2(0.9)), rel=1e-12)
    with pytest.raises(ValueError):
        dependence_bound(0, theta)
    with pytest.raises(ValueError):
        dependence_bound(Fraction(1, 2), 1)


@settings(max_examples=60, deadline=None)
@given(
    st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(999, 1000)),
    st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(999, 1000)),
    st.fractions(min_value=Fraction(85, 100), max_value=Fraction(99, 100)),
)
def test_dependence_bound_monotone_in_bias(d1, d2, theta):
    lo, hi = sorted((d1, d2))
    # a weaker bias requirement allows deeper formulas, hence more bits
    assert dependence_bound(lo, theta).c_of_Delta >= dependence_bound(hi, theta).c_of_Delta


# -- NAND map ---------------------------------------------------------------


def test_nand_noiseless_and_full_noise():
    fp = nand_fixed_point(0)
    assert fp.fixed_point == pytest.approx((math.sqrt(5) - 1) / 2)
    assert fp.derivative == pytest.approx(math.sqrt(5) - 1) and not fp.stable
    assert nand_fixed_point(Fraction(1, 2)).fixed_point == 0.5


def test_nand_cycle_is_a_two_cycle():
    fp = nand_fixed_point(Fraction(1, 20))
    lo, hi = fp.cycle
    xs = iterate_nand(Fraction(1, 20), lo, 2)
    assert xs[1] == pytest.approx(hi) and xs[2] == pytest.approx(lo)
    assert fp.cycle_derivative < 1
    # iteration from an arbitrary start settles on the cycle
    tail = iterate_nand(Fraction(1, 20), 0.3, 400)[-2:]
    assert sorted(tail) == pytest.approx([lo, hi], abs=1e-9)


def test_nand_above_threshold_is_stable():
    fp = nand_fixed_point(Fraction(1, 5))
    assert fp.stable and fp.cycle is None and fp.derivative < 1
    assert nand_fixed_point(Fraction(1, 10)).stable
    assert iterate_nand(Fraction(1, 5), 0.9, 400)[-1] == pytest.approx(fp.fixed_point)


def test_nand_transition():
    t = nand_critical_noise(Fraction(1, 10**9))
    assert t.lo < BETA2 <= t.hi
    assert abs(float(t.estimate) - B2) < 1e-6


# -- theorem check ----------------------------------------------------------


def test_balanced_parity_passes():
    names = [f"x{i}" for i in range(1, 9)]
    f = build_balanced(XOR, 0, 3, names)
    table = noiseless_table(f, 8)
    rep = theorem_bound_check(table, candidates=[f])
    (res,) = rep.candidates
    assert rep.d == 8 and rep.D == 2
    assert res.computes and res.distinguished_depth == 3
    assert not rep.violations


def test_shallow_input_noted_by_depth_property():
    f = Gate(XOR, 0, Input("x1"), build_balanced(XOR, 0, 2, ["x2", "x3", "x4", "x5"]))
    rep = theorem_bound_check(noiseless_table(f, 5), candidates=[f])
    res = rep.candidates[0]
    # the deepest dependent input sits at depth 3 >= ceil(log2 5)
    assert res.distinguished_depth == 3 and res.depth_property
    assert input_depths(f)["x1"] == 1


def test_constant_function_is_vacuous():
    rep = theorem_bound_check([0, 0, 0, 0], candidates=[Const(0)])
    assert rep.vacuous and not rep.violations


def test_rejects_subthreshold_noise():
    with pytest.raises(ValueError):
        theorem_bound_check([0, 1], epsilon=Fraction(1, 20))


def test_random_candidates_never_contradict():
    rng = random.Random(11)
    seen = 0
    for _ in range(20):
        n = rng.randint(2, 5)
        f = random_formula(rng, n, rng.randint(2, 4))
        rep = theorem_bound_check(noiseless_table(f, n), candidates=[f])
        assert not rep.violations
        seen += sum(c.computes for c in rep.candidates)
    assert seen > 0
