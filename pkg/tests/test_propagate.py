import math
import random
from fractions import Fraction

import pytest

from gatenoise.experiments import random_formula
from gatenoise.formula import NAND, OR, XOR, Const, Gate, Input, Not, build_balanced, normalize, with_uniform_noise
from gatenoise.numeric import BETA2, RationalInterval
from gatenoise.potential import Q_MAX
from gatenoise.propagate import (
    PropagationError,
    chain_bound,
    check_invariant_chain,
    output_bias,
    p_zero,
    propagate,
    simulate_p_zero,
)
from helpers import enumerate_p_zero


def test_identity_has_full_bias():
    t = propagate(Input("x1"), "x1")
    assert t.output.delta == 1 and t.output.p0_world0 == 1 and t.output.p0_world1 == 0


def test_subthreshold_or_with_soft_leaves():
    f = Gate(OR, Fraction(1, 10), Input("u"), Input("v"))
    leaf = (Fraction(85, 100), Fraction(75, 100))
    t = propagate(f, None, soft={"u": leaf, "v": leaf})
    assert t.output.delta == Fraction(16, 125)
    assert t.wires[-1].in_contraction_region and t.wires[-1].gate_ratio < 1


@pytest.mark.parametrize("seed", range(12))
def test_worlds_agree_with_enumeration(seed):
    rng = random.Random(seed)
    f = with_uniform_noise(random_formula(rng, 3, 3), Fraction(rng.randint(0, 50), 100))
    f = normalize(f)
    fixed = {"x2": rng.randint(0, 1), "x3": rng.randint(0, 1)}
    t = propagate(f, "x1", fixed) if "x1" in {n.name for n in _inputs(f)} else None
    for x1 in (0, 1):
        exact = enumerate_p_zero(f, {"x1": x1, **fixed})
        assert p_zero(f, {"x1": x1, **fixed}) == exact
        if t is not None:
            assert (t.output.p0_world0, t.output.p0_world1)[x1] == exact


def _inputs(f):
    from gatenoise.formula import walk

    return [n for _, n, _ in walk(f) if isinstance(n, Input)]


def test_interval_mode_encloses_exact():
    f = build_balanced("or", BETA2, 6, ["x1", "y"])
    exact = propagate(f, "x1", {"y": 0})
    iv = propagate(f, "x1", {"y": 0}, mode="interval", bits=80)
    for w_exact, w_iv in zip(exact.wires, iv.wires):
        assert isinstance(w_iv.posterior.p0_world0, RationalInterval)
        assert w_exact.posterior.p0_world0 in w_iv.posterior.p0_world0
        assert w_exact.posterior.p0_world1 in w_iv.posterior.p0_world1


def test_errors():
    f = Gate(OR, Fraction(1, 10), Input("x1"), Input("y"))
    with pytest.raises(PropagationError, match="not fixed"):
        propagate(f, "x1")
    with pytest.raises(PropagationError, match="does not occur"):
        propagate(f, "x9", {"y": 0, "x1": 0})
    nand = Gate(NAND, 0, Input("x1"), Input("y"))
    with pytest.raises(PropagationError, match="normalize"):
        propagate(nand, "x1", {"y": 1})
    assert propagate(normalize(nand), "x1", {"y": 1}).output.delta == -1


def test_not_flips_delta_and_keeps_weighted_bias():
    f = Gate(XOR, BETA2, Input("x1"), Const(0))
    a = propagate(f, "x1").wires[-1]
    b = propagate(Not(f), "x1").wires[-1]
    assert b.posterior.delta == -a.posterior.delta
    assert b.weighted_bias == a.weighted_bias


def test_monte_carlo_within_four_sigma():
    rng = random.Random(5)
    f = with_uniform_noise(random_formula(rng, 3, 4), Fraction(1, 8))
    trials = 200_000
    for bits in range(8):
        a = {"x1": bits & 1, "x2": (bits >> 1) & 1, "x3": (bits >> 2) & 1}
        p = float(p_zero(f, a))
        sigma = math.sqrt(max(p * (1 - p), 1e-12) / trials)
        est = simulate_p_zero(f, a, trials, seed=bits)
        assert abs(est - p) <= 4 * sigma + 1e-9


def test_chain_holds_above_threshold():
    f = build_balanced("or", BETA2, 5, ["x1"])
    t = propagate(f, "x1")
    rep = check_invariant_chain(t, BETA2, Fraction(1, 100), 1 - 2 * BETA2)
    assert rep.D == 4 and rep.holds and rep.noise_ok
    assert chain_bound(rep.D, rep.D, 0, Fraction(1, 2)) == Q_MAX


def test_chain_reports_violation_below_threshold():
    f = build_balanced("nand", Fraction(1, 100), 6, ["x1"])
    t = propagate(normalize(f), "x1")
    rep = check_invariant_chain(t, Fraction(1, 100), Fraction(1, 100), Fraction(1, 2))
    assert not rep.noise_ok
    assert not rep.holds and rep.first_violation is not None


def test_output_bias_sign():
    f = Not(Gate(OR, Fraction(1, 5), Input("x1"), Input("y")))
    assert output_bias(f, "x1", {"y": 0}) < 0
