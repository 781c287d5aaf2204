from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gatenoise.formula import (
    ALL_GATE_OPS,
    OR,
    XOR,
    Const,
    FormulaSyntaxError,
    Gate,
    GateOp,
    Input,
    Not,
    build_balanced,
    depth_of,
    dependent_bits,
    formula_depth,
    gate_count,
    inputs_of,
    is_normalized,
    normalize,
    parse_formula,
    parse_number,
    render_formula,
    render_number,
    truth_table,
    walk,
)
from gatenoise.numeric import BETA2, X0
from helpers import enumerate_p_zero

NOISES = [Fraction(0), Fraction(1, 10), BETA2, Fraction(1, 2)]


def test_gate_tables():
    assert GateOp.named("or")(0, 0) == 0 and GateOp.named("or")(1, 0) == 1
    assert GateOp.named("nand")(1, 1) == 0
    assert GateOp.named("parity") == XOR
    assert len({op.name for op in ALL_GATE_OPS}) == 16
    assert GateOp.from_function(lambda l, r: l & (1 - r)).name == "gt"


def test_depth_ignores_not():
    x, y = Input("x"), Input("y")
    g = Gate(OR, Fraction(1, 10), Not(x), y)
    f = Not(Gate(XOR, Fraction(1, 10), g, Not(Not(y))))
    assert formula_depth(f) == 2
    assert depth_of(f, x) == 2
    assert gate_count(f) == 2
    assert inputs_of(f) == ["x", "y"]
    depths = sorted((n.name, d) for _, n, d in walk(f) if isinstance(n, Input))
    assert depths == [("x", 2), ("y", 1), ("y", 2)]
    with pytest.raises(ValueError):
        depth_of(f, Input("z"))


def test_gate_noise_validated():
    with pytest.raises(ValueError):
        Gate(OR, Fraction(3, 4), Input("x"), Input("y"))


def test_parse_render_round_trip():
    for text in [
        "(nand b2 (in x1) (in x1))",
        "(or 1/100+b2 (in x1) (const 1))",
        "(not (xor 0.1 (in a) (or x0-1/2 (in b) (const 0))))",
    ]:
        f = parse_formula(text)
        assert parse_formula(render_formula(f)) == f
    assert parse_number("b2+1/100") == BETA2 + Fraction(1, 100)
    assert render_number(X0) == "x0"


@pytest.mark.parametrize(
    "text, pos",
    [("(or b2 (in x1)", 14), ("(or b2 (in x1) (in x2)) extra", 24), ("(frob 1 (in x) (in y))", 1), ("(or 2 (in x) (in y))", 4)],
)
def test_syntax_errors_have_positions(text, pos):
    with pytest.raises(FormulaSyntaxError) as exc:
        parse_formula(text)
    assert exc.value.position == pos


def test_dependent_bits():
    xor3 = [bin(i).count("1") % 2 for i in range(8)]
    assert dependent_bits(xor3) == {1, 2, 3}
    assert dependent_bits([0, 1, 0, 1]) == {1}
    assert dependent_bits([1, 1]) == set()
    with pytest.raises(ValueError):
        dependent_bits([0, 1, 1])


def test_truth_table_of_balanced():
    f = build_balanced("xor", 0, 2, ["x1", "x2", "x3", 0])
    assert truth_table(f, ["x1", "x2", "x3"]) == [bin(i).count("1") % 2 for i in range(8)]


def _same_distribution(f, g, names):
    for bits in range(2 ** len(names)):
        a = {n: (bits >> i) & 1 for i, n in enumerate(names)}
        assert enumerate_p_zero(f, a) == enumerate_p_zero(g, a)


@pytest.mark.parametrize("op", ALL_GATE_OPS, ids=lambda o: o.name)
@pytest.mark.parametrize("eps", NOISES, ids=str)
def test_normalize_single_gate(op, eps):
    f = Gate(op, eps, Input("x"), Input("y"))
    g = normalize(f)
    assert is_normalized(g)
    assert gate_count(g) == 1
    _same_distribution(f, g, ["x", "y"])


ops = st.sampled_from(ALL_GATE_OPS)
noises = st.sampled_from(NOISES)
leaves = st.sampled_from([Input("x"), Input("y"), Input("z"), Const(0), Const(1), Not(Input("x"))])


@st.composite
def networks(draw):
    """Up to three gates in a tree."""
    shape = draw(st.integers(0, 2))
    g1 = Gate(draw(ops), draw(noises), draw(leaves), draw(leaves))
    if shape == 0:
        return g1
    if shape == 1:
        inner = Not(g1) if draw(st.booleans()) else g1
        return Gate(draw(ops), draw(noises), inner, draw(leaves))
    g2 = Gate(draw(ops), draw(noises), draw(leaves), draw(leaves))
    return Gate(draw(ops), draw(noises), g1, g2)


@given(networks())
@settings(max_examples=150, deadline=None)
def test_normalize_networks(f):
    g = normalize(f)
    assert is_normalized(g)
    _same_distribution(f, g, ["x", "y", "z"])
    assert normalize(g) == g
