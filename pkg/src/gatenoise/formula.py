"""Noisy formula trees over 2-input gates.

A formula is one of :class:`Input`, :class:`Const`, :class:`Not` (perfect)
or :class:`Gate` (a 2-input boolean function whose output is flipped with
probability ``noise``).  Trees are immutable; a wire is identified by the
post-order index of the node that drives it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, Union

from .numeric import BETA2, SQRT7, X0, SurdNumber, as_fraction, render_rational

# ---------------------------------------------------------------------------
# Gate operations
# ---------------------------------------------------------------------------

# truth table bit (2*left + right) holds f(left, right)
_GATE_NAMES = {
    0b0000: "false",
    0b1000: "and",
    0b0100: "gt",  # left and not right
    0b1100: "left",
    0b0010: "lt",  # not left and right
    0b1010: "right",
    0b0110: "xor",
    0b1110: "or",
    0b0001: "nor",
    0b1001: "xnor",
    0b0101: "notright",
    0b1101: "ge",  # left or not right
    0b0011: "notleft",
    0b1011: "le",  # not left or right
    0b0111: "nand",
    0b1111: "true",
}
_ALIASES = {"parity": "xor"}


@dataclass(frozen=True)
class GateOp:
    table: int

    def __post_init__(self):
        if not 0 <= self.table < 16:
            raise ValueError(f"truth table {self.table} out of range")

    @classmethod
    def named(cls, name: str) -> "GateOp":
        name = _ALIASES.get(name.lower(), name.lower())
        for table, n in _GATE_NAMES.items():
            if n == name:
                return cls(table)
        raise ValueError(f"unknown gate {name!r}")

    @classmethod
    def from_function(cls, fn) -> "GateOp":
        return cls(sum(int(bool(fn(l, r))) << (2 * l + r) for l in (0, 1) for r in (0, 1)))

    @property
    def name(self) -> str:
        return _GATE_NAMES[self.table]

    def __call__(self, left: int, right: int) -> int:
        return (self.table >> (2 * left + right)) & 1

    def __repr__(self):
        return f"GateOp.{self.name.upper()}"


ALL_GATE_OPS = tuple(GateOp(t) for t in range(16))
OR = GateOp.named("or")
AND = GateOp.named("and")
NAND = GateOp.named("nand")
NOR = GateOp.named("nor")
XOR = PARITY = GateOp.named("xor")
XNOR = GateOp.named("xnor")

# ---------------------------------------------------------------------------
# Nodes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Input:
    name: str


@dataclass(frozen=True)
class Const:
    bit: int

    def __post_init__(self):
        if self.bit not in (0, 1):
            raise ValueError("constant must be 0 or 1")


@dataclass(frozen=True)
class Not:
    child: "Formula"


@dataclass(frozen=True)
class Gate:
    op: GateOp
    noise: object
    left: "Formula"
    right: "Formula"

    def __post_init__(self):
        noise = self.noise
        if not isinstance(noise, SurdNumber):
            noise = as_fraction(noise)
        elif noise.is_rational:
            noise = noise.rat
        if not (0 <= noise <= Fraction(1, 2)):
            raise ValueError(f"gate noise {noise} outside [0, 1/2]")
        object.__setattr__(self, "noise", noise)


Formula = Union[Input, Const, Not, Gate]
FormulaNode = Formula

BASIS_OPS = (OR, XOR)


def children(node: Formula) -> tuple:
    if isinstance(node, Gate):
        return (node.left, node.right)
    if isinstance(node, Not):
        return (node.child,)
    return ()


def walk(f: Formula) -> Iterator[tuple[int, Formula, int]]:
    """Yield ``(node_id, node, depth)`` in post-order (leaves before parents).

    ``depth`` counts the binary gates strictly above the node's output wire.
    """
    counter = 0
    stack: list = [(f, 0, False)]
    while stack:
        node, depth, expanded = stack.pop()
        if expanded:
            yield counter, node, depth
            counter += 1
            continue
        stack.append((node, depth, True))
        below = depth + 1 if isinstance(node, Gate) else depth
        for child in reversed(children(node)):
            stack.append((child, below, False))


def inputs_of(f: Formula) -> list[str]:
    seen: dict[str, None] = {}
    for _, node, _ in walk(f):
        if isinstance(node, Input):
            seen.setdefault(node.name)
    return list(seen)


def gate_count(f: Formula) -> int:
    return sum(isinstance(node, Gate) for _, node, _ in walk(f))


def formula_depth(f: Formula) -> int:
    """Largest number of binary gates on any root-to-leaf path."""
    return max(d for _, _, d in walk(f))


def depth_of(f: Formula, wire) -> int:
    """Depth of a wire, given as a post-order node id or a node object.

    A node object is matched by identity (first occurrence in post-order).
    """
    for node_id, node, depth in walk(f):
        if (isinstance(wire, int) and not isinstance(wire, bool) and node_id == wire) or node is wire:
            return depth
    raise ValueError(f"wire {wire!r} is not in the formula")


def evaluate(f: Formula, assignment: dict[str, int], flips: dict[int, int] | None = None) -> int:
    """Noise-free evaluation; ``flips`` maps gate node ids to forced output flips."""
    flips = flips or {}
    values: dict[int, int] = {}
    stack: list[int] = []
    for node_id, node, _ in walk(f):
        if isinstance(node, Input):
            v = int(assignment[node.name])
        elif isinstance(node, Const):
            v = node.bit
        elif isinstance(node, Not):
            v = 1 - stack.pop()
        else:
            r, l = stack.pop(), stack.pop()
            v = node.op(l, r) ^ flips.get(node_id, 0)
        values[node_id] = v
        stack.append(v)
    return stack.pop()


# ---------------------------------------------------------------------------
# Normalization to {noisy OR, noisy PARITY, perfect NOT, constants}
# ---------------------------------------------------------------------------


def _literal(x: Formula, negate: int) -> Formula:
    return Not(x) if negate else x


def _normalize_gate(op: GateOp, noise, left: Formula, right: Formula) -> Formula:
    t = op.table
    ones = [(l, r) for l in (0, 1) for r in (0, 1) if op(l, r)]
    if t in (0b0000, 0b1111):
        bit = 1 if t else 0
        return Gate(OR, noise, Const(bit), Const(bit))
    if t in (0b1100, 0b0011):  # left / not left
        return _literal(Gate(OR, noise, left, Const(0)), t == 0b0011)
    if t in (0b1010, 0b0101):  # right / not right
        return _literal(Gate(OR, noise, right, Const(0)), t == 0b0101)
    if t in (0b0110, 0b1001):
        return _literal(Gate(XOR, noise, left, right), t == 0b1001)
    if len(ones) == 3:
        # f = OR(left ^ l0, right ^ r0), zero only at (l0, r0)
        (l0, r0), = [(l, r) for l in (0, 1) for r in (0, 1) if not op(l, r)]
        return Gate(OR, noise, _literal(left, l0), _literal(right, r0))
    (l1, r1), = ones
    # f = NOT OR(left ^ l1, right ^ r1), one only at (l1, r1)
    return Not(Gate(OR, noise, _literal(left, l1), _literal(right, r1)))


def _simplify_not(node: Formula) -> Formula:
    while isinstance(node, Not) and isinstance(node.child, Not):
        node = node.child.child
    return node


def normalize(f: Formula) -> Formula:
    """Rewrite every gate into noisy OR / noisy PARITY, perfect NOT and constants.

    Output flips commute with a perfect NOT, so each replacement has the
    same output distribution as the gate it replaces.  Double negations
    are removed.
    """
    results: list[Formula] = []
    for _, node, _ in walk(f):
        if isinstance(node, (Input, Const)):
            results.append(node)
        elif isinstance(node, Not):
            results.append(_simplify_not(Not(results.pop())))
        else:
            right, left = results.pop(), results.pop()
            if node.op in BASIS_OPS:
                new = Gate(node.op, node.noise, left, right)
            else:
                new = _normalize_gate(node.op, node.noise, left, right)
            results.append(_simplify_not(_simplify_children(new)))
    return results.pop()


def _simplify_children(node: Formula) -> Formula:
    if isinstance(node, Gate):
        return Gate(node.op, node.noise, _simplify_not(node.left), _simplify_not(node.right))
    if isinstance(node, Not):
        return Not(_simplify_children(node.child))
    return node


def is_normalized(f: Formula) -> bool:
    return all(not isinstance(n, Gate) or n.op in BASIS_OPS for _, n, _ in walk(f))


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------


def build_balanced(op: GateOp | str, noise, depth: int, inputs) -> Formula:
    """Complete binary tree of ``depth`` identical noisy gates.

    ``inputs`` is a sequence of leaves (names, bits or nodes), cycled to
    fill the ``2**depth`` leaf positions from left to right.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if isinstance(op, str):
        op = GateOp.named(op)
    leaves = [_leaf(x) for x in inputs]
    if not leaves:
        raise ValueError("at least one leaf is required")
    level = [leaves[i % len(leaves)] for i in range(2**depth)]
    while len(level) > 1:
        level = [Gate(op, noise, level[i], level[i + 1]) for i in range(0, len(level), 2)]
    return level[0]


def _leaf(x) -> Formula:
    if isinstance(x, (Input, Const, Not, Gate)):
        return x
    if isinstance(x, int):
        return Const(x)
    return Input(str(x))


def with_uniform_noise(f: Formula, noise) -> Formula:
    out: list[Formula] = []
    for _, node, _ in walk(f):
        if isinstance(node, (Input, Const)):
            out.append(node)
        elif isinstance(node, Not):
            out.append(Not(out.pop()))
        else:
            right, left = out.pop(), out.pop()
            out.append(Gate(node.op, noise, left, right))
    return out.pop()


# ---------------------------------------------------------------------------
# Boolean functions
# ---------------------------------------------------------------------------


def dependent_bits(truth_table) -> set[int]:
    """Variables (1-based) the function depends on.

    Bit ``i - 1`` of a table index is the value of ``x_i``.
    """
    table = [int(bool(v)) for v in truth_table]
    size = len(table)
    if size == 0 or size & (size - 1):
        raise ValueError("truth table length must be a power of two")
    n = size.bit_length() - 1
    if n > 16:
        raise ValueError("at most 16 inputs are supported")
    deps = set()
    for i in range(n):
        mask = 1 << i
        if any(table[x] != table[x ^ mask] for x in range(size) if not x & mask):
            deps.add(i + 1)
    return deps


def truth_table(f: Formula, names: list[str]) -> list[int]:
    """Noise-free truth table of ``f`` with ``names[i]`` as bit ``i``."""
    out = []
    for idx in range(2 ** len(names)):
        assignment = {name: (idx >> i) & 1 for i, name in enumerate(names)}
        out.append(evaluate(f, assignment))
    return out


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at position {position}")


_TOKEN_RE = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")
_NUMBER_RE = re.compile(r"^\d+(?:\.\d+)?(?:/\d+)?$")
_SYMBOLS = {"b2": BETA2, "x0": X0, "sqrt7": SQRT7}


def parse_number(text: str):
    """Parse a noise expression: ``0.1``, ``1/10``, ``b2``, ``b2+1/100``, ``3/4-1/4*sqrt7``."""
    text = text.replace(" ", "")
    terms = re.findall(r"[+-]?[^+-]+", text)
    if not terms or "".join(terms) != text:
        raise ValueError(f"bad number {text!r}")
    total = SurdNumber(0)
    for term in terms:
        sign = -1 if term.startswith("-") else 1
        value = SurdNumber(1)
        for factor in term.lstrip("+-").split("*"):
            if factor in _SYMBOLS:
                value = value * _SYMBOLS[factor]
            elif _NUMBER_RE.match(factor):
                value = value * Fraction(factor)
            else:
                raise ValueError(f"bad factor {factor!r} in {text!r}")
        total = total + value * sign
    return total.rat if total.is_rational else total


def render_number(x) -> str:
    if isinstance(x, SurdNumber) and not x.is_rational:
        if x == BETA2:
            return "b2"
        if x == X0:
            return "x0"
        # sqrt7 = 3 - 4*b2, written in terms of b2 when that reads shorter
        p, q = x.rat + 3 * x.surd_coeff, -4 * x.surd_coeff
        sign = "-" if q < 0 else "+"
        coeff = "" if abs(q) == 1 else f"{render_rational(abs(q))}*"
        return f"{render_rational(p)}{sign}{coeff}b2" if p != 0 else f"{'-' if q < 0 else ''}{coeff}b2"
    if isinstance(x, SurdNumber):
        x = x.rat
    return render_rational(x)


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise FormulaSyntaxError("unexpected character", pos)
        start = m.start(m.lastindex)
        tokens.append((m.group(m.lastindex), start))
        pos = m.end()
    return tokens


def parse_formula(text: str) -> Formula:
    tokens = _tokenize(text)
    node, i = _parse_node(tokens, 0, len(text))
    if i != len(tokens):
        raise FormulaSyntaxError("trailing input", tokens[i][1])
    return node


def _expect(tokens, i, end_pos):
    if i >= len(tokens):
        raise FormulaSyntaxError("unexpected end of input", end_pos)
    return tokens[i]


def _parse_node(tokens, i, end_pos):
    tok, pos = _expect(tokens, i, end_pos)
    if tok != "(":
        raise FormulaSyntaxError(f"expected '(' but found {tok!r}", pos)
    head, hpos = _expect(tokens, i + 1, end_pos)
    i += 2
    if head == "in":
        name, npos = _expect(tokens, i, end_pos)
        if name in "()":
            raise FormulaSyntaxError("expected input name", npos)
        node, i = Input(name), i + 1
    elif head == "const":
        bit, bpos = _expect(tokens, i, end_pos)
        if bit not in ("0", "1"):
            raise FormulaSyntaxError("constant must be 0 or 1", bpos)
        node, i = Const(int(bit)), i + 1
    elif head == "not":
        child, i = _parse_node(tokens, i, end_pos)
        node = Not(child)
    else:
        try:
            op = GateOp.named(head)
        except ValueError:
            raise FormulaSyntaxError(f"unknown gate {head!r}", hpos) from None
        ntok, npos = _expect(tokens, i, end_pos)
        try:
            noise = parse_number(ntok)
        except ValueError as exc:
            raise FormulaSyntaxError(str(exc), npos) from None
        left, i = _parse_node(tokens, i + 1, end_pos)
        right, i = _parse_node(tokens, i, end_pos)
        try:
            node = Gate(op, noise, left, right)
        except ValueError as exc:
            raise FormulaSyntaxError(str(exc), npos) from None
    tok, pos = _expect(tokens, i, end_pos)
    if tok != ")":
        raise FormulaSyntaxError(f"expected ')' but found {tok!r}", pos)
    return node, i + 1


def render_formula(f: Formula) -> str:
    out: list[str] = []
    for _, node, _ in walk(f):
        if isinstance(node, Input):
            out.append(f"(in {node.name})")
        elif isinstance(node, Const):
            out.append(f"(const {node.bit})")
        elif isinstance(node, Not):
            out.append(f"(not {out.pop()})")
        else:
            right, left = out.pop(), out.pop()
            out.append(f"({node.op.name} {render_number(node.noise)} {left} {right})")
    return out.pop()


def all_assignments(names: list[str]) -> Iterator[dict[str, int]]:
    for bits in product((0, 1), repeat=len(names)):
        yield dict(zip(names, bits))
