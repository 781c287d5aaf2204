"""Sparse multivariate polynomials with coefficients in Q(sqrt7)."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from ..numeric import RationalInterval, SurdNumber, to_interval

Exponent = tuple[int, ...]


class MultiPoly:
    """Polynomial over an ordered tuple of variable names.

    ``terms`` maps exponent vectors to non-zero :class:`SurdNumber`
    coefficients.  All arithmetic is exact.
    """

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Iterable[str], terms: Mapping[Exponent, object] | None = None):
        self.variables = tuple(variables)
        clean: dict[Exponent, SurdNumber] = {}
        for exp, c in (terms or {}).items():
            c = SurdNumber.lift(c)
            if len(exp) != len(self.variables):
                raise ValueError(f"exponent {exp} does not match variables {self.variables}")
            if c:
                clean[tuple(exp)] = c
        self.terms = clean

    # construction ---------------------------------------------------------
    @classmethod
    def constant(cls, variables, c) -> "MultiPoly":
        variables = tuple(variables)
        return cls(variables, {(0,) * len(variables): c})

    @classmethod
    def var(cls, name: str, variables) -> "MultiPoly":
        variables = tuple(variables)
        exp = tuple(int(v == name) for v in variables)
        if sum(exp) != 1:
            raise ValueError(f"{name!r} not among {variables}")
        return cls(variables, {exp: 1})

    def _lift(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.variables != self.variables:
                raise ValueError("polynomials over different variables")
            return other
        if isinstance(other, (int, Fraction, SurdNumber)):
            return MultiPoly.constant(self.variables, other)
        raise TypeError(f"cannot combine MultiPoly with {type(other).__name__}")

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        o = self._lift(other)
        terms = dict(self.terms)
        for exp, c in o.terms.items():
            terms[exp] = terms[exp] + c if exp in terms else c
        return MultiPoly(self.variables, terms)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, SurdNumber)):
            return MultiPoly(self.variables, {e: c * other for e, c in self.terms.items()})
        o = self._lift(other)
        terms: dict[Exponent, SurdNumber] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                terms[e] = terms[e] + c1 * c2 if e in terms else c1 * c2
        return MultiPoly(self.variables, terms)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = MultiPoly.constant(self.variables, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, SurdNumber)):
            other = MultiPoly.constant(self.variables, other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items())))

    # inspection -----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, name: str) -> int:
        i = self.variables.index(name)
        return max((e[i] for e in self.terms), default=0)

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        if not self.terms:
            return "MultiPoly(0)"
        parts = []
        for exp, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(f"{v}^{k}" if k > 1 else v for v, k in zip(self.variables, exp) if k)
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    # transformations ------------------------------------------------------
    def rename(self, mapping: Mapping[str, str]) -> "MultiPoly":
        """Rename variables, keeping the order of ``self.variables``."""
        new_vars = tuple(mapping.get(v, v) for v in self.variables)
        return MultiPoly(new_vars, self.terms)

    def reorder(self, variables) -> "MultiPoly":
        variables = tuple(variables)
        if sorted(variables) != sorted(self.variables):
            raise ValueError("reorder needs a permutation of the variables")
        idx = [self.variables.index(v) for v in variables]
        return MultiPoly(variables, {tuple(e[i] for i in idx): c for e, c in self.terms.items()})

    def swap(self, x: str, y: str) -> "MultiPoly":
        """Exchange the roles of two variables."""
        return self.rename({x: y, y: x}).reorder(self.variables)

    def substitute(self, mapping: Mapping[str, "MultiPoly"], variables) -> "MultiPoly":
        """Compose: replace each variable by a polynomial over ``variables``."""
        variables = tuple(variables)
        images = []
        for v in self.variables:
            img = mapping.get(v)
            if img is None:
                img = MultiPoly.var(v, variables)
            elif not isinstance(img, MultiPoly):
                img = MultiPoly.constant(variables, img)
            images.append(img)
        powers: list[dict[int, MultiPoly]] = [{0: MultiPoly.constant(variables, 1)} for _ in images]

        def power(i: int, k: int) -> MultiPoly:
            cache = powers[i]
            if k not in cache:
                cache[k] = power(i, k - 1) * images[i]
            return cache[k]

        result = MultiPoly(variables)
        for exp, c in self.terms.items():
            term = MultiPoly.constant(variables, c)
            for i, k in enumerate(exp):
                if k:
                    term = term * power(i, k)
            result = result + term
        return result

    def coefficients_in(self, name: str) -> dict[int, "MultiPoly"]:
        """Split as ``sum_k coeff_k * name**k`` with coefficients over the other variables."""
        i = self.variables.index(name)
        rest = self.variables[:i] + self.variables[i + 1 :]
        out: dict[int, dict[Exponent, SurdNumber]] = {}
        for exp, c in self.terms.items():
            out.setdefault(exp[i], {})[exp[:i] + exp[i + 1 :]] = c
        return {k: MultiPoly(rest, t) for k, t in sorted(out.items())}

    def derivative(self, name: str) -> "MultiPoly":
        i = self.variables.index(name)
        terms = {}
        for exp, c in self.terms.items():
            if exp[i]:
                e = list(exp)
                e[i] -= 1
                terms[tuple(e)] = c * exp[i]
        return MultiPoly(self.variables, terms)

    # evaluation -----------------------------------------------------------
    def evaluate(self, point):
        """Exact value at a point (mapping or sequence in variable order)."""
        if isinstance(point, Mapping):
            point = [point[v] for v in self.variables]
        point = [SurdNumber.lift(x) if not isinstance(x, SurdNumber) else x for x in point]
        powers = [[SurdNumber(1)] for _ in point]
        total = SurdNumber(0)
        for exp, c in self.terms.items():
            term = c
            for i, k in enumerate(exp):
                if k:
                    pw = powers[i]
                    while len(pw) <= k:
                        pw.append(pw[-1] * point[i])
                    term = term * pw[k]
            total = total + term
        return total

    def interval(self, box) -> RationalInterval:
        """Natural interval extension, term by term, with tight even powers."""
        ivs = list(box)
        total = RationalInterval.point(0)
        for exp, c in self.terms.items():
            term = to_interval(c)
            for iv, k in zip(ivs, exp):
                if k:
                    term = term * (iv**k)
            total = total + term
        return total
