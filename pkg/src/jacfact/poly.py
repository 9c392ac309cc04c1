"""Sparse multivariate polynomials over an exact field.

Monomials are exponent tuples ordered by graded reverse lexicographic
(grevlex) comparison with ``x0 > x1 > ...``; that order is fixed package
wide so that bases, pivots and reports are reproducible across platforms.
Polynomials are immutable-by-convention sparse term maps with no stored
zero coefficients.

The text grammar (used by the CLI and the corpus files)::

    poly   := [sign] term { sign term }
    term   := factor { ["*"] factor }
    factor := integer | integer "/" integer | var [ "^" integer ]
    var    := "x" index

``*`` may be omitted between a coefficient and a variable (and between
variables); whitespace is insignificant.  Example:
``x0^3 + x1^3 + x2^3 - 3*x0*x1*x2``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .field import Field, QQ

__all__ = [
    "Monomial",
    "Polynomial",
    "PolyError",
    "ParseError",
    "grevlex_key",
    "monomial_basis",
]


class PolyError(ValueError):
    """Invalid polynomial operation (degree/agreement/shape errors)."""


class ParseError(PolyError):
    """Syntax error in the polynomial grammar, with position info."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class Monomial:
    """A monomial x0^e0 * x1^e1 * ... as an exponent tuple."""

    exponents: Tuple[int, ...]

    def __post_init__(self):
        if any(e < 0 for e in self.exponents):
            raise PolyError(f"negative exponent in {self.exponents}")

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    @property
    def num_vars(self) -> int:
        return len(self.exponents)

    def __mul__(self, other: "Monomial") -> "Monomial":
        if len(self.exponents) != len(other.exponents):
            raise PolyError("monomial variable-count mismatch")
        return Monomial(tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def derivative_pair(self, i: int) -> Optional[Tuple[int, "Monomial"]]:
        """(old exponent, monomial with x_i lowered) or None if e_i = 0."""
        e = self.exponents[i]
        if e == 0:
            return None
        lowered = list(self.exponents)
        lowered[i] -= 1
        return e, Monomial(tuple(lowered))

    def render(self) -> str:
        parts = []
        for i, e in enumerate(self.exponents):
            if e == 1:
                parts.append(f"x{i}")
            elif e > 1:
                parts.append(f"x{i}^{e}")
        return "*".join(parts) if parts else "1"

    def __repr__(self) -> str:
        return f"Monomial({self.render()})"


def grevlex_key(m: Monomial) -> Tuple:
    """Sort key realizing grevlex: ascending sort puts smaller monomials first.

    Two monomials compare first by total degree; within a degree,
    ``a > b`` iff the rightmost nonzero entry of ``a - b`` is negative.
    Equivalently, ascending grevlex is ascending lexicographic order on
    the negated, reversed exponent tuple -- which is the key used here.
    """
    return (m.degree, tuple(-e for e in reversed(m.exponents)))


def monomial_basis(num_vars: int, degree: int) -> List[Monomial]:
    """All monomials of the given degree, largest first (descending grevlex).

    The count is C(num_vars - 1 + degree, degree).  This listing order is
    the canonical basis of the degree-``degree`` graded piece everywhere
    in the package.
    """
    if num_vars < 1:
        raise PolyError("need at least one variable")
    if degree < 0:
        raise PolyError("degree must be non-negative")

    out: List[Tuple[int, ...]] = []

    def fill(prefix: List[int], remaining: int, slots: int):
        if slots == 1:
            out.append(tuple(prefix + [remaining]))
            return
        for e in range(remaining, -1, -1):
            fill(prefix + [e], remaining - e, slots - 1)

    fill([], degree, num_vars)
    monos = [Monomial(t) for t in out]
    monos.sort(key=grevlex_key, reverse=True)
    return monos


class Polynomial:
    """Sparse polynomial: a map from Monomial to nonzero field scalar.

    Instances are immutable by convention; every operation returns a new
    canonicalized polynomial (terms stored in descending grevlex order,
    zero coefficients dropped).
    """

    __slots__ = ("field", "num_vars", "terms")

    def __init__(self, field: Field, num_vars: int, terms: Dict[Monomial, object]):
        self.field = field
        self.num_vars = num_vars
        ordered = sorted(terms.items(), key=lambda kv: grevlex_key(kv[0]), reverse=True)
        self.terms = {m: c for m, c in ordered if not field.is_zero(c)}

    # ---------------------------------------------------------------- build
    @classmethod
    def zero(cls, field: Field, num_vars: int) -> "Polynomial":
        return cls(field, num_vars, {})

    @classmethod
    def constant(cls, field: Field, num_vars: int, c) -> "Polynomial":
        return cls(field, num_vars, {Monomial((0,) * num_vars): c})

    @classmethod
    def one(cls, field: Field, num_vars: int) -> "Polynomial":
        return cls.constant(field, num_vars, field.one())

    @classmethod
    def variable(cls, field: Field, num_vars: int, i: int) -> "Polynomial":
        if not 0 <= i < num_vars:
            raise PolyError(f"variable index {i} out of range for {num_vars} vars")
        exps = [0] * num_vars
        exps[i] = 1
        return cls(field, num_vars, {Monomial(tuple(exps)): field.one()})

    @classmethod
    def from_monomial(cls, field: Field, m: Monomial, c=None) -> "Polynomial":
        return cls(field, m.num_vars, {m: field.one() if c is None else c})

    # ---------------------------------------------------------------- query
    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> Optional[int]:
        """Total degree, or None for the zero polynomial."""
        if not self.terms:
            return None
        return max(m.degree for m in self.terms)

    def homogeneous_degree(self) -> Optional[int]:
        """The common degree of all terms; None for zero; error if mixed."""
        degrees = {m.degree for m in self.terms}
        if not degrees:
            return None
        if len(degrees) > 1:
            raise PolyError(
                f"polynomial is not homogeneous (degrees {sorted(degrees)})"
            )
        return degrees.pop()

    def is_homogeneous(self) -> bool:
        return len({m.degree for m in self.terms}) <= 1

    def leading_monomial(self) -> Monomial:
        if not self.terms:
            raise PolyError("zero polynomial has no leading monomial")
        return next(iter(self.terms))

    def coefficient(self, m: Monomial):
        return self.terms.get(m, self.field.zero())

    def _check_compatible(self, other: "Polynomial"):
        if self.field != other.field:
            raise PolyError("field mismatch")
        if self.num_vars != other.num_vars:
            raise PolyError("variable-count mismatch")

    # ----------------------------------------------------------- arithmetic
    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check_compatible(other)
        F = self.field
        acc = dict(self.terms)
        for m, c in other.terms.items():
            acc[m] = F.add(acc.get(m, F.zero()), c)
        return Polynomial(F, self.num_vars, acc)

    def __neg__(self) -> "Polynomial":
        F = self.field
        return Polynomial(F, self.num_vars, {m: F.neg(c) for m, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def scale(self, c) -> "Polynomial":
        F = self.field
        if F.is_zero(c):
            return Polynomial.zero(F, self.num_vars)
        return Polynomial(F, self.num_vars, {m: F.mul(coef, c) for m, coef in self.terms.items()})

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check_compatible(other)
        F = self.field
        acc: Dict[Monomial, object] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 * m2
                prod = F.mul(c1, c2)
                acc[m] = F.add(acc.get(m, F.zero()), prod)
        return Polynomial(F, self.num_vars, acc)

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise PolyError("negative power")
        result = Polynomial.one(self.field, self.num_vars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return (
            self.field == other.field
            and self.num_vars == other.num_vars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.field, self.num_vars, tuple(self.terms.items())))

    # ------------------------------------------------------------- calculus
    def partial_derivative(self, i: int) -> "Polynomial":
        """Formal partial derivative with respect to x_i."""
        if not 0 <= i < self.num_vars:
            raise PolyError(f"variable index {i} out of range for {self.num_vars} vars")
        F = self.field
        acc: Dict[Monomial, object] = {}
        for m, c in self.terms.items():
            pair = m.derivative_pair(i)
            if pair is None:
                continue
            e, lowered = pair
            contrib = F.mul(c, F.from_int(e))
            acc[lowered] = F.add(acc.get(lowered, F.zero()), contrib)
        return Polynomial(F, self.num_vars, acc)

    def linear_substitute(self, matrix: Sequence[Sequence[object]]) -> "Polynomial":
        """Substitute x_i -> sum_j matrix[i][j] * x_j (row i = image of x_i).

        With this convention the composition law reads
        ``p.linear_substitute(A @ B) ==
        p.linear_substitute(A).linear_substitute(B)``.
        """
        n = self.num_vars
        if len(matrix) != n or any(len(row) != n for row in matrix):
            raise PolyError("substitution matrix shape mismatch")
        F = self.field
        images = [
            Polynomial(F, n, {
                Monomial(tuple(1 if k == j else 0 for k in range(n))): row[j]
                for j in range(n)
            })
            for row in matrix
        ]
        result = Polynomial.zero(F, n)
        for m, c in self.terms.items():
            term = Polynomial.constant(F, n, c)
            for i, e in enumerate(m.exponents):
                if e:
                    term = term * (images[i] ** e)
            result = result + term
        return result

    def remap_variables(self, num_vars_new: int, index_map: Sequence[int]) -> "Polynomial":
        """Relabel variable i as index_map[i] inside a (possibly larger) ring."""
        if len(index_map) != self.num_vars:
            raise PolyError("index map length mismatch")
        if any(not 0 <= j < num_vars_new for j in index_map):
            raise PolyError("index map target out of range")
        acc: Dict[Monomial, object] = {}
        F = self.field
        for m, c in self.terms.items():
            exps = [0] * num_vars_new
            for i, e in enumerate(m.exponents):
                exps[index_map[i]] += e
            key = Monomial(tuple(exps))
            acc[key] = F.add(acc.get(key, F.zero()), c)
        return Polynomial(F, num_vars_new, acc)

    # -------------------------------------------------------------- text IO
    def render(self) -> str:
        """Canonical string; parse(render(p)) == p."""
        if not self.terms:
            return "0"
        F = self.field
        pieces = []
        for idx, (m, c) in enumerate(self.terms.items()):
            text = F.render(c)
            negative = text.startswith("-")
            mag = text[1:] if negative else text
            if m.degree == 0:
                body = mag
            elif mag == "1":
                body = m.render()
            else:
                body = f"{mag}*{m.render()}"
            if idx == 0:
                pieces.append(f"-{body}" if negative else body)
            else:
                pieces.append(f" - {body}" if negative else f" + {body}")
        return "".join(pieces)

    def __repr__(self) -> str:
        return f"Polynomial({self.render()!r})"

    @staticmethod
    def parse(text: str, num_vars: int, field: Field = QQ) -> "Polynomial":
        """Parse the package grammar; see the module docstring."""
        return _parse(text, num_vars, field)


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|(x\d+)|([+\-*^/]))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            if text[pos:].strip() == "":
                break
            bad = len(text) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        number, var, op = match.groups()
        if number is not None:
            tokens.append(("int", int(number), match.start(1)))
        elif var is not None:
            tokens.append(("var", int(var[1:]), match.start(2)))
        else:
            tokens.append(("op", op, match.start(3)))
        pos = match.end()
    tokens.append(("end", None, len(text)))
    return tokens


def _parse(text: str, num_vars: int, field: Field) -> Polynomial:
    tokens = _tokenize(text)
    cursor = 0

    def peek():
        return tokens[cursor]

    def advance():
        nonlocal cursor
        tok = tokens[cursor]
        cursor += 1
        return tok

    def parse_int(context: str) -> int:
        kind, value, pos = advance()
        if kind != "int":
            raise ParseError(f"expected integer {context}", pos)
        return value

    def parse_factor() -> Polynomial:
        kind, value, pos = peek()
        if kind == "int":
            advance()
            numerator = value
            if peek()[0] == "op" and peek()[1] == "/":
                advance()
                denominator = parse_int("after '/'")
                if denominator == 0:
                    raise ParseError("zero denominator", pos)
                scalar = field.from_fraction(Fraction(numerator, denominator))
            else:
                scalar = field.from_int(numerator)
            return Polynomial.constant(field, num_vars, scalar)
        if kind == "var":
            advance()
            if value >= num_vars:
                raise ParseError(
                    f"variable x{value} out of range (numVars = {num_vars})", pos
                )
            exponent = 1
            if peek()[0] == "op" and peek()[1] == "^":
                advance()
                exponent = parse_int("after '^'")
            exps = [0] * num_vars
            exps[value] = exponent
            return Polynomial(field, num_vars, {Monomial(tuple(exps)): field.one()})
        raise ParseError("expected a coefficient or variable", pos)

    def parse_term() -> Polynomial:
        result = parse_factor()
        while True:
            kind, value, _ = peek()
            if kind == "op" and value == "*":
                advance()
                result = result * parse_factor()
            elif kind in ("int", "var"):
                # implicit multiplication: 3x0, x0x1
                result = result * parse_factor()
            else:
                return result

    result = Polynomial.zero(field, num_vars)
    first = True
    while True:
        kind, value, pos = peek()
        if kind == "end":
            if first:
                raise ParseError("empty polynomial", pos)
            break
        sign = 1
        if kind == "op" and value in "+-":
            advance()
            sign = -1 if value == "-" else 1
        elif not first:
            raise ParseError("expected '+' or '-' between terms", pos)
        term = parse_term()
        result = result + (term.scale(field.from_int(-1)) if sign < 0 else term)
        first = False
    return result
