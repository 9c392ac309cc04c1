"""Exact coefficient fields: arbitrary-precision rationals and prime fields.

Every algebraic object in this package carries a ``Field`` instance and
stores its scalars as plain Python values: :class:`fractions.Fraction` for
the rationals, ints in ``[0, p)`` for a prime field.  Routing all arithmetic
through the field object keeps the polynomial and linear-algebra layers
generic while staying exact -- there is no floating point anywhere.

The prime-field mode exists purely as a fast proxy for rational
computations; results over F_p are about the reduction mod p and are
flagged as such in reports.  The modulus must be a prime > 3 so that the
small integer constants showing up in derivative and degree bookkeeping
stay invertible.
"""

from __future__ import annotations

from fractions import Fraction

__all__ = [
    "Field",
    "RationalField",
    "PrimeField",
    "QQ",
    "FieldError",
    "is_prime",
    "parse_field_spec",
]


class FieldError(ValueError):
    """Raised for invalid field configurations or impossible coercions."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test.

    The fixed witness set is known to be exact for every ``n`` below
    3.3e24, far beyond any modulus this package will see.
    """
    if n < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % small == 0:
            return n == small
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class Field:
    """Abstract exact field interface.

    Concrete fields implement the arithmetic on raw scalar values; callers
    never need to know whether a scalar is a ``Fraction`` or an int mod p.
    """

    name: str = "?"

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def from_int(self, n: int):
        raise NotImplementedError

    def from_fraction(self, q: Fraction):
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        raise NotImplementedError

    def eq(self, a, b) -> bool:
        return self.is_zero(self.sub(a, b))

    def render(self, a) -> str:
        """Canonical decimal-free string for a scalar (``num/den`` style)."""
        raise NotImplementedError

    def __repr__(self) -> str:  # pragma: no cover - debug aid
        return f"<Field {self.name}>"


class RationalField(Field):
    """The rationals with arbitrary-precision integer arithmetic."""

    name = "q"

    def zero(self) -> Fraction:
        return Fraction(0)

    def one(self) -> Fraction:
        return Fraction(1)

    def from_int(self, n: int) -> Fraction:
        return Fraction(n)

    def from_fraction(self, q: Fraction) -> Fraction:
        return Fraction(q)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a)

    def is_zero(self, a) -> bool:
        return a == 0

    def render(self, a) -> str:
        return str(Fraction(a))

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalField)

    def __hash__(self) -> int:
        return hash("field:q")


class PrimeField(Field):
    """F_p for a prime p > 3; scalars are ints reduced to [0, p)."""

    def __init__(self, p: int):
        if not is_prime(p):
            raise FieldError(f"prime-field modulus {p} is not prime")
        if p <= 3:
            raise FieldError(
                f"prime-field modulus must exceed 3 (got {p}); small "
                "characteristics collide with degree constants"
            )
        self.p = p
        self.name = f"fp:{p}"

    def zero(self) -> int:
        return 0

    def one(self) -> int:
        return 1

    def from_int(self, n: int) -> int:
        return n % self.p

    def from_fraction(self, q: Fraction) -> int:
        den = q.denominator % self.p
        if den == 0:
            raise FieldError(
                f"denominator {q.denominator} vanishes mod {self.p}"
            )
        return q.numerator * pow(den, -1, self.p) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def is_zero(self, a) -> bool:
        return a % self.p == 0

    def render(self, a) -> str:
        return str(a % self.p)

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("field:fp", self.p))


QQ = RationalField()


def parse_field_spec(spec: str) -> Field:
    """Parse a CLI field spec: ``q`` or ``fp:<p>`` with p a prime > 3."""
    spec = spec.strip().lower()
    if spec in ("q", "qq", "rational", "rationals"):
        return QQ
    if spec.startswith("fp:"):
        try:
            p = int(spec[3:])
        except ValueError as exc:
            raise FieldError(f"bad prime in field spec {spec!r}") from exc
        return PrimeField(p)
    raise FieldError(f"unknown field spec {spec!r} (expected q or fp:<p>)")
