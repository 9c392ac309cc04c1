"""Monomial and polynomial layer: exact arithmetic, ordering, parsing."""

import random
from fractions import Fraction
from math import comb

import pytest

from jacfact.field import QQ, PrimeField
from jacfact.poly import (
    Monomial,
    ParseError,
    PolyError,
    Polynomial,
    grevlex_key,
    monomial_basis,
)


def P(text, num_vars, field=QQ):
    return Polynomial.parse(text, num_vars, field)


def test_monomial_product_and_degree():
    m = Monomial((2, 0, 1)) * Monomial((0, 3, 1))
    assert m == Monomial((2, 3, 2))
    assert m.degree == 7
    assert m.num_vars == 3


def test_monomial_derivative_pair():
    assert Monomial((2, 1)).derivative_pair(0) == (2, Monomial((1, 1)))
    assert Monomial((2, 1)).derivative_pair(1) == (1, Monomial((2, 0)))
    assert Monomial((2, 0)).derivative_pair(1) is None


def test_monomial_basis_counts():
    for num_vars in (1, 2, 3, 4):
        for degree in (0, 1, 2, 3, 5):
            basis = monomial_basis(num_vars, degree)
            assert len(basis) == comb(degree + num_vars - 1, num_vars - 1)
            assert all(m.degree == degree for m in basis)
            keys = [grevlex_key(m) for m in basis]
            assert keys == sorted(keys, reverse=True), "basis must descend"


def test_monomial_basis_explicit_order():
    # largest first: pure powers of the earliest variable lead
    assert monomial_basis(2, 3) == [
        Monomial((3, 0)),
        Monomial((2, 1)),
        Monomial((1, 2)),
        Monomial((0, 3)),
    ]


def test_parse_render_roundtrip():
    samples = [
        "x0^3 + x1^3",
        "x0^2*x1 - 2*x1^3",
        "1/2*x0^2 + 7",
        "x0*x1*x2 - x2^3 + x0 - 5",
        "0",
    ]
    for text in samples:
        p = P(text, 3)
        assert P(p.render(), 3) == p


def test_parse_rejects_bad_input():
    with pytest.raises(ParseError):
        P("x5 + 1", 2)  # variable out of range
    with pytest.raises(ParseError):
        P("x0 +* x1", 2)
    with pytest.raises(ParseError):
        P("", 2)
    with pytest.raises(ParseError):
        P("x0 @ x1", 2)


def test_parse_positions_are_reported():
    try:
        P("x0 + $", 2)
    except ParseError as exc:
        assert exc.position >= 4
    else:  # pragma: no cover
        raise AssertionError("expected ParseError")


def _random_poly(rng, field, num_vars, max_degree, terms=4):
    p = Polynomial.zero(field, num_vars)
    for _ in range(rng.randrange(terms + 1)):
        exps = tuple(rng.randrange(max_degree + 1) for _ in range(num_vars))
        c = field.from_int(rng.randrange(-5, 6))
        p = p + Polynomial.from_monomial(field, Monomial(exps), c)
    return p


def test_ring_axioms_random():
    rng = random.Random(20240811)
    for _ in range(60):
        a = _random_poly(rng, QQ, 3, 3)
        b = _random_poly(rng, QQ, 3, 3)
        c = _random_poly(rng, QQ, 3, 3)
        assert a * b == b * a
        assert (a + b) * c == a * c + b * c
        assert (a - a).is_zero
        assert a * Polynomial.one(QQ, 3) == a


def test_power():
    p = P("x0 + x1", 2)
    assert p ** 3 == P("x0^3 + 3*x0^2*x1 + 3*x0*x1^2 + x1^3", 2)
    assert p ** 0 == Polynomial.one(QQ, 2)


def test_partial_derivative_product_rule():
    rng = random.Random(7)
    for _ in range(40):
        a = _random_poly(rng, QQ, 2, 3)
        b = _random_poly(rng, QQ, 2, 3)
        for i in range(2):
            lhs = (a * b).partial_derivative(i)
            rhs = a.partial_derivative(i) * b + a * b.partial_derivative(i)
            assert lhs == rhs


def test_degree_and_homogeneity():
    assert P("0", 2).degree() is None
    assert P("x0^2*x1 + x1^3", 2).homogeneous_degree() == 3
    assert P("x0^2*x1", 2).is_homogeneous()
    assert not P("x0 + 1", 2).is_homogeneous()
    with pytest.raises(PolyError):
        P("x0^2 + x1", 2).homogeneous_degree()


def test_linear_substitute_composition_law():
    rng = random.Random(99)
    A = [[Fraction(rng.randrange(-3, 4)) for _ in range(2)] for _ in range(2)]
    B = [[Fraction(rng.randrange(-3, 4)) for _ in range(2)] for _ in range(2)]
    AB = [
        [sum(A[i][k] * B[k][j] for k in range(2)) for j in range(2)]
        for i in range(2)
    ]
    for _ in range(30):
        p = _random_poly(rng, QQ, 2, 3)
        assert p.linear_substitute(AB) == p.linear_substitute(A).linear_substitute(B)


def test_linear_substitute_permutation():
    p = P("x0^2*x1 - x2^3", 3)
    swap01 = [[0, 1, 0], [1, 0, 0], [0, 0, 1]]
    assert p.linear_substitute(swap01) == P("x1^2*x0 - x2^3", 3)


def test_remap_variables_embedding():
    p = P("x0^2 + x1^2", 2)
    q = p.remap_variables(4, [2, 3])
    assert q == P("x2^2 + x3^2", 4)
    assert q.homogeneous_degree() == 2


def test_prime_field_coefficients_wrap():
    f7 = PrimeField(7)
    p = P("x0^2 + 7*x1^2", 2, f7)
    assert p == P("x0^2", 2, f7)
    assert P("3*x0 + 4*x0", 2, f7).is_zero


def test_scale_and_negate():
    p = P("x0^2 - x1", 2)
    assert p.scale(QQ.from_int(-2)) == P("-2*x0^2 + 2*x1", 2)
    assert -p == P("-x0^2 + x1", 2)
