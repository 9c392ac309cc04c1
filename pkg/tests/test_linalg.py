"""Sparse exact linear algebra against a dense Fraction oracle."""

import random
from fractions import Fraction

import pytest

from jacfact.field import QQ, PrimeField
from jacfact.linalg import (
    ResourceBudget,
    SparseRREF,
    check_budget,
    kernel_basis,
    rank_of_rows,
    solve,
    vec_add_scaled,
)


def dense_rank(matrix):
    """Plain Gaussian elimination over Fraction, kept deliberately dumb."""
    m = [[Fraction(x) for x in row] for row in matrix]
    rank = 0
    cols = len(m[0]) if m else 0
    for col in range(cols):
        pivot = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = 1 / m[rank][col]
        m[rank] = [inv * x for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                factor = m[r][col]
                m[r] = [a - factor * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def sparsify(dense):
    return [
        {j: Fraction(x) for j, x in enumerate(row) if x != 0} for row in dense
    ]


def random_dense(rng, rows, cols, density=0.6):
    return [
        [rng.randrange(-4, 5) if rng.random() < density else 0 for _ in range(cols)]
        for _ in range(rows)
    ]


def test_rank_matches_dense_oracle():
    rng = random.Random(1234)
    for _ in range(50):
        rows = rng.randrange(1, 7)
        cols = rng.randrange(1, 7)
        dense = random_dense(rng, rows, cols)
        assert rank_of_rows(QQ, sparsify(dense)) == dense_rank(dense)


def test_rref_pivots_are_canonical():
    rref = SparseRREF(QQ)
    rref.extend(sparsify([[2, 4, 0], [1, 2, 1], [0, 0, 3]]))
    assert rref.rank == 2
    for lead, row in rref.pivot_rows.items():
        assert min(row) == lead
        assert row[lead] == Fraction(1)
    # every pivot column is cleared from all the other stored rows
    for col in rref.pivot_columns():
        hits = sum(1 for row in rref.pivot_rows.values() if col in row)
        assert hits == 1


def test_reduce_is_idempotent():
    rng = random.Random(55)
    rref = SparseRREF(QQ)
    rref.extend(sparsify(random_dense(rng, 4, 5)))
    probe = sparsify(random_dense(rng, 1, 5))[0]
    once = rref.reduce(dict(probe))
    twice = rref.reduce(dict(once))
    assert once == twice


def test_kernel_vectors_annihilate():
    rng = random.Random(77)
    for _ in range(30):
        rows = rng.randrange(1, 6)
        cols = rng.randrange(1, 6)
        dense = random_dense(rng, rows, cols)
        kernel = kernel_basis(QQ, sparsify(dense), cols)
        assert len(kernel) == cols - dense_rank(dense)
        for vec in kernel:
            assert vec, "kernel basis vector must be nonzero"
            for row in dense:
                image = sum(Fraction(row[j]) * c for j, c in vec.items())
                assert image == 0


def test_solve_consistent_and_inconsistent():
    rng = random.Random(31)
    for _ in range(30):
        rows = rng.randrange(1, 6)
        cols = rng.randrange(1, 6)
        dense = random_dense(rng, rows, cols)
        x = [Fraction(rng.randrange(-3, 4)) for _ in range(cols)]
        rhs = [sum(Fraction(a) * b for a, b in zip(row, x)) for row in dense]
        sol = solve(QQ, sparsify(dense), rhs, cols)
        assert sol is not None
        for row, b in zip(dense, rhs):
            assert sum(Fraction(row[j]) * c for j, c in sol.items()) == b
    # x0 = 0 and x0 = 1 cannot both hold
    assert solve(QQ, sparsify([[1], [1]]), [Fraction(0), Fraction(1)], 1) is None


def test_solve_over_prime_field():
    f = PrimeField(10007)
    rows = sparsify([[1, 2], [3, 4]])
    recoded = [
        {j: f.from_fraction(c) for j, c in row.items()} for row in rows
    ]
    rhs = [f.from_int(5), f.from_int(6)]
    sol = solve(f, recoded, rhs, 2)
    assert sol is not None
    for row, b in zip(recoded, rhs):
        total = f.zero()
        for j, c in row.items():
            total = f.add(total, f.mul(c, sol.get(j, f.zero())))
        assert f.eq(total, b)


def test_vec_add_scaled_mutates_and_drops_zeros():
    u = {0: Fraction(1), 2: Fraction(3)}
    v = {0: Fraction(-1, 2), 1: Fraction(2)}
    vec_add_scaled(QQ, u, v, Fraction(2))
    assert u == {2: Fraction(3), 1: Fraction(4)}


def test_budget_guard():
    check_budget(10, 10, None, "unbounded")
    check_budget(10, 10, 100, "fits")
    with pytest.raises(ResourceBudget) as info:
        check_budget(20, 20, 100, "matrix build")
    err = info.value
    assert err.needed == 400 and err.budget == 100
    assert "matrix build" in str(err)
