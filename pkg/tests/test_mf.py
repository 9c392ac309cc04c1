"""Graded matrix factorizations: axioms, shifts, homotopies, hom spaces."""

import pytest

from jacfact.field import QQ, PrimeField
from jacfact.linalg import ResourceBudget
from jacfact.mf import (
    MatrixFactorization,
    MFError,
    chain_rule_homotopy,
    compare_with_jacobian,
    compose,
    difference_quotients,
    direct_sum,
    hom_space,
    is_null_homotopic,
    koszul_mf,
    lmf_ring,
    mf_from_text,
    mf_to_text,
    mult_by_section,
    stabilized_diagonal,
    termwise_decomposition,
)
from jacfact.poly import Polynomial


def P(text, num_vars, field=QQ):
    return Polynomial.parse(text, num_vars, field)


def binary_cubic(field=QQ):
    return P("x0^3 + x1^3", 2, field)


def koszul_binary_cubic(field=QQ):
    f = binary_cubic(field)
    return koszul_mf(f, termwise_decomposition(f))


def test_termwise_decomposition_recovers_f():
    for text, n in [("x0^3 + x1^3", 2), ("x0^2*x1 + x2^3 - x0*x1*x2", 3)]:
        f = P(text, n)
        pairs = termwise_decomposition(f)
        total = Polynomial.zero(QQ, n)
        for a, b in pairs:
            assert a.homogeneous_degree() is not None
            total = total + a * b
        assert total == f


def test_koszul_binary_cubic_matrices():
    mf = koszul_binary_cubic()
    assert mf.twists_k == (0, 1)
    assert mf.twists_l == (-1, -1)
    assert mf.alpha == (
        (P("x0", 2), P("-x1^2", 2)),
        (P("x1", 2), P("x0^2", 2)),
    )
    assert mf.beta == (
        (P("x0^2", 2), P("x1^2", 2)),
        (P("-x1", 2), P("x0", 2)),
    )
    assert mf.validate().ok


def test_validate_reports_tampering():
    mf = koszul_binary_cubic()
    bad = MatrixFactorization(
        f=mf.f,
        d=mf.d,
        twists_k=mf.twists_k,
        twists_l=mf.twists_l,
        alpha=((mf.alpha[0][0], mf.alpha[0][1]), (mf.alpha[1][0], P("x0^2 + x1^2", 2))),
        beta=mf.beta,
    )
    result = bad.validate()
    assert not result.ok
    assert result.first_violation is not None
    assert result.violations


def test_validate_catches_degree_breakage():
    mf = koszul_binary_cubic()
    bad = MatrixFactorization(
        f=mf.f,
        d=mf.d,
        twists_k=(0, 2),  # wrong twist: entry degrees no longer line up
        twists_l=mf.twists_l,
        alpha=mf.alpha,
        beta=mf.beta,
    )
    assert not bad.validate().ok


def test_shift_involution_is_degree_shift():
    for mf in [koszul_binary_cubic(), stabilized_diagonal(binary_cubic())]:
        shifted = mf.shift()
        assert shifted.validate().ok
        assert shifted.shift() == mf.degree_shift(mf.d)
        assert shifted != mf


def test_degree_shift_lowers_twists():
    mf = koszul_binary_cubic()
    moved = mf.degree_shift(2)
    assert moved.twists_k == tuple(a - 2 for a in mf.twists_k)
    assert moved.twists_l == tuple(a - 2 for a in mf.twists_l)
    assert moved.validate().ok
    assert moved.degree_shift(-2) == mf


def test_direct_sum_validates():
    a = koszul_binary_cubic()
    b = stabilized_diagonal(binary_cubic())
    b_flat = koszul_mf(binary_cubic(), termwise_decomposition(binary_cubic()))
    total = direct_sum(a, b_flat)
    assert total.rank == (a.rank[0] + b_flat.rank[0], a.rank[1] + b_flat.rank[1])
    assert total.validate().ok
    with pytest.raises(MFError):
        direct_sum(a, b.degree_shift(0) if b.f == a.f else b)  # different potential


def test_difference_quotients_telescope():
    for text, n in [("x0^3 + x1^3", 2), ("x0^2*x1 + x1^3", 2), ("x0^4 + x1^4", 2)]:
        f = P(text, n)
        quotients = difference_quotients(f)
        f_x = f.remap_variables(2 * n, list(range(n)))
        f_y = f.remap_variables(2 * n, list(range(n, 2 * n)))
        total = Polynomial.zero(QQ, 2 * n)
        for i, q in enumerate(quotients):
            step = P(f"x{n + i} - x{i}", 2 * n)
            total = total + step * q
        assert total == f_y - f_x


def test_stabilized_diagonal_is_a_factorization():
    q0 = stabilized_diagonal(P("x0^3 + x1^3 + x2^3", 3))
    assert q0.num_vars == 6
    assert q0.validate().ok


def test_mult_by_section_and_composition():
    q0 = stabilized_diagonal(binary_cubic())
    x0 = P("x0", 4)
    x1 = P("x1", 4)
    m0 = mult_by_section(q0, x0)
    m1 = mult_by_section(q0, x1)
    assert m0.validate().ok and m1.validate().ok
    assert m0.twist == 1
    product = mult_by_section(q0, x0 * x1)
    assert compose(m0, m1) == product
    assert compose(m1, m0) == product


def test_mult_by_potential_is_null_homotopic():
    q0 = stabilized_diagonal(binary_cubic())
    f_embedded = binary_cubic().remap_variables(4, [0, 1])
    m = mult_by_section(q0, f_embedded)
    certificate = is_null_homotopic(m)
    assert certificate is not None
    assert certificate.boundary() == m


def test_identity_is_not_null_homotopic():
    q0 = stabilized_diagonal(binary_cubic())
    one = mult_by_section(q0, Polynomial.one(QQ, 4), degree=0)
    assert is_null_homotopic(one) is None


def test_chain_rule_certificates_everywhere():
    objects = [koszul_binary_cubic(), stabilized_diagonal(binary_cubic())]
    for mf in objects:
        for i in range(mf.num_vars):
            partial = mf.f.partial_derivative(i)
            homotopy = chain_rule_homotopy(mf, i)
            assert homotopy.boundary() == mult_by_section(
                mf, partial, degree=mf.d - 1
            )


def test_chain_rule_on_six_variable_koszul():
    f = P("x0^3 + x1^3 + x2^3 + x3^3 + x4^3 + x5^3", 6)
    mf = koszul_mf(f, termwise_decomposition(f))
    assert mf.rank == (32, 32)
    assert mf.validate().ok
    homotopy = chain_rule_homotopy(mf, 0)
    assert homotopy.boundary() == mult_by_section(
        mf, f.partial_derivative(0), degree=2
    )


def test_hom_dimensions_of_stabilized_diagonal():
    q0 = stabilized_diagonal(binary_cubic())
    dims = [hom_space(q0, q0, ell).dimension for ell in range(4)]
    assert dims == [1, 2, 1, 0]


def test_hom_dimension_shift_invariance():
    q0 = stabilized_diagonal(binary_cubic())
    shifted = q0.shift()
    for ell in range(3):
        assert (
            hom_space(q0, q0, ell).dimension
            == hom_space(shifted, shifted, ell).dimension
        )


def test_hom_space_classes():
    q0 = stabilized_diagonal(binary_cubic())
    space = hom_space(q0, q0, 1)
    x0 = mult_by_section(q0, P("x0", 4))
    x1 = mult_by_section(q0, P("x1", 4))
    c0 = space.class_of(x0)
    c1 = space.class_of(x1)
    assert c0 != c1
    assert not space.is_zero_class(x0)
    assert space.is_zero_class(x0 - x0)
    # classes are linear: [x0 + x1] = [x0] + [x1]
    both = space.class_of(mult_by_section(q0, P("x0 + x1", 4)))
    assert both == tuple(QQ.add(a, b) for a, b in zip(c0, c1))


def test_lmf_ring_matches_jacobian_multiplication():
    ring = lmf_ring(binary_cubic(), 2)
    assert ring.dims() == (1, 2, 1)
    ell0, one_class = ring.section_class(Polynomial.one(QQ, 2))
    assert ell0 == 0 and any(not QQ.is_zero(c) for c in one_class)
    lx0 = ring.section_class(P("x0", 2))
    lx1 = ring.section_class(P("x1", 2))
    prod = ring.product(lx0[0], lx0[1], lx1[0], lx1[1])
    direct = ring.section_class(P("x0*x1", 2))
    assert prod == direct[1]


def test_compare_with_jacobian_binary_cubic():
    result = compare_with_jacobian(binary_cubic(), 2)
    assert result["ok"]
    assert result["dims_hom"] == (1, 2, 1)
    assert result["subring_dims"] == (1, 2, 1)
    assert result["injective"]
    assert result["multiplication_matches"]
    assert all(result["chain_rule_certificates"])


def test_compare_with_jacobian_prime_field():
    field = PrimeField(1000003)
    result = compare_with_jacobian(binary_cubic(field), 2)
    assert result["ok"]
    assert result["dims_hom"] == (1, 2, 1)


def test_serialization_roundtrip():
    for mf in [koszul_binary_cubic(), stabilized_diagonal(binary_cubic())]:
        text = mf_to_text(mf)
        again = mf_from_text(text, QQ)
        assert again == mf
        assert again.validate().ok


def test_serialization_rejects_garbage():
    with pytest.raises((MFError, ValueError)):
        mf_from_text("not even close\n", QQ)
    mf = koszul_binary_cubic()
    text = mf_to_text(mf).replace("degree 3", "degree 4", 1)
    with pytest.raises((MFError, ValueError)):
        mf_from_text(text, QQ)


def test_budget_guards_hom_solvers():
    q0 = stabilized_diagonal(binary_cubic())
    with pytest.raises(ResourceBudget):
        hom_space(q0, q0, 1, budget=2)
    f_embedded = binary_cubic().remap_variables(4, [0, 1])
    with pytest.raises(ResourceBudget):
        is_null_homotopic(mult_by_section(q0, f_embedded), budget=2)


def test_koszul_rejects_bad_pairs():
    f = binary_cubic()
    with pytest.raises(MFError):
        koszul_mf(f, [(P("x0", 2), P("x0^2", 2))])  # sum is not f
