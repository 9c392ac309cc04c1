"""Integer lattices: normal forms, isometry groups, glue, orientation."""

import random
from fractions import Fraction

import pytest

from jacfact.lattice import (
    DiscriminantGroup,
    Isometry,
    Lattice,
    LatticeError,
    apply_disc_matrix,
    degree_shift_isometry,
    discriminant_action,
    find_orientation_preserving_lift,
    hermite_row_basis,
    hexagonal_lattice,
    identity_glue,
    integer_det,
    nikulin_extend,
    orientation_sign,
    orthogonal_group,
    orthogonal_sum,
    overlattice_from_glue,
    rescale,
    smith_normal_form,
)

A2 = ((2, -1), (-1, 2))
A2_NEG = ((-2, 1), (1, -2))
U = ((0, 1), (1, 0))


def mat_mul(a, b):
    return [
        [sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
        for i in range(len(a))
    ]


def dense_det(matrix):
    m = [[Fraction(x) for x in row] for row in matrix]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            factor = m[r][col] * inv
            m[r] = [a - factor * b for a, b in zip(m[r], m[col])]
    return det


def random_int_matrix(rng, rows, cols, bound=5):
    return [
        [rng.randrange(-bound, bound + 1) for _ in range(cols)]
        for _ in range(rows)
    ]


# ------------------------------------------------------------- normal forms

def test_integer_det_matches_fraction_oracle():
    rng = random.Random(404)
    for _ in range(40):
        n = rng.randrange(1, 5)
        m = random_int_matrix(rng, n, n)
        assert integer_det(m) == dense_det(m)


def test_smith_normal_form_properties():
    rng = random.Random(808)
    for _ in range(40):
        rows = rng.randrange(1, 5)
        cols = rng.randrange(1, 5)
        m = random_int_matrix(rng, rows, cols)
        u, d, v = smith_normal_form(m)
        assert mat_mul(mat_mul(u, m), v) == d
        assert abs(integer_det(u)) == 1
        assert abs(integer_det(v)) == 1
        diag = [d[i][i] for i in range(min(rows, cols))]
        for i in range(rows):
            for j in range(cols):
                if i != j:
                    assert d[i][j] == 0
        assert all(x >= 0 for x in diag)
        for a, b in zip(diag, diag[1:]):
            if a != 0:
                assert b % a == 0 or b == 0


def test_smith_normal_form_known_case():
    _, d, _ = smith_normal_form([[2, 0], [0, 3]])
    assert [d[0][0], d[1][1]] == [1, 6]


def test_hermite_row_basis_is_canonical():
    rng = random.Random(909)
    for _ in range(30):
        rows = rng.randrange(1, 5)
        cols = rng.randrange(1, 5)
        m = random_int_matrix(rng, rows, cols)
        h = hermite_row_basis(m)
        # canonical under row operations: shuffling and adding rows of m
        noisy = [list(r) for r in m]
        rng.shuffle(noisy)
        if len(noisy) >= 2:
            noisy[0] = [a + 3 * b for a, b in zip(noisy[0], noisy[1])]
        assert hermite_row_basis(noisy) == h
        assert hermite_row_basis(h) == h
        # pivots positive, entries above each pivot reduced
        for i, row in enumerate(h):
            lead = next(j for j, x in enumerate(row) if x != 0)
            assert row[lead] > 0
            for above in h[:i]:
                assert 0 <= above[lead] < row[lead]


# ------------------------------------------------------------------ lattices

def test_lattice_basic_invariants():
    a2 = Lattice(A2)
    assert (a2.rank, a2.det) == (2, 3)
    assert a2.is_even and a2.is_definite and not a2.is_unimodular
    assert a2.signature() == (2, 0)
    assert a2.norm((1, 0)) == 2
    assert a2.inner((1, 0), (0, 1)) == -1

    u = Lattice(U)
    assert (u.det, u.is_even, u.is_unimodular) == (-1, True, True)
    assert u.signature() == (1, 1)
    assert u.discriminant_group().size == 1

    assert not Lattice(((1, 0), (0, 1))).is_even


def test_lattice_rejects_bad_gram():
    with pytest.raises(LatticeError):
        Lattice(((1, 2), (3, 4)))  # not symmetric
    with pytest.raises(LatticeError):
        Lattice(((1, 0),))  # not square


def test_rescale_and_orthogonal_sum():
    assert rescale(Lattice(A2), -1).gram == A2_NEG
    total = orthogonal_sum(Lattice(A2), Lattice(A2_NEG))
    assert total.rank == 4
    assert total.det == 9
    assert total.signature() == (2, 2)


# ------------------------------------------------------------------- isometry

def test_isometry_validation():
    a2 = Lattice(A2)
    Isometry(a2, ((0, -1), (1, -1)))  # fine
    with pytest.raises(LatticeError):
        Isometry(a2, ((1, 1), (0, 1)))  # shear moves the form
    with pytest.raises(LatticeError):
        Isometry(a2, ((2, 0), (0, 2)))


def test_orthogonal_group_of_hexagonal_lattice():
    a2 = hexagonal_lattice()
    group = orthogonal_group(a2)
    assert len(group) == 12
    assert sum(1 for iso in group if iso.det == 1) == 6
    matrices = {iso.matrix for iso in group}
    assert Isometry.minus_identity(a2).matrix in matrices
    # closed under composition and inverse
    for a in group:
        assert a.inverse().matrix in matrices
        for b in group:
            assert a.compose(b).matrix in matrices


def test_orthogonal_group_of_diagonal_lattice():
    group = orthogonal_group(Lattice(((2, 0), (0, 2))))
    assert len(group) == 8  # signed permutations of two axes


def test_restriction_kernel_and_image():
    a2 = hexagonal_lattice()
    group = orthogonal_group(a2)
    actions = [discriminant_action(iso) for iso in group]
    kernel = [iso for iso, t in zip(group, actions) if t == ((1,),)]
    assert len(kernel) == 6
    assert len(set(actions)) == 2  # surjects onto the sign action
    # the kernel is nonabelian ...
    assert any(
        a.compose(b).matrix != b.compose(a).matrix
        for a in kernel
        for b in kernel
    )
    # ... while the rotation subgroup is abelian
    rotations = [iso for iso in group if iso.det == 1]
    assert all(
        a.compose(b).matrix == b.compose(a).matrix
        for a in rotations
        for b in rotations
    )


def test_discriminant_action_is_a_homomorphism():
    a2 = hexagonal_lattice()
    group = orthogonal_group(a2)
    disc = a2.discriminant_group()
    elements = disc.elements()
    for a in group:
        for b in group:
            composed = discriminant_action(a.compose(b))
            ta, tb = discriminant_action(a), discriminant_action(b)
            for e in elements:
                stepwise = apply_disc_matrix(disc, ta, apply_disc_matrix(disc, tb, e))
                assert apply_disc_matrix(disc, composed, e) == stepwise


def test_degree_shift_isometry_facts():
    rot = degree_shift_isometry()
    assert rot.lattice == hexagonal_lattice()
    assert rot.order() == 3
    assert rot.det == 1
    assert discriminant_action(rot) == ((1,),)


# ---------------------------------------------------------------- disc groups

def test_discriminant_group_of_a2():
    disc = Lattice(A2).discriminant_group()
    assert disc.orders == (3,)
    assert disc.size == 3
    gen = disc.generators()[0]
    assert disc.q(gen) == Fraction(2, 3)
    assert disc.b(gen, gen) == Fraction(2, 3)
    assert disc.q(gen + gen) == Fraction(2, 3)  # q(2g) = 4*q(g) mod 2
    assert (gen + gen + gen).is_zero
    assert gen.order() == 3


def test_discriminant_form_identities():
    rng = random.Random(123)
    for gram in [A2, ((2, 0), (0, 2)), ((2, 1), (1, 4))]:
        disc = Lattice(gram).discriminant_group()
        elements = disc.elements()
        for _ in range(20):
            x, y, z = (rng.choice(elements) for _ in range(3))
            # b is symmetric and bilinear mod 1
            assert disc.b(x, y) == disc.b(y, x)
            assert (disc.b(x + y, z) - disc.b(x, z) - disc.b(y, z)) % 1 == 0
            # q refines b: q(x+y) - q(x) - q(y) = 2 b(x,y) mod 2
            assert (disc.q(x + y) - disc.q(x) - disc.q(y) - 2 * disc.b(x, y)) % 2 == 0


def test_disc_element_coordinates_roundtrip():
    disc = Lattice(((2, 0), (0, 2))).discriminant_group()
    assert disc.orders == (2, 2)
    for e in disc.elements():
        assert disc.from_c_vector(disc.c_vector(e)) == e


# ----------------------------------------------------------------------- glue

def test_identity_glue_isotropic_for_opposite_signs():
    glue = identity_glue(
        Lattice(A2).discriminant_group(), Lattice(A2_NEG).discriminant_group()
    )
    assert glue.order == 3
    assert glue.is_injective()
    ok, witness = glue.is_isotropic()
    assert ok and witness is None


def test_identity_glue_fails_for_equal_signs():
    glue = identity_glue(
        Lattice(A2).discriminant_group(), Lattice(A2).discriminant_group()
    )
    ok, witness = glue.is_isotropic()
    assert not ok
    assert witness["sum_mod_2"] == Fraction(4, 3)
    with pytest.raises(LatticeError):
        overlattice_from_glue(Lattice(A2), Lattice(A2), glue)


def test_identity_glue_needs_matching_factors():
    with pytest.raises(LatticeError):
        identity_glue(
            Lattice(A2).discriminant_group(), Lattice(U).discriminant_group()
        )


def test_overlattice_is_even_unimodular():
    l1, l2 = Lattice(A2), Lattice(A2_NEG)
    glue = identity_glue(l1.discriminant_group(), l2.discriminant_group())
    over = overlattice_from_glue(l1, l2, glue)
    lat = over.lattice
    assert lat.rank == 4
    assert lat.is_even and lat.is_unimodular
    assert lat.signature() == (2, 2)
    assert over.index == 3
    # index counts cosets: det(L1) det(L2) = det(L') |H|^2
    assert abs(l1.det * l2.det) == abs(lat.det) * over.index ** 2


def test_overlattice_coordinates_roundtrip():
    l1, l2 = Lattice(A2), Lattice(A2_NEG)
    glue = identity_glue(l1.discriminant_group(), l2.discriminant_group())
    over = overlattice_from_glue(l1, l2, glue)
    for v in [(1, 0, 0, 0), (0, 1, 0, 0), (2, -1, 3, 0)]:
        coords = over.ambient_coords_in_overlattice(v)
        recovered = [
            sum(Fraction(c) * over.basis[i][j] for i, c in enumerate(coords))
            for j in range(4)
        ]
        assert recovered == [Fraction(x) for x in v]


# ------------------------------------------------------------------ extension

EXTENSION_CASES = [
    ("id", "id", True),
    ("id", "rot", True),
    ("id", "neg-id", False),
    ("neg-id", "neg-id", True),
    ("swap", "id", False),
    ("swap", "neg-id", True),
]

TOKENS = {
    "id": ((1, 0), (0, 1)),
    "neg-id": ((-1, 0), (0, -1)),
    "rot": ((0, -1), (1, -1)),
    "swap": ((0, 1), (1, 0)),
}


@pytest.mark.parametrize("phi_name,g_name,expected", EXTENSION_CASES)
def test_extension_cases(phi_name, g_name, expected):
    l1, l2 = Lattice(A2), Lattice(A2_NEG)
    glue = identity_glue(l1.discriminant_group(), l2.discriminant_group())
    phi = Isometry(l1, TOKENS[phi_name])
    g = Isometry(l2, TOKENS[g_name])
    result = nikulin_extend(l1, l2, glue, phi, g)
    assert result.accepted == expected
    if expected:
        assert result.matrix is not None
        # the lift really is an isometry of the overlattice
        Isometry(result.overlattice.lattice, result.matrix)
    else:
        witness = result.witness
        assert witness["non_integral_entry"]["value"].denominator > 1
        assert witness["element"] is not None


# ---------------------------------------------------------------- orientation

def test_orientation_signs_on_hexagonal_lattice():
    a2 = hexagonal_lattice()
    identity_basis = [[1, 0], [0, 1]]
    assert orientation_sign(a2, degree_shift_isometry(a2), identity_basis) == 1
    assert orientation_sign(a2, Isometry.minus_identity(a2), identity_basis) == 1
    assert orientation_sign(a2, Isometry(a2, ((0, 1), (1, 0))), identity_basis) == -1
    # a different (rational) positive basis gives the same answer
    skew = [[Fraction(1), Fraction(0)], [Fraction(1, 2), Fraction(2)]]
    assert orientation_sign(a2, Isometry(a2, ((0, 1), (1, 0))), skew) == -1


def test_orientation_sign_on_indefinite_lattice():
    u = Lattice(U)
    positive_part = [[Fraction(1), Fraction(1)]]  # norm 2 > 0
    assert orientation_sign(u, Isometry.identity(u), positive_part) == 1
    assert orientation_sign(u, Isometry.minus_identity(u), positive_part) == -1


@pytest.mark.parametrize("disc_sign", [1, -1])
def test_orientation_preserving_lifts(disc_sign):
    a2 = hexagonal_lattice()
    lift = find_orientation_preserving_lift(disc_sign)
    assert lift is not None
    assert len(lift.all_lifts) == 3
    assert lift.chosen.matrix in {iso.matrix for iso in lift.all_lifts}
    assert lift.commutes_with_shift
    rot = degree_shift_isometry(a2)
    basis = [[1, 0], [0, 1]]
    want_action = ((1 % 3,),) if disc_sign == 1 else ((-1 % 3,),)
    for iso in lift.all_lifts:
        assert orientation_sign(a2, iso, basis) == 1
        assert discriminant_action(iso) == want_action
        assert iso.compose(rot).matrix == rot.compose(iso).matrix
