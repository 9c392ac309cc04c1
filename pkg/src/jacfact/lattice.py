"""Integer lattices with symmetric bilinear forms, and their glue data.

A lattice is a free abelian group Z^r with a nondegenerate integral Gram
matrix G.  The discriminant group A_L = L*/L is computed through the
Smith normal form of G: writing U.G.V = D with U, V unimodular and D
diagonal with d_1 | d_2 | ..., the assignment c -> U.c mod (d_i)
identifies Z^r / G.Z^r with (+) Z/d_i.  Elements are stored in those
invariant-factor coordinates (components with d_i = 1 dropped); the
integer vector c = G.w recovering an element from a dual vector w is
called its c-vector below.

The discriminant quadratic form of an even lattice is
q(x) = w^T G w mod 2Z represented in [0, 2), with bilinear form
b(x, y) = w1^T G w2 mod Z in [0, 1).  An isometry M (columns = images of
the basis) acts on c-vectors by M^{-T}, which is integral because
G M G^{-1} = M^{-T}.

Overlattices: a glue map identifies a subgroup of A_{L1} with a subgroup
of A_{L2}; its graph H is isotropic exactly when q1(x) + q2(gx) = 0 mod
2Z for all x, and then L1 (+) L2 + (lifts of H) is an even integral
overlattice of index |H| with det = det(G1) det(G2) / |H|^2.  A pair of
isometries (phi, g) extends to the overlattice iff the induced pair of
discriminant actions preserves the graph; both the criterion and the
integral lift are computed here independently and cross-checked.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt, lcm
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .linalg import check_budget

__all__ = [
    "LatticeError",
    "Lattice",
    "Isometry",
    "DiscriminantGroup",
    "DiscElement",
    "GlueMap",
    "Overlattice",
    "ExtensionResult",
    "smith_normal_form",
    "hermite_row_basis",
    "integer_det",
    "orthogonal_sum",
    "rescale",
    "orthogonal_group",
    "discriminant_action",
    "apply_disc_matrix",
    "hexagonal_lattice",
    "degree_shift_isometry",
    "OrientationLift",
    "identity_glue",
    "overlattice_from_glue",
    "nikulin_extend",
    "orientation_sign",
    "find_orientation_preserving_lift",
]


class LatticeError(ValueError):
    """Invalid lattice input or a mathematically rejected construction."""


IntMatrix = Tuple[Tuple[int, ...], ...]


# --------------------------------------------------------------------------
# integer / rational matrix helpers

def _as_int_matrix(rows) -> IntMatrix:
    out = []
    for row in rows:
        line = []
        for x in row:
            i = int(x)
            if i != x:
                raise LatticeError(f"non-integer matrix entry {x!r}")
            line.append(i)
        out.append(tuple(line))
    return tuple(out)


def _identity(n: int) -> List[List[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _mat_mul(a, b):
    return [
        [sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
        for i in range(len(a))
    ]


def _mat_vec(a, v):
    return [sum(a[i][k] * v[k] for k in range(len(v))) for i in range(len(a))]


def _transpose(a):
    return [list(col) for col in zip(*a)]


def integer_det(matrix) -> int:
    """Determinant of an integer matrix by fraction-free Bareiss elimination."""
    a = [list(map(int, row)) for row in matrix]
    n = len(a)
    if any(len(row) != n for row in a):
        raise LatticeError("determinant needs a square matrix")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _fraction_inverse(matrix) -> List[List[Fraction]]:
    n = len(matrix)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise LatticeError("singular matrix has no inverse")
        a[col], a[pivot] = a[pivot], a[col]
        pv = a[col][col]
        a[col] = [x / pv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def smith_normal_form(matrix) -> Tuple[List[List[int]], List[List[int]], List[List[int]]]:
    """(U, D, V) with U.M.V = D diagonal, d_i | d_{i+1}, U and V unimodular."""
    a = [list(map(int, row)) for row in matrix]
    n = len(a)
    m = len(a[0]) if n else 0
    u = _identity(n)
    v = _identity(m)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        for row in a:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    t = 0
    while t < min(n, m):
        # bring a nonzero entry of minimal magnitude to (t, t)
        best = None
        for i in range(t, n):
            for j in range(t, m):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        if best[0] != t:
            swap_rows(t, best[0])
        if best[1] != t:
            swap_cols(t, best[1])
        dirty = False
        for i in range(t + 1, n):
            if a[i][t] != 0:
                q = a[i][t] // a[t][t]
                add_row(i, t, -q)
                if a[i][t] != 0:
                    dirty = True
        for j in range(t + 1, m):
            if a[t][j] != 0:
                q = a[t][j] // a[t][t]
                add_col(j, t, -q)
                if a[t][j] != 0:
                    dirty = True
        if dirty:
            continue
        # divisibility: fold any non-multiple into row t and restart the pivot
        offender = None
        for i in range(t + 1, n):
            for j in range(t + 1, m):
                if a[i][j] % a[t][t] != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            add_row(t, offender, 1)
            continue
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    d = [[a[i][j] if i == j else 0 for j in range(m)] for i in range(n)]
    return u, d, v


def hermite_row_basis(rows: Sequence[Sequence[int]]) -> List[List[int]]:
    """Canonical row basis (HNF) of the integer row span of ``rows``."""
    work = [list(map(int, r)) for r in rows if any(r)]
    if not work:
        return []
    ncols = len(work[0])
    basis: List[List[int]] = []
    rest = work
    for col in range(ncols):
        carrying = [r for r in rest if r[col] != 0]
        rest = [r for r in rest if r[col] == 0]
        while len(carrying) > 1:
            carrying.sort(key=lambda r: abs(r[col]))
            head = carrying[0]
            reduced = []
            for r in carrying[1:]:
                q = r[col] // head[col]
                r = [x - q * y for x, y in zip(r, head)]
                if r[col] != 0:
                    reduced.append(r)
                elif any(r):
                    rest.append(r)
            carrying = [head] + reduced
        if carrying:
            pivot = carrying[0]
            if pivot[col] < 0:
                pivot = [-x for x in pivot]
            basis.append(pivot)
    # reduce entries above each pivot to canonical residues
    pivots = [(next(j for j, x in enumerate(row) if x != 0), idx)
              for idx, row in enumerate(basis)]
    for pcol, pidx in pivots:
        prow = basis[pidx]
        for other in range(pidx):
            q = basis[other][pcol] // prow[pcol]
            if q:
                basis[other] = [x - q * y for x, y in zip(basis[other], prow)]
    return basis


# --------------------------------------------------------------------------
# lattices and isometries

class Lattice:
    """Z^r with a symmetric nondegenerate integer Gram matrix."""

    def __init__(self, gram):
        g = _as_int_matrix(gram)
        n = len(g)
        if any(len(row) != n for row in g):
            raise LatticeError("Gram matrix must be square")
        for i in range(n):
            for j in range(n):
                if g[i][j] != g[j][i]:
                    raise LatticeError(f"Gram matrix not symmetric at ({i},{j})")
        self.gram: IntMatrix = g
        self.rank = n
        self.det = integer_det(g)
        if self.det == 0:
            raise LatticeError("Gram matrix is degenerate")
        self._signature: Optional[Tuple[int, int]] = None
        self._disc: Optional[DiscriminantGroup] = None

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    @property
    def is_unimodular(self) -> bool:
        return abs(self.det) == 1

    def signature(self) -> Tuple[int, int]:
        """Exact (n_+, n_-) via symmetric congruent diagonalization over Q."""
        if self._signature is not None:
            return self._signature
        n = self.rank
        a = [[Fraction(x) for x in row] for row in self.gram]
        pos = neg = 0
        for i in range(n):
            if a[i][i] == 0:
                fix = next((j for j in range(i + 1, n) if a[j][i] != 0), None)
                if fix is None:
                    raise LatticeError("degenerate block during diagonalization")
                if a[fix][fix] != 0:
                    a[i], a[fix] = a[fix], a[i]
                    for row in a:
                        row[i], row[fix] = row[fix], row[i]
                else:
                    for j in range(n):
                        a[i][j] += a[fix][j]
                    for row in a:
                        row[i] += row[fix]
            pivot = a[i][i]
            if pivot > 0:
                pos += 1
            else:
                neg += 1
            for j in range(i + 1, n):
                factor = a[j][i] / pivot
                if factor:
                    for k in range(n):
                        a[j][k] -= factor * a[i][k]
                    for row in a:
                        row[j] -= factor * row[i]
        self._signature = (pos, neg)
        return self._signature

    @property
    def is_definite(self) -> bool:
        p, m = self.signature()
        return p == 0 or m == 0

    def inner(self, v: Sequence[int], w: Sequence[int]) -> int:
        return sum(
            int(v[i]) * self.gram[i][j] * int(w[j])
            for i in range(self.rank)
            for j in range(self.rank)
        )

    def norm(self, v: Sequence[int]) -> int:
        return self.inner(v, v)

    def discriminant_group(self) -> "DiscriminantGroup":
        if self._disc is None:
            self._disc = DiscriminantGroup(self)
        return self._disc

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.gram == other.gram

    def __hash__(self):
        return hash(self.gram)

    def __repr__(self):
        return f"Lattice(rank={self.rank}, det={self.det})"


def orthogonal_sum(l1: Lattice, l2: Lattice) -> Lattice:
    n1, n2 = l1.rank, l2.rank
    gram = [
        [
            (l1.gram[i][j] if i < n1 and j < n1 else
             l2.gram[i - n1][j - n1] if i >= n1 and j >= n1 else 0)
            for j in range(n1 + n2)
        ]
        for i in range(n1 + n2)
    ]
    return Lattice(gram)


def rescale(lat: Lattice, s: int) -> Lattice:
    if s == 0:
        raise LatticeError("rescaling by zero is degenerate")
    return Lattice([[s * x for x in row] for row in lat.gram])


@dataclass(frozen=True)
class Isometry:
    """An automorphism of a lattice; columns are images of basis vectors."""

    lattice: Lattice
    matrix: IntMatrix

    def __post_init__(self):
        m = _as_int_matrix(self.matrix)
        object.__setattr__(self, "matrix", m)
        n = self.lattice.rank
        if len(m) != n or any(len(row) != n for row in m):
            raise LatticeError("isometry matrix has the wrong shape")
        g = self.lattice.gram
        mt = _transpose(m)
        if _mat_mul(_mat_mul(mt, [list(r) for r in g]), [list(r) for r in m]) != [
            list(r) for r in g
        ]:
            raise LatticeError("matrix does not preserve the bilinear form")

    @property
    def det(self) -> int:
        return integer_det(self.matrix)

    def apply(self, v: Sequence[int]) -> Tuple[int, ...]:
        return tuple(_mat_vec([list(r) for r in self.matrix], list(map(int, v))))

    def compose(self, other: "Isometry") -> "Isometry":
        """self after other."""
        if self.lattice != other.lattice:
            raise LatticeError("isometries live on different lattices")
        return Isometry(
            self.lattice,
            _as_int_matrix(
                _mat_mul([list(r) for r in self.matrix], [list(r) for r in other.matrix])
            ),
        )

    def inverse(self) -> "Isometry":
        inv = _fraction_inverse(self.matrix)
        return Isometry(self.lattice, _as_int_matrix(inv))

    def order(self, cap: int = 10000) -> int:
        n = self.lattice.rank
        ident = _as_int_matrix(_identity(n))
        power = self
        for k in range(1, cap + 1):
            if power.matrix == ident:
                return k
            power = power.compose(self)
        raise LatticeError(f"order exceeds cap {cap}")

    @staticmethod
    def identity(lat: Lattice) -> "Isometry":
        return Isometry(lat, _as_int_matrix(_identity(lat.rank)))

    @staticmethod
    def minus_identity(lat: Lattice) -> "Isometry":
        return Isometry(
            lat, _as_int_matrix([[-int(i == j) for j in range(lat.rank)] for i in range(lat.rank)])
        )


def orthogonal_group(lat: Lattice, budget: Optional[int] = None) -> List[Isometry]:
    """All isometries of a definite lattice, by backtracking on columns.

    Candidate images of basis vector j are the lattice vectors of the
    right norm, bounded coordinatewise by v_i^2 <= |norm| * (G^{-1})_{ii};
    pairwise inner products are enforced during the search, which makes
    M^T G M = G automatic and det = +-1 a consequence.
    """
    pos, neg = lat.signature()
    if pos != 0 and neg != 0:
        raise LatticeError("orthogonal group enumeration needs a definite lattice")
    flip = -1 if pos == 0 else 1
    g = [[flip * x for x in row] for row in lat.gram]
    n = lat.rank
    ginv = _fraction_inverse(g)

    def vectors_of_norm(target: int) -> List[Tuple[int, ...]]:
        bounds = [isqrt(int(target * ginv[i][i])) for i in range(n)]
        found = []

        def norm(v):
            return sum(v[i] * g[i][j] * v[j] for i in range(n) for j in range(n))

        def rec(prefix):
            if len(prefix) == n:
                if norm(prefix) == target:
                    found.append(tuple(prefix))
                return
            i = len(prefix)
            for x in range(-bounds[i], bounds[i] + 1):
                rec(prefix + [x])

        rec([])
        return found

    cache: Dict[int, List[Tuple[int, ...]]] = {}
    column_candidates = []
    total = 0
    for j in range(n):
        target = g[j][j]
        if target <= 0:
            raise LatticeError("definite Gram matrix with nonpositive diagonal")
        if target not in cache:
            cache[target] = vectors_of_norm(target)
        column_candidates.append(cache[target])
        total += len(cache[target])
    check_budget(total, n, budget, "orthogonalGroup")

    def pair(v, w):
        return sum(v[i] * g[i][j] * w[j] for i in range(n) for j in range(n))

    results: List[Isometry] = []

    def backtrack(cols):
        j = len(cols)
        if j == n:
            matrix = _as_int_matrix(_transpose([list(c) for c in cols]))
            iso = Isometry(lat, matrix)
            if abs(iso.det) != 1:
                raise LatticeError("internal error: non-unimodular isometry")
            results.append(iso)
            return
        for cand in column_candidates[j]:
            if all(pair(cols[i], cand) == g[i][j] for i in range(j)):
                backtrack(cols + [cand])

    backtrack([])
    return results


def hexagonal_lattice() -> Lattice:
    """The rank-2 root lattice with Gram [[2,-1],[-1,2]]."""
    return Lattice([[2, -1], [-1, 2]])


def degree_shift_isometry(lat: Optional[Lattice] = None) -> Isometry:
    """The order-3 rotation [[0,-1],[1,-1]] of the hexagonal rank-2 lattice.

    With no argument it acts on the standard hexagonal lattice; passing a
    lattice checks that the same matrix is an isometry there (e.g. for
    the negated form).
    """
    if lat is None:
        lat = hexagonal_lattice()
    if lat.rank != 2:
        raise LatticeError("shift isometry is defined on a rank-2 lattice")
    candidate = ((0, -1), (1, -1))
    try:
        return Isometry(lat, candidate)
    except LatticeError as exc:
        raise LatticeError(
            "lattice does not admit the hexagonal rotation: " + str(exc)
        ) from exc


# --------------------------------------------------------------------------
# discriminant groups

@dataclass(frozen=True)
class DiscElement:
    """An element of a discriminant group in invariant-factor coordinates."""

    group: "DiscriminantGroup"
    coords: Tuple[int, ...]

    def __add__(self, other: "DiscElement") -> "DiscElement":
        self._check(other)
        return self.group.element(
            [a + b for a, b in zip(self.coords, other.coords)]
        )

    def __neg__(self) -> "DiscElement":
        return self.group.element([-a for a in self.coords])

    def __sub__(self, other: "DiscElement") -> "DiscElement":
        return self + (-other)

    def scale(self, k: int) -> "DiscElement":
        return self.group.element([k * a for a in self.coords])

    @property
    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coords)

    def order(self) -> int:
        result = 1
        for a, d in zip(self.coords, self.group.orders):
            result = lcm(result, d // gcd(d, a))
        return result

    def _check(self, other: "DiscElement"):
        if self.group is not other.group:
            raise LatticeError("elements of different discriminant groups")

    def __eq__(self, other):
        return (
            isinstance(other, DiscElement)
            and self.group is other.group
            and self.coords == other.coords
        )

    def __hash__(self):
        return hash((id(self.group), self.coords))

    def __repr__(self):
        return f"DiscElement{self.coords}"


class DiscriminantGroup:
    """A_L = L*/L in invariant-factor coordinates, with q and b."""

    def __init__(self, lat: Lattice):
        self.lattice = lat
        u, d, _v = smith_normal_form(lat.gram)
        n = lat.rank
        diag = [d[i][i] for i in range(n)]
        self._kept = [i for i in range(n) if diag[i] > 1]
        self.orders: Tuple[int, ...] = tuple(diag[i] for i in self._kept)
        self._u = u
        self._u_inv = _fraction_inverse(u)  # unimodular: entries integral
        self._g_inv = _fraction_inverse(lat.gram)

    @property
    def size(self) -> int:
        result = 1
        for d in self.orders:
            result *= d
        return result

    def element(self, coords: Sequence[int]) -> DiscElement:
        if len(coords) != len(self.orders):
            raise LatticeError(
                f"need {len(self.orders)} coordinates, got {len(coords)}"
            )
        return DiscElement(
            self, tuple(int(c) % d for c, d in zip(coords, self.orders))
        )

    @property
    def zero(self) -> DiscElement:
        return self.element([0] * len(self.orders))

    def generators(self) -> List[DiscElement]:
        out = []
        for idx in range(len(self.orders)):
            coords = [0] * len(self.orders)
            coords[idx] = 1
            out.append(self.element(coords))
        return out

    def elements(self, limit: int = 100000) -> List[DiscElement]:
        if self.size > limit:
            raise LatticeError(f"discriminant group too large to enumerate ({self.size})")
        out = [self.zero]
        for idx, d in enumerate(self.orders):
            out = [
                self.element([*e.coords[:idx], k, *e.coords[idx + 1:]])
                for e in out
                for k in range(d)
            ]
        return out

    def from_c_vector(self, c: Sequence[int]) -> DiscElement:
        """Element represented by the integer vector c in Z^r / G.Z^r."""
        full = _mat_vec(self._u, list(map(int, c)))
        return self.element([full[i] for i in self._kept])

    def c_vector(self, e: DiscElement) -> Tuple[int, ...]:
        """An integer representative c with U.c = embedded coordinates."""
        embedded = [0] * self.lattice.rank
        for pos, idx in enumerate(self._kept):
            embedded[idx] = e.coords[pos]
        c = _mat_vec(self._u_inv, embedded)
        out = []
        for x in c:
            frac = Fraction(x)
            if frac.denominator != 1:
                raise LatticeError("internal error: non-integral c-vector")
            out.append(int(frac))
        return tuple(out)

    def dual_vector(self, e: DiscElement) -> Tuple[Fraction, ...]:
        """A rational lift w in L* with G.w = c_vector(e)."""
        c = self.c_vector(e)
        return tuple(
            sum(self._g_inv[i][j] * c[j] for j in range(self.lattice.rank))
            for i in range(self.lattice.rank)
        )

    def b(self, e1: DiscElement, e2: DiscElement) -> Fraction:
        """Bilinear form value in [0, 1)."""
        c1 = self.c_vector(e1)
        w2 = self.dual_vector(e2)
        value = sum(Fraction(c)*wc for c, wc in zip(c1, w2))
        return value % 1

    def q(self, e: DiscElement) -> Fraction:
        """Quadratic form value in [0, 2); requires an even lattice."""
        if not self.lattice.is_even:
            raise LatticeError("quadratic form is defined for even lattices only")
        c = self.c_vector(e)
        w = self.dual_vector(e)
        value = sum(Fraction(ci) * wi for ci, wi in zip(c, w))
        return value % 2


def discriminant_action(iso: Isometry) -> Tuple[Tuple[int, ...], ...]:
    """Matrix of the induced action on A_L in invariant coordinates.

    Row i is reduced mod the order of component i.  The action on
    c-vectors is M^{-T}, conjugated into invariant coordinates by U.
    """
    group = iso.lattice.discriminant_group()
    m_inv_t = _transpose(_fraction_inverse(iso.matrix))
    t_full = _mat_mul(_mat_mul(group._u, m_inv_t), group._u_inv)
    kept = group._kept
    out = []
    for pos, i in enumerate(kept):
        row = []
        for j in kept:
            entry = Fraction(t_full[i][j])
            if entry.denominator != 1:
                raise LatticeError("internal error: non-integral discriminant action")
            row.append(int(entry) % group.orders[pos])
        out.append(tuple(row))
    return tuple(out)


def apply_disc_matrix(
    group: DiscriminantGroup, t: Sequence[Sequence[int]], e: DiscElement
) -> DiscElement:
    return group.element(
        [
            sum(t[i][j] * e.coords[j] for j in range(len(e.coords)))
            for i in range(len(group.orders))
        ]
    )


def _is_disc_identity(group: DiscriminantGroup, t, sign: int) -> bool:
    n = len(group.orders)
    for i in range(n):
        for j in range(n):
            expected = sign % group.orders[i] if i == j else 0
            if t[i][j] % group.orders[i] != expected:
                return False
    return True


# --------------------------------------------------------------------------
# glue maps and overlattices

class GlueMap:
    """A homomorphism from a subgroup of A_{L1} into A_{L2}, by generators."""

    def __init__(
        self,
        group1: DiscriminantGroup,
        group2: DiscriminantGroup,
        domain_generators: Sequence[DiscElement],
        images: Sequence[DiscElement],
    ):
        if len(domain_generators) != len(images):
            raise LatticeError("generator/image count mismatch")
        for g in domain_generators:
            if g.group is not group1:
                raise LatticeError("domain generator not in the first group")
        for g in images:
            if g.group is not group2:
                raise LatticeError("image not in the second group")
        self.group1 = group1
        self.group2 = group2
        self.domain_generators = list(domain_generators)
        self.images = list(images)
        for gen, img in zip(self.domain_generators, self.images):
            if not img.scale(gen.order()).is_zero:
                raise LatticeError(
                    f"glue not well defined: image order does not divide "
                    f"{gen.order()}"
                )
        self._graph: Optional[List[Tuple[DiscElement, DiscElement]]] = None

    def graph(self, limit: int = 100000) -> List[Tuple[DiscElement, DiscElement]]:
        """All pairs (x, gamma x), closed under addition."""
        if self._graph is not None:
            return self._graph
        seen: Set[Tuple[Tuple[int, ...], Tuple[int, ...]]] = {
            (self.group1.zero.coords, self.group2.zero.coords)
        }
        frontier = [(self.group1.zero, self.group2.zero)]
        while frontier:
            x, y = frontier.pop()
            for gen, img in zip(self.domain_generators, self.images):
                nx, ny = x + gen, y + img
                key = (nx.coords, ny.coords)
                if key not in seen:
                    if len(seen) >= limit:
                        raise LatticeError("glue graph too large to enumerate")
                    seen.add(key)
                    frontier.append((nx, ny))
        self._graph = sorted(
            (
                (self.group1.element(cx), self.group2.element(cy))
                for cx, cy in seen
            ),
            key=lambda pair: (pair[0].coords, pair[1].coords),
        )
        return self._graph

    @property
    def order(self) -> int:
        return len(self.graph())

    def is_injective(self) -> bool:
        return all(x.is_zero for x, y in self.graph() if y.is_zero)

    def is_isotropic(self) -> Tuple[bool, Optional[dict]]:
        """Check q1(x) + q2(gamma x) = 0 mod 2Z on the whole graph."""
        for x, y in self.graph():
            total = (self.group1.q(x) + self.group2.q(y)) % 2
            if total != 0:
                return False, {
                    "element": x.coords,
                    "image": y.coords,
                    "q1": self.group1.q(x),
                    "q2": self.group2.q(y),
                    "sum_mod_2": total,
                }
        return True, None

    def contains_pair(self, x: DiscElement, y: DiscElement) -> bool:
        return any(px == x and py == y for px, py in self.graph())


def identity_glue(group1: DiscriminantGroup, group2: DiscriminantGroup) -> GlueMap:
    """Glue generator i of A_{L1} to generator i of A_{L2}."""
    if group1.orders != group2.orders:
        raise LatticeError(
            f"identity glue needs matching invariant factors, "
            f"got {group1.orders} vs {group2.orders}"
        )
    return GlueMap(group1, group2, group1.generators(), group2.generators())


@dataclass(frozen=True)
class Overlattice:
    """An even overlattice of L1 (+) L2 defined by an isotropic glue graph."""

    ambient: Lattice                     # the orthogonal sum L1 (+) L2
    lattice: Lattice                     # the overlattice with its own Gram
    basis: Tuple[Tuple[Fraction, ...], ...]  # rows: basis vectors in ambient coords
    index: int                           # [overlattice : L1 (+) L2] = |H|

    def ambient_coords_in_overlattice(self, v: Sequence[int]) -> Tuple[int, ...]:
        """Express an ambient lattice vector in the overlattice basis."""
        basis_t = _transpose([list(row) for row in self.basis])
        inv = _fraction_inverse(basis_t)
        coords = _mat_vec(inv, list(map(int, v)))
        out = []
        for x in coords:
            frac = Fraction(x)
            if frac.denominator != 1:
                raise LatticeError("vector is not in the overlattice")
            out.append(int(frac))
        return tuple(out)


def overlattice_from_glue(l1: Lattice, l2: Lattice, glue: GlueMap) -> Overlattice:
    """Build the overlattice defined by the glue graph; raises on bad glue.

    Rejections are mathematical: non-injective glue, non-isotropic graph
    (with the witness element and its q-values), or a resulting Gram that
    fails integrality -- the latter would indicate an internal error once
    isotropy has passed, and is still checked independently.
    """
    if glue.group1.lattice != l1 or glue.group2.lattice != l2:
        raise LatticeError("glue map does not match the given lattices")
    if not (l1.is_even and l2.is_even):
        raise LatticeError("overlattice construction requires even lattices")
    if not glue.is_injective():
        raise LatticeError("glue map is not injective")
    isotropic, witness = glue.is_isotropic()
    if not isotropic:
        raise LatticeError(
            "glue graph is not isotropic: element "
            f"{witness['element']} + image {witness['image']} has "
            f"q1 + q2 = {witness['q1']} + {witness['q2']} = "
            f"{witness['sum_mod_2']} mod 2"
        )
    ambient = orthogonal_sum(l1, l2)
    r = ambient.rank
    lifts: List[List[Fraction]] = []
    for gen, img in zip(glue.domain_generators, glue.images):
        w1 = glue.group1.dual_vector(gen)
        w2 = glue.group2.dual_vector(img)
        lifts.append([Fraction(x) for x in (*w1, *w2)])
    denom = 1
    for row in lifts:
        for x in row:
            denom = lcm(denom, x.denominator)
    scaled = [[denom * int(i == j) for j in range(r)] for i in range(r)]
    scaled += [[int(x * denom) for x in row] for row in lifts]
    basis_scaled = hermite_row_basis(scaled)
    if len(basis_scaled) != r:
        raise LatticeError("internal error: overlattice basis has wrong rank")
    basis = tuple(
        tuple(Fraction(x, denom) for x in row) for row in basis_scaled
    )
    gram_rows = []
    for brow in basis:
        row = []
        for crow in basis:
            value = sum(
                brow[i] * ambient.gram[i][j] * crow[j]
                for i in range(r)
                for j in range(r)
            )
            if value.denominator != 1:
                raise LatticeError(
                    "internal error: glued Gram matrix is not integral"
                )
            row.append(int(value))
        gram_rows.append(row)
    over = Lattice(gram_rows)
    if not over.is_even:
        raise LatticeError("internal error: glued lattice of even lattices is odd")
    h = glue.order
    if over.det * h * h != ambient.det:
        raise LatticeError(
            f"internal error: determinant identity fails "
            f"({over.det} * {h}^2 != {ambient.det})"
        )
    return Overlattice(ambient=ambient, lattice=over, basis=basis, index=h)


# --------------------------------------------------------------------------
# equivariant extension

@dataclass(frozen=True)
class ExtensionResult:
    accepted: bool
    reason: Optional[str]
    witness: Optional[dict]
    matrix: Optional[IntMatrix]          # isometry of the overlattice, its basis
    overlattice: Optional[Overlattice]


def nikulin_extend(
    l1: Lattice,
    l2: Lattice,
    glue: GlueMap,
    phi: Isometry,
    g: Isometry,
) -> ExtensionResult:
    """Decide whether phi (+) g extends to the glued overlattice.

    The criterion is that the pair of induced discriminant actions
    preserves the glue graph: (phibar x, gbar y) must be in the graph for
    every (x, y) in it.  Acceptance is cross-checked by computing the
    matrix of phi (+) g in the overlattice basis and verifying it is
    integral and an isometry; rejection reports the first failing graph
    element, and the non-integral lift entry demonstrating the failure
    concretely.
    """
    if phi.lattice != l1:
        raise LatticeError("phi is not an isometry of the first lattice")
    if g.lattice != l2:
        raise LatticeError("g is not an isometry of the second lattice")
    over = overlattice_from_glue(l1, l2, glue)
    phibar = discriminant_action(phi)
    gbar = discriminant_action(g)
    group1, group2 = glue.group1, glue.group2

    failing = None
    for x, y in glue.graph():
        px = apply_disc_matrix(group1, phibar, x)
        gy = apply_disc_matrix(group2, gbar, y)
        if not glue.contains_pair(px, gy):
            failing = (x, y, px, gy)
            break

    # direct route: the matrix of phi (+) g in the overlattice basis
    n1 = l1.rank
    r = over.ambient.rank
    block = [
        [
            (phi.matrix[i][j] if i < n1 and j < n1 else
             g.matrix[i - n1][j - n1] if i >= n1 and j >= n1 else 0)
            for j in range(r)
        ]
        for i in range(r)
    ]
    basis_t = _transpose([list(row) for row in over.basis])  # columns = basis
    basis_t_inv = _fraction_inverse(basis_t)
    lifted = _mat_mul(_mat_mul(basis_t_inv, block), basis_t)
    bad_entry = None
    for i in range(r):
        for j in range(r):
            value = Fraction(lifted[i][j])
            if value.denominator != 1:
                bad_entry = (i, j, value)
                break
        if bad_entry is not None:
            break

    if failing is not None:
        if bad_entry is None:
            raise LatticeError(
                "internal error: graph criterion rejects but the lift is integral"
            )
        x, y, px, gy = failing
        return ExtensionResult(
            accepted=False,
            reason="discriminant actions do not preserve the glue graph",
            witness={
                "element": x.coords,
                "image": y.coords,
                "phi_bar_element": px.coords,
                "g_bar_image": gy.coords,
                "non_integral_entry": {
                    "position": (bad_entry[0], bad_entry[1]),
                    "value": bad_entry[2],
                },
            },
            matrix=None,
            overlattice=over,
        )
    if bad_entry is not None:
        raise LatticeError(
            "internal error: graph criterion accepts but the lift is not integral"
        )
    matrix = _as_int_matrix(lifted)
    Isometry(over.lattice, matrix)  # validates the form is preserved
    return ExtensionResult(
        accepted=True,
        reason=None,
        witness=None,
        matrix=matrix,
        overlattice=over,
    )


# --------------------------------------------------------------------------
# orientation

def _fraction_det(matrix) -> Fraction:
    a = [[Fraction(x) for x in row] for row in matrix]
    k = len(a)
    det = Fraction(1)
    for col in range(k):
        pivot = next((r for r in range(col, k) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, k):
            factor = a[r][col] * inv
            if factor:
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return det


def orientation_sign(
    lat: Lattice, iso: Isometry, positive_basis: Sequence[Sequence]
) -> int:
    """+1 or -1: does the isometry preserve orientation of the positive part?

    ``positive_basis`` (rational vectors allowed) must span a
    positive-definite subspace whose dimension equals n_+ of the lattice.
    The sign is that of det((B^T G B)^{-1} (B^T G sigma(B))) -- sigma's
    action on the positive subspace followed by projection back along the
    orthogonal complement, never zero for an isometry.
    """
    if iso.lattice != lat:
        raise LatticeError("isometry does not act on the given lattice")
    b_cols = _transpose([[Fraction(x) for x in v] for v in positive_basis])
    k = len(positive_basis)
    n_plus, _ = lat.signature()
    if k != n_plus:
        raise LatticeError(
            f"positive basis has {k} vectors but the positive rank is {n_plus}"
        )
    if k == 0:
        return 1
    gram_q = [[Fraction(x) for x in row] for row in lat.gram]
    gram_core = _mat_mul(_mat_mul(_transpose(b_cols), gram_q), b_cols)
    # Sylvester: all leading principal minors positive
    for size in range(1, k + 1):
        minor = _fraction_det([row[:size] for row in gram_core[:size]])
        if minor <= 0:
            raise LatticeError("basis does not span a positive-definite subspace")
    sigma_b = _mat_mul([[Fraction(x) for x in r] for r in iso.matrix], b_cols)
    projected = _mat_mul(_mat_mul(_transpose(b_cols), gram_q), sigma_b)
    core_inv = _fraction_inverse(gram_core)
    det = _fraction_det(_mat_mul(core_inv, projected))
    if det == 0:
        raise LatticeError("internal error: orientation action is degenerate")
    return 1 if det > 0 else -1


@dataclass(frozen=True)
class OrientationLift:
    """Result of the orientation-preserving lift search."""

    chosen: Isometry
    all_lifts: Tuple[Isometry, ...]
    commutes_with_shift: bool


def find_orientation_preserving_lift(
    disc_sign: int,
    lat: Optional[Lattice] = None,
    budget: Optional[int] = None,
) -> Optional[OrientationLift]:
    """Orientation-preserving isometries acting as disc_sign on A_L.

    Searches the full orthogonal group of a definite lattice (the
    standard hexagonal one by default); for a positive definite lattice
    "orientation preserving" means det = +1.  Returns the first match in
    a deterministic enumeration together with the full list, and records
    whether every lift commutes with the hexagonal rotation (checked only
    when that rotation is an isometry of the lattice).
    """
    if disc_sign not in (1, -1):
        raise LatticeError("discriminant sign must be +1 or -1")
    if lat is None:
        lat = hexagonal_lattice()
    group = lat.discriminant_group()
    pos_basis = [
        [int(i == j) for j in range(lat.rank)] for i in range(lat.rank)
    ]
    n_plus, _ = lat.signature()
    matches = []
    for iso in orthogonal_group(lat, budget=budget):
        t = discriminant_action(iso)
        if not _is_disc_identity(group, t, disc_sign):
            continue
        if n_plus == lat.rank:
            sign = orientation_sign(lat, iso, pos_basis)
        else:
            sign = 1 if iso.det > 0 else -1
        if sign == 1:
            matches.append(iso)
    if not matches:
        return None
    matches.sort(key=lambda iso: iso.matrix)
    commutes = True
    try:
        shift = degree_shift_isometry(lat)
        commutes = all(
            m.compose(shift).matrix == shift.compose(m).matrix for m in matches
        )
    except LatticeError:
        pass  # lattice without the hexagonal rotation: nothing to check
    return OrientationLift(
        chosen=matches[0], all_lifts=tuple(matches), commutes_with_shift=commutes
    )
