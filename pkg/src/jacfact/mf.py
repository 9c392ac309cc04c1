"""Graded matrix factorizations of a homogeneous potential.

An object is a pair of graded free modules K = (+) R(-a_j),
L = (+) R(-b_j) (stored as the twist lists ``twists_k``, ``twists_l``)
together with polynomial matrices

    alpha: K -> L          beta: L -> K(d)

satisfying beta.alpha = f.id_K and alpha(d).beta = f.id_L.  Degree
bookkeeping conventions, fixed once here and used everywhere:

* ``R(a)`` has ``R(a)_i = R_{a+i}``; the generator of ``R(-a)`` sits in
  internal degree ``a``.
* The entry ``alpha[r][c]`` maps generator c of K into generator r of L,
  so it is homogeneous of degree ``twists_k[c] - twists_l[r]`` (zero
  entries allowed); ``beta[r][c]`` has degree
  ``twists_l[c] - twists_k[r] + d``.
* ``shift`` (the translation [1]) is (L --(-beta)--> K(d) --(-alpha)-->
  L(d)); applying it twice gives exactly ``degree_shift(P, d)`` -- the
  on-the-nose form of "(d) = [2]" in this model.
* A morphism P -> P'(l) is a pair (g: K -> K'(l), h: L -> L'(l)) with
  alpha'.g = h.alpha and beta'.h = g(d).beta; as plain matrices the
  twists drop out and the conditions read  A'G = HA  and  B'H = GB.
* A homotopy of twist l is a pair (s: L -> K'(l), t: K(d) -> L'(l));
  its boundary is the morphism (SA + B'T, A'S + TB), closed for free
  because A'B' = f.id and AB = f.id.

Koszul tensor convention: for a decomposition f = sum a_i b_i the object
lives on the exterior algebra basis e_S, S a subset of the factor
indices; the slot-i creation/annihilation operators act with sign
(-1)^(number of indices in S preceding i).  The internal degree of e_S
is normalized so that e_empty sits in degree 0, which forces the stored
twist of e_S to be d*floor(|S|/2) - sum_{i in S} deg(a_i).

Everything in this module is immutable and exact; the linear algebra for
hom spaces runs over the same sparse RREF core as the Jacobian module.
The internal-degree window never needs truncating by hand: an entry
whose forced degree is negative is identically zero, and all other
degrees carry finitely many monomials.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from .field import Field
from .linalg import SparseRREF, check_budget, kernel_basis, solve
from .poly import Monomial, PolyError, Polynomial, monomial_basis

__all__ = [
    "MatrixFactorization",
    "MFMorphism",
    "Homotopy",
    "HomSpace",
    "LMFRing",
    "MFError",
    "ValidationReport",
    "koszul_mf",
    "termwise_decomposition",
    "stabilized_diagonal",
    "difference_quotients",
    "direct_sum",
    "mult_by_section",
    "chain_rule_homotopy",
    "is_null_homotopic",
    "hom_space",
    "compose",
    "lmf_ring",
    "compare_with_jacobian",
    "mf_to_text",
    "mf_from_text",
]


class MFError(ValueError):
    """Invalid matrix-factorization input or precondition failure."""


PolyMatrix = Tuple[Tuple[Polynomial, ...], ...]


# --------------------------------------------------------------------------
# small polynomial-matrix helpers

def _mat(rows) -> PolyMatrix:
    return tuple(tuple(row) for row in rows)


def _mat_mul(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    if not a or not b:
        return ()
    inner = len(b)
    if any(len(row) != inner for row in a):
        raise MFError("matrix product shape mismatch")
    out = []
    for row in a:
        line = []
        for c in range(len(b[0])):
            acc = None
            for j in range(inner):
                term = row[j] * b[j][c]
                acc = term if acc is None else acc + term
            line.append(acc)
        out.append(tuple(line))
    return tuple(out)


def _mat_neg(a: PolyMatrix) -> PolyMatrix:
    return tuple(tuple(-entry for entry in row) for row in a)


def _mat_partial(a: PolyMatrix, i: int) -> PolyMatrix:
    return tuple(tuple(entry.partial_derivative(i) for entry in row) for row in a)


def _mat_eq(a: PolyMatrix, b: PolyMatrix) -> bool:
    return len(a) == len(b) and all(
        len(ra) == len(rb) and all(x == y for x, y in zip(ra, rb))
        for ra, rb in zip(a, b)
    )


def _zero_matrix(rows: int, cols: int, field: Field, num_vars: int) -> PolyMatrix:
    z = Polynomial.zero(field, num_vars)
    return tuple(tuple(z for _ in range(cols)) for _ in range(rows))


def _scaled_identity(n: int, p: Polynomial) -> PolyMatrix:
    z = Polynomial.zero(p.field, p.num_vars)
    return tuple(
        tuple(p if r == c else z for c in range(n)) for r in range(n)
    )


# --------------------------------------------------------------------------
# objects

@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: Tuple[dict, ...]

    @property
    def first_violation(self) -> Optional[dict]:
        return self.violations[0] if self.violations else None


@dataclass(frozen=True)
class MatrixFactorization:
    f: Polynomial
    d: int
    twists_k: Tuple[int, ...]
    twists_l: Tuple[int, ...]
    alpha: PolyMatrix  # len(twists_l) x len(twists_k)
    beta: PolyMatrix   # len(twists_k) x len(twists_l)

    def __post_init__(self):
        if self.f.is_zero:
            raise MFError("potential must be nonzero")
        if self.f.homogeneous_degree() != self.d:
            raise MFError("potential degree disagrees with d")
        rk, rl = len(self.twists_k), len(self.twists_l)
        if len(self.alpha) != rl or any(len(row) != rk for row in self.alpha):
            raise MFError("alpha shape disagrees with twist lists")
        if len(self.beta) != rk or any(len(row) != rl for row in self.beta):
            raise MFError("beta shape disagrees with twist lists")

    @property
    def field(self) -> Field:
        return self.f.field

    @property
    def num_vars(self) -> int:
        return self.f.num_vars

    @property
    def rank(self) -> Tuple[int, int]:
        return (len(self.twists_k), len(self.twists_l))

    def alpha_degree(self, r: int, c: int) -> int:
        return self.twists_k[c] - self.twists_l[r]

    def beta_degree(self, r: int, c: int) -> int:
        return self.twists_l[c] - self.twists_k[r] + self.d

    # ------------------------------------------------------------ validate
    def validate(self) -> ValidationReport:
        """Check entry homogeneity/forced degrees and both product identities."""
        violations = []

        def check_entry(name, r, c, entry, expected_degree):
            if entry.is_zero:
                return
            try:
                actual = entry.homogeneous_degree()
            except PolyError:
                violations.append({
                    "kind": "degree", "matrix": name, "cell": (r, c),
                    "expected": expected_degree, "actual": "inhomogeneous",
                })
                return
            if actual != expected_degree:
                violations.append({
                    "kind": "degree", "matrix": name, "cell": (r, c),
                    "expected": expected_degree, "actual": actual,
                })

        for r, row in enumerate(self.alpha):
            for c, entry in enumerate(row):
                check_entry("alpha", r, c, entry, self.alpha_degree(r, c))
        for r, row in enumerate(self.beta):
            for c, entry in enumerate(row):
                check_entry("beta", r, c, entry, self.beta_degree(r, c))

        def check_product(name, product, size):
            for r in range(size):
                for c in range(size):
                    expected = self.f if r == c else Polynomial.zero(
                        self.field, self.num_vars
                    )
                    if product[r][c] != expected:
                        violations.append({
                            "kind": "product", "matrix": name, "cell": (r, c),
                            "expected": expected.render(),
                            "actual": product[r][c].render(),
                        })

        rk, rl = self.rank
        if rk and rl:
            check_product("beta*alpha", _mat_mul(self.beta, self.alpha), rk)
            check_product("alpha*beta", _mat_mul(self.alpha, self.beta), rl)
        return ValidationReport(ok=not violations, violations=tuple(violations))

    # ------------------------------------------------------------- shifts
    def shift(self) -> "MatrixFactorization":
        """The translation [1]: (L --(-beta)--> K(d) --(-alpha)--> L(d))."""
        return MatrixFactorization(
            f=self.f,
            d=self.d,
            twists_k=self.twists_l,
            twists_l=tuple(a - self.d for a in self.twists_k),
            alpha=_mat_neg(self.beta),
            beta=_mat_neg(self.alpha),
        )

    def degree_shift(self, ell: int) -> "MatrixFactorization":
        """P(ell): all twists drop by ell, matrices unchanged."""
        return MatrixFactorization(
            f=self.f,
            d=self.d,
            twists_k=tuple(a - ell for a in self.twists_k),
            twists_l=tuple(a - ell for a in self.twists_l),
            alpha=self.alpha,
            beta=self.beta,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixFactorization):
            return NotImplemented
        return (
            self.f == other.f
            and self.d == other.d
            and self.twists_k == other.twists_k
            and self.twists_l == other.twists_l
            and _mat_eq(self.alpha, other.alpha)
            and _mat_eq(self.beta, other.beta)
        )

    def __hash__(self):
        return hash((self.f, self.d, self.twists_k, self.twists_l))


def direct_sum(p: MatrixFactorization, q: MatrixFactorization) -> MatrixFactorization:
    if p.f != q.f:
        raise MFError("direct sum requires the same potential")
    z_lk = _zero_matrix(len(p.twists_l), len(q.twists_k), p.field, p.num_vars)
    z_lk2 = _zero_matrix(len(q.twists_l), len(p.twists_k), p.field, p.num_vars)
    alpha = [list(row) + list(zrow) for row, zrow in zip(p.alpha, z_lk)] + [
        list(zrow) + list(row) for zrow, row in zip(z_lk2, q.alpha)
    ]
    z_kl = _zero_matrix(len(p.twists_k), len(q.twists_l), p.field, p.num_vars)
    z_kl2 = _zero_matrix(len(q.twists_k), len(p.twists_l), p.field, p.num_vars)
    beta = [list(row) + list(zrow) for row, zrow in zip(p.beta, z_kl)] + [
        list(zrow) + list(row) for zrow, row in zip(z_kl2, q.beta)
    ]
    return MatrixFactorization(
        f=p.f, d=p.d,
        twists_k=p.twists_k + q.twists_k,
        twists_l=p.twists_l + q.twists_l,
        alpha=_mat(alpha), beta=_mat(beta),
    )


# --------------------------------------------------------------------------
# Koszul construction

def koszul_mf(
    f: Polynomial, pairs: Sequence[Tuple[Polynomial, Polynomial]]
) -> MatrixFactorization:
    """Tensor of the rank-1 factorizations (a_i, b_i) with sum a_i b_i = f.

    Basis vectors e_S are indexed by subsets S of {0..k-1} (bitmask order,
    ascending); even-|S| masks span K, odd-|S| masks span L.  The
    differential is D = sum_i (a_i eps_i + b_i iota_i) where eps/iota
    create/annihilate index i with the sign (-1)^(number of j in S with
    j < i).  alpha and beta are the two parity blocks of D.
    """
    if not pairs:
        raise MFError("need at least one factor pair")
    d = f.homogeneous_degree()
    if d is None:
        raise MFError("potential must be homogeneous and nonzero")
    field, nv = f.field, f.num_vars
    weights = []
    total = Polynomial.zero(field, nv)
    for idx, (a, b) in enumerate(pairs):
        if a.is_zero or b.is_zero:
            raise MFError(f"factor pair {idx} has a zero component")
        wa, wb = a.homogeneous_degree(), b.homogeneous_degree()
        if wa + wb != d:
            raise MFError(
                f"factor pair {idx} degrees {wa}+{wb} do not sum to d = {d}"
            )
        weights.append(wa)
        total = total + a * b
    if total != f:
        raise MFError("decomposition identity sum(a_i*b_i) = f fails")

    k = len(pairs)
    masks_k = [m for m in range(1 << k) if bin(m).count("1") % 2 == 0]
    masks_l = [m for m in range(1 << k) if bin(m).count("1") % 2 == 1]
    pos_k = {m: i for i, m in enumerate(masks_k)}
    pos_l = {m: i for i, m in enumerate(masks_l)}

    def twist(mask: int) -> int:
        size = bin(mask).count("1")
        w = sum(weights[i] for i in range(k) if mask >> i & 1)
        return d * (size // 2) - w

    def sign(mask: int, i: int) -> int:
        preceding = bin(mask & ((1 << i) - 1)).count("1")
        return -1 if preceding % 2 else 1

    zero = Polynomial.zero(field, nv)
    alpha = [[zero for _ in masks_k] for _ in masks_l]
    beta = [[zero for _ in masks_l] for _ in masks_k]

    def apply_d(src_mask: int, src_col: int, target_rows, matrix):
        for i, (a, b) in enumerate(pairs):
            if src_mask >> i & 1:
                dst = src_mask & ~(1 << i)
                entry = b.scale(field.from_int(sign(dst, i)))
            else:
                dst = src_mask | (1 << i)
                entry = a.scale(field.from_int(sign(src_mask, i)))
            row = target_rows[dst]
            matrix[row][src_col] = matrix[row][src_col] + entry

    for col, mask in enumerate(masks_k):
        apply_d(mask, col, pos_l, alpha)
    for col, mask in enumerate(masks_l):
        apply_d(mask, col, pos_k, beta)

    return MatrixFactorization(
        f=f, d=d,
        twists_k=tuple(twist(m) for m in masks_k),
        twists_l=tuple(twist(m) for m in masks_l),
        alpha=_mat(alpha), beta=_mat(beta),
    )


def termwise_decomposition(
    f: Polynomial,
) -> List[Tuple[Polynomial, Polynomial]]:
    """One Koszul pair per term: a = least variable dividing the term, b = rest."""
    if f.is_zero or f.homogeneous_degree() is None:
        raise MFError("need a nonzero homogeneous polynomial")
    pairs = []
    field = f.field
    for mono, coeff in f.terms.items():
        i = next(j for j, e in enumerate(mono.exponents) if e > 0)
        rest = list(mono.exponents)
        rest[i] -= 1
        a = Polynomial.variable(field, f.num_vars, i)
        b = Polynomial.from_monomial(field, Monomial(tuple(rest)), coeff)
        pairs.append((a, b))
    return pairs


def _divide_by_variable_difference(
    p: Polynomial, y: int, x: int
) -> Polynomial:
    """Exact quotient p / (x_y - x_x) by synthetic division in x_y.

    Requires the remainder (p with x_y replaced by x_x) to vanish, which
    holds for every difference-quotient numerator by construction; the
    division is verified by multiplying back.
    """
    field, nv = p.field, p.num_vars
    by_power: Dict[int, Dict[Monomial, object]] = {}
    for mono, coeff in p.terms.items():
        e = mono.exponents[y]
        stripped = list(mono.exponents)
        stripped[y] = 0
        by_power.setdefault(e, {})[Monomial(tuple(stripped))] = coeff
    if not by_power:
        return Polynomial.zero(field, nv)
    top = max(by_power)
    xv = Polynomial.variable(field, nv, x)
    yv = Polynomial.variable(field, nv, y)
    carry = Polynomial.zero(field, nv)
    quotient = Polynomial.zero(field, nv)
    for e in range(top, 0, -1):
        coeff_poly = Polynomial(field, nv, by_power.get(e, {}))
        carry = coeff_poly + (xv * carry)
        quotient = quotient + carry * (yv ** (e - 1))
    remainder = Polynomial(field, nv, by_power.get(0, {})) + xv * carry
    if not remainder.is_zero:
        raise MFError("difference-quotient division left a remainder")
    if quotient * (yv - xv) != p:
        raise MFError("difference-quotient division failed verification")
    return quotient


def difference_quotients(f: Polynomial) -> List[Polynomial]:
    """q_i(x, y) with f(y) - f(x) = sum_i (y_i - x_i) q_i, over 2k variables.

    Variable i of f becomes x_i = slot i and y_i = slot k+i.  q_i is the
    one-variable-at-a-time difference quotient: replace x_0..x_{i} by
    y_0..y_{i} in stages and divide each increment by (y_i - x_i).
    """
    k = f.num_vars
    stages = []
    for upto in range(k + 1):
        index_map = [k + j if j < upto else j for j in range(k)]
        stages.append(f.remap_variables(2 * k, index_map))
    quotients = []
    for i in range(k):
        numerator = stages[i + 1] - stages[i]
        quotients.append(_divide_by_variable_difference(numerator, k + i, i))
    return quotients


def stabilized_diagonal(f: Polynomial) -> MatrixFactorization:
    """Koszul MF of w = f(y) - f(x) for the difference-quotient decomposition.

    This is the canonical diagonal kernel Q_0; its degree shifts
    ``degree_shift(Q_0, ell)`` play the role of the kernels Q_ell.
    """
    if f.is_zero or f.homogeneous_degree() is None:
        raise MFError("need a nonzero homogeneous polynomial")
    k = f.num_vars
    w = f.remap_variables(2 * k, list(range(k, 2 * k))) - f.remap_variables(
        2 * k, list(range(k))
    )
    quotients = difference_quotients(f)
    pairs = []
    for i in range(k):
        linear = Polynomial.variable(f.field, 2 * k, k + i) - Polynomial.variable(
            f.field, 2 * k, i
        )
        pairs.append((linear, quotients[i]))
    return koszul_mf(w, pairs)


# --------------------------------------------------------------------------
# morphisms and homotopies

@dataclass(frozen=True)
class MFMorphism:
    """A morphism P -> P'(twist): matrices g on the K side, h on the L side."""

    source: MatrixFactorization
    target: MatrixFactorization
    twist: int
    g: PolyMatrix  # |K'| x |K|
    h: PolyMatrix  # |L'| x |L|

    def g_degree(self, r: int, c: int) -> int:
        return self.source.twists_k[c] - self.target.twists_k[r] + self.twist

    def h_degree(self, r: int, c: int) -> int:
        return self.source.twists_l[c] - self.target.twists_l[r] + self.twist

    def validate(self) -> ValidationReport:
        violations = []

        def check_matrix(name, matrix, rows, cols, degree_of):
            if len(matrix) != rows or any(len(row) != cols for row in matrix):
                violations.append({
                    "kind": "shape", "matrix": name,
                    "expected": (rows, cols),
                    "actual": (len(matrix), len(matrix[0]) if matrix else 0),
                })
                return
            for r in range(rows):
                for c in range(cols):
                    entry = matrix[r][c]
                    if entry.is_zero:
                        continue
                    try:
                        actual = entry.homogeneous_degree()
                    except PolyError:
                        actual = "inhomogeneous"
                    if actual != degree_of(r, c):
                        violations.append({
                            "kind": "degree", "matrix": name, "cell": (r, c),
                            "expected": degree_of(r, c), "actual": actual,
                        })

        check_matrix(
            "g", self.g, len(self.target.twists_k), len(self.source.twists_k),
            self.g_degree,
        )
        check_matrix(
            "h", self.h, len(self.target.twists_l), len(self.source.twists_l),
            self.h_degree,
        )
        if not violations:
            lhs1 = _mat_mul(self.target.alpha, self.g)
            rhs1 = _mat_mul(self.h, self.source.alpha)
            if not _mat_eq(lhs1, rhs1):
                violations.append({"kind": "commutation", "matrix": "alpha'.g = h.alpha"})
            lhs2 = _mat_mul(self.target.beta, self.h)
            rhs2 = _mat_mul(self.g, self.source.beta)
            if not _mat_eq(lhs2, rhs2):
                violations.append({"kind": "commutation", "matrix": "beta'.h = g(d).beta"})
        return ValidationReport(ok=not violations, violations=tuple(violations))

    def is_zero(self) -> bool:
        return all(e.is_zero for row in self.g for e in row) and all(
            e.is_zero for row in self.h for e in row
        )

    def __add__(self, other: "MFMorphism") -> "MFMorphism":
        self._same_profile(other)
        g = tuple(
            tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.g, other.g)
        )
        h = tuple(
            tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.h, other.h)
        )
        return MFMorphism(self.source, self.target, self.twist, g, h)

    def __neg__(self) -> "MFMorphism":
        return MFMorphism(
            self.source, self.target, self.twist, _mat_neg(self.g), _mat_neg(self.h)
        )

    def __sub__(self, other: "MFMorphism") -> "MFMorphism":
        return self + (-other)

    def _same_profile(self, other: "MFMorphism"):
        if (
            self.source != other.source
            or self.target != other.target
            or self.twist != other.twist
        ):
            raise MFError("morphism profiles differ")

    def __eq__(self, other) -> bool:
        if not isinstance(other, MFMorphism):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.twist == other.twist
            and _mat_eq(self.g, other.g)
            and _mat_eq(self.h, other.h)
        )

    def __hash__(self):
        return hash((self.source, self.target, self.twist))


def compose(outer: MFMorphism, inner: MFMorphism) -> MFMorphism:
    """outer(inner.twist) . inner : source(inner) -> target(outer)(sum of twists)."""
    if inner.target != outer.source:
        raise MFError("composition profile mismatch (inner.target != outer.source)")
    return MFMorphism(
        source=inner.source,
        target=outer.target,
        twist=inner.twist + outer.twist,
        g=_mat_mul(outer.g, inner.g),
        h=_mat_mul(outer.h, inner.h),
    )


def mult_by_section(
    p: MatrixFactorization, s: Polynomial, degree: Optional[int] = None
) -> MFMorphism:
    """Multiplication by a homogeneous section: (s.id_K, s.id_L), twist deg s."""
    if s.field != p.field or s.num_vars != p.num_vars:
        raise MFError("section/object ring mismatch")
    sdeg = s.homogeneous_degree()
    if sdeg is None:
        if degree is None:
            raise MFError("zero section needs an explicit twist")
        sdeg = degree
    rk, rl = p.rank
    return MFMorphism(
        source=p,
        target=p,
        twist=sdeg,
        g=_scaled_identity(rk, s),
        h=_scaled_identity(rl, s),
    )


@dataclass(frozen=True)
class Homotopy:
    """A homotopy pair of twist ``twist``: s: L -> K'(twist), t: K(d) -> L'(twist)."""

    source: MatrixFactorization
    target: MatrixFactorization
    twist: int
    s: PolyMatrix  # |K'| x |L|
    t: PolyMatrix  # |L'| x |K|

    def s_degree(self, r: int, c: int) -> int:
        return self.source.twists_l[c] - self.target.twists_k[r] + self.twist

    def t_degree(self, r: int, c: int) -> int:
        return self.source.twists_k[c] - self.target.twists_l[r] + self.twist - self.source.d

    def boundary(self) -> MFMorphism:
        """(SA + B'T, A'S + TB) -- always a closed morphism."""
        g_part = _mat_mul(self.s, self.source.alpha)
        g_full = tuple(
            tuple(a + b for a, b in zip(ra, rb))
            for ra, rb in zip(g_part, _mat_mul(self.target.beta, self.t))
        )
        h_part = _mat_mul(self.target.alpha, self.s)
        h_full = tuple(
            tuple(a + b for a, b in zip(ra, rb))
            for ra, rb in zip(h_part, _mat_mul(self.t, self.source.beta))
        )
        return MFMorphism(self.source, self.target, self.twist, g_full, h_full)

    def __neg__(self) -> "Homotopy":
        return Homotopy(
            self.source, self.target, self.twist, _mat_neg(self.s), _mat_neg(self.t)
        )


def chain_rule_homotopy(p: MatrixFactorization, i: int) -> Homotopy:
    """The Leibniz certificate (d_i beta, d_i alpha) for d_i f ~ 0.

    Its boundary is exactly mult_by_section(p, d_i f): differentiating
    beta.alpha = f.id entrywise gives (d_i beta).alpha + beta.(d_i alpha)
    = (d_i f).id, and likewise on the other side.
    """
    if not 0 <= i < p.num_vars:
        raise MFError(f"variable index {i} out of range")
    return Homotopy(
        source=p,
        target=p,
        twist=p.d - 1,
        s=_mat_partial(p.beta, i),
        t=_mat_partial(p.alpha, i),
    )


# --------------------------------------------------------------------------
# coordinatizations of morphism / homotopy spaces

class _CoordSpace:
    """Flat coordinates for a pair of matrices with forced entry degrees.

    Slots enumerate (matrix tag, row, col, monomial) for every entry whose
    forced degree is >= 0; entries of negative forced degree are
    identically zero and get no slots.
    """

    def __init__(self, field: Field, num_vars: int, blocks):
        # blocks: list of (tag, nrows, ncols, degree_of(r, c))
        self.field = field
        self.num_vars = num_vars
        self.slots: List[Tuple[str, int, int, Monomial]] = []
        self.index: Dict[Tuple[str, int, int, Monomial], int] = {}
        self.shapes = {}
        self.degree_of = {}
        for tag, nrows, ncols, degree_of in blocks:
            self.shapes[tag] = (nrows, ncols)
            self.degree_of[tag] = degree_of
            for r in range(nrows):
                for c in range(ncols):
                    deg = degree_of(r, c)
                    if deg < 0:
                        continue
                    for mono in monomial_basis(num_vars, deg):
                        key = (tag, r, c, mono)
                        self.index[key] = len(self.slots)
                        self.slots.append(key)

    @property
    def size(self) -> int:
        return len(self.slots)

    def vector_of(self, matrices: Dict[str, PolyMatrix]) -> Dict[int, object]:
        """Coordinates of concrete matrices; errors on out-of-window terms."""
        vec: Dict[int, object] = {}
        for tag, matrix in matrices.items():
            for r, row in enumerate(matrix):
                for c, entry in enumerate(row):
                    for mono, coeff in entry.terms.items():
                        key = (tag, r, c, mono)
                        idx = self.index.get(key)
                        if idx is None:
                            raise MFError(
                                f"entry {tag}[{r}][{c}] has a term of the "
                                f"wrong degree ({mono.render()})"
                            )
                        vec[idx] = coeff
        return vec

    def matrices_of(self, vec: Dict[int, object]) -> Dict[str, PolyMatrix]:
        acc: Dict[str, List[List[Dict[Monomial, object]]]] = {
            tag: [
                [dict() for _ in range(cols)] for _ in range(rows)
            ]
            for tag, (rows, cols) in self.shapes.items()
        }
        for idx, coeff in vec.items():
            tag, r, c, mono = self.slots[idx]
            acc[tag][r][c][mono] = coeff
        out = {}
        for tag, grid in acc.items():
            out[tag] = tuple(
                tuple(
                    Polynomial(self.field, self.num_vars, cell) for cell in row
                )
                for row in grid
            )
        return out

    def estimated_equations(self, blocks) -> int:
        """Closed-form count of scalar equations for the given output blocks."""
        total = 0
        for nrows, ncols, degree_of in blocks:
            for r in range(nrows):
                for c in range(ncols):
                    deg = degree_of(r, c)
                    if deg >= 0:
                        total += comb(self.num_vars - 1 + deg, deg)
        return total


def _morphism_coords(
    source: MatrixFactorization, target: MatrixFactorization, ell: int
) -> _CoordSpace:
    rk_t, rl_t = len(target.twists_k), len(target.twists_l)
    rk_s, rl_s = len(source.twists_k), len(source.twists_l)
    return _CoordSpace(
        source.field,
        source.num_vars,
        [
            ("g", rk_t, rk_s, lambda r, c: source.twists_k[c] - target.twists_k[r] + ell),
            ("h", rl_t, rl_s, lambda r, c: source.twists_l[c] - target.twists_l[r] + ell),
        ],
    )


def _homotopy_coords(
    source: MatrixFactorization, target: MatrixFactorization, ell: int
) -> _CoordSpace:
    rk_t, rl_t = len(target.twists_k), len(target.twists_l)
    rk_s, rl_s = len(source.twists_k), len(source.twists_l)
    d = source.d
    return _CoordSpace(
        source.field,
        source.num_vars,
        [
            ("s", rk_t, rl_s, lambda r, c: source.twists_l[c] - target.twists_k[r] + ell),
            ("t", rl_t, rk_s, lambda r, c: source.twists_k[c] - target.twists_l[r] + ell - d),
        ],
    )


def _boundary_columns(
    source: MatrixFactorization,
    target: MatrixFactorization,
    hcoords: _CoordSpace,
    mcoords: _CoordSpace,
):
    """Yield (homotopy slot index, {morphism slot: coeff}) columns of d.

    Uses the sparse structural formulas: an s-slot (r, c, mu) contributes
    mu*A[c][c'] to g[r][c'] and A'[r'][r]*mu to h[r'][c]; a t-slot
    (r, c, mu) contributes B'[r'][r]*mu to g[r'][c] and mu*B[c][c'] to
    h[r][c'].
    """
    field = source.field
    A, B = source.alpha, source.beta
    A_t, B_t = target.alpha, target.beta

    def add_terms(column, tag, r, c, poly, mu):
        for mono, coeff in poly.terms.items():
            key = (tag, r, c, mono * mu)
            idx = mcoords.index.get(key)
            if idx is None:
                # forced-degree bookkeeping guarantees a slot for every
                # structurally possible term
                raise MFError("boundary term outside the morphism window")
            acc = field.add(column.get(idx, field.zero()), coeff)
            if field.is_zero(acc):
                column.pop(idx, None)
            else:
                column[idx] = acc

    for hidx, (tag, r, c, mu) in enumerate(hcoords.slots):
        column: Dict[int, object] = {}
        if tag == "s":
            for c2 in range(len(A[0]) if A else 0):
                add_terms(column, "g", r, c2, A[c][c2], mu)
            for r2 in range(len(A_t)):
                add_terms(column, "h", r2, c, A_t[r2][r], mu)
        else:
            for r2 in range(len(B_t)):
                add_terms(column, "g", r2, c, B_t[r2][r], mu)
            for c2 in range(len(B[0]) if B else 0):
                add_terms(column, "h", r, c2, B[c][c2], mu)
        yield hidx, column


def _cycle_rows(
    source: MatrixFactorization,
    target: MatrixFactorization,
    mcoords: _CoordSpace,
) -> List[Dict[int, object]]:
    """Constraint rows: coefficients of A'G - HA and B'H - GB, per monomial."""
    field = source.field
    A, B = source.alpha, source.beta
    A_t, B_t = target.alpha, target.beta
    rows: Dict[Tuple, Dict[int, object]] = {}

    def accumulate(out_key, slot_idx, coeff):
        row = rows.setdefault(out_key, {})
        acc = field.add(row.get(slot_idx, field.zero()), coeff)
        if field.is_zero(acc):
            row.pop(slot_idx, None)
        else:
            row[slot_idx] = acc

    for slot_idx, (tag, r, c, mu) in enumerate(mcoords.slots):
        if tag == "g":
            # A'G lands in block c1 (|L'| x |K|) at rows (r2, c)
            for r2 in range(len(A_t)):
                for mono, coeff in A_t[r2][r].terms.items():
                    accumulate(("c1", r2, c, mono * mu), slot_idx, coeff)
            # -GB lands in block c2 (|K'| x |L|) at rows (r, c2)
            for c2 in range(len(B[0]) if B else 0):
                for mono, coeff in B[c][c2].terms.items():
                    accumulate(("c2", r, c2, mono * mu), slot_idx, field.neg(coeff))
        else:
            # -HA in block c1 at rows (r, c2)
            for c2 in range(len(A[0]) if A else 0):
                for mono, coeff in A[c][c2].terms.items():
                    accumulate(("c1", r, c2, mono * mu), slot_idx, field.neg(coeff))
            # B'H in block c2 at rows (r2, c)
            for r2 in range(len(B_t)):
                for mono, coeff in B_t[r2][r].terms.items():
                    accumulate(("c2", r2, c, mono * mu), slot_idx, coeff)
    return [row for _, row in sorted(rows.items(), key=lambda kv: repr(kv[0]))]


def _require_same_potential(p: MatrixFactorization, q: MatrixFactorization):
    if p.f != q.f or p.d != q.d:
        raise MFError("objects have mismatched potentials")


def is_null_homotopic(
    m: MFMorphism, budget: Optional[int] = None
) -> Optional[Homotopy]:
    """Solve boundary(s, t) = m exactly; a Homotopy certificate or None.

    The unknowns are the monomial coefficients of all forced-degree slots
    of (s, t); the equations equate boundary coefficients with those of
    m.  A returned certificate is re-verified by computing its boundary.
    None means the linear system is inconsistent, i.e. the class of m is
    genuinely nonzero.
    """
    _require_same_potential(m.source, m.target)
    report = m.validate()
    if not report.ok:
        raise MFError(f"morphism invalid: {report.first_violation}")
    mcoords = _morphism_coords(m.source, m.target, m.twist)
    hcoords = _homotopy_coords(m.source, m.target, m.twist)
    check_budget(mcoords.size, max(hcoords.size, 1), budget, "isNullHomotopic")
    target_vec = mcoords.vector_of({"g": m.g, "h": m.h})

    # transpose boundary columns into equation rows over homotopy slots
    equations: Dict[int, Dict[int, object]] = {}
    for hidx, column in _boundary_columns(m.source, m.target, hcoords, mcoords):
        for midx, coeff in column.items():
            equations.setdefault(midx, {})[hidx] = coeff
    row_keys = sorted(set(equations) | set(target_vec))
    rows = [equations.get(k, {}) for k in row_keys]
    rhs = [target_vec.get(k, m.source.field.zero()) for k in row_keys]
    solution = solve(m.source.field, rows, rhs, hcoords.size)
    if solution is None:
        return None
    matrices = hcoords.matrices_of(solution)
    certificate = Homotopy(
        m.source, m.target, m.twist, matrices["s"], matrices["t"]
    )
    if certificate.boundary() != m:
        raise MFError("internal error: homotopy certificate failed verification")
    return certificate


# --------------------------------------------------------------------------
# hom spaces in the homotopy category

class HomSpace:
    """Hom(P, P'(ell)) in the homotopy category, with explicit reduction.

    dimension = dim(closed pairs) - dim(boundaries); basis representatives
    are canonical RREF vectors of the quotient, and ``class_of`` reduces
    any valid morphism to coordinates over that basis.
    """

    def __init__(
        self,
        source: MatrixFactorization,
        target: MatrixFactorization,
        ell: int,
        budget: Optional[int] = None,
    ):
        _require_same_potential(source, target)
        self.source = source
        self.target = target
        self.ell = ell
        field = source.field
        self.field = field
        self._mcoords = _morphism_coords(source, target, ell)
        hcoords = _homotopy_coords(source, target, ell)
        estimated_rows = self._mcoords.estimated_equations(
            [
                (
                    len(target.twists_l),
                    len(source.twists_k),
                    lambda r, c: source.twists_k[c] - target.twists_l[r] + ell,
                ),
                (
                    len(target.twists_k),
                    len(source.twists_l),
                    lambda r, c: source.twists_l[c] - target.twists_k[r] + ell + source.d,
                ),
            ]
        )
        check_budget(
            estimated_rows + hcoords.size,
            max(self._mcoords.size, 1),
            budget,
            f"homSpace twist {ell}",
        )

        cycle_constraints = _cycle_rows(source, target, self._mcoords)
        cycles = kernel_basis(field, cycle_constraints, self._mcoords.size)

        self._boundary_rref = SparseRREF(field)
        for _, column in _boundary_columns(source, target, hcoords, self._mcoords):
            self._boundary_rref.add_row(column)

        self._class_rref = SparseRREF(field)
        for vec in cycles:
            reduced = self._boundary_rref.reduce(vec)
            if reduced:
                self._class_rref.add_row(reduced)
        self.dimension = len(cycles) - self._boundary_rref.rank
        if self.dimension != self._class_rref.rank:
            raise MFError(
                "internal error: boundary space escapes the cycle space"
            )
        self._pivot_order = self._class_rref.pivot_columns()

    def basis(self) -> List[MFMorphism]:
        """Canonical representative morphisms, one per basis class."""
        out = []
        for col in self._pivot_order:
            vec = self._class_rref.pivot_rows[col]
            matrices = self._mcoords.matrices_of(vec)
            out.append(
                MFMorphism(
                    self.source, self.target, self.ell, matrices["g"], matrices["h"]
                )
            )
        return out

    def class_of(self, m: MFMorphism) -> Tuple[object, ...]:
        """Coordinates of [m] over basis(); errors if m is not a valid cycle."""
        if m.source != self.source or m.target != self.target or m.twist != self.ell:
            raise MFError("morphism profile does not match this hom space")
        report = m.validate()
        if not report.ok:
            raise MFError(f"morphism invalid: {report.first_violation}")
        vec = self._mcoords.vector_of({"g": m.g, "h": m.h})
        residue = self._boundary_rref.reduce(vec)
        coords = {}
        field = self.field
        for col in self._pivot_order:
            coeff = residue.get(col)
            if coeff is None or field.is_zero(coeff):
                continue
            coords[col] = coeff
            row = self._class_rref.pivot_rows[col]
            for rcol, rval in row.items():
                acc = field.sub(residue.get(rcol, field.zero()), field.mul(coeff, rval))
                if field.is_zero(acc):
                    residue.pop(rcol, None)
                else:
                    residue[rcol] = acc
        if residue:
            raise MFError(
                "morphism is not in the cycle space of this hom space "
                "(or reduction failed)"
            )
        return tuple(coords.get(col, field.zero()) for col in self._pivot_order)

    def is_zero_class(self, m: MFMorphism) -> bool:
        return all(self.field.is_zero(c) for c in self.class_of(m))


def hom_space(
    source: MatrixFactorization,
    target: MatrixFactorization,
    ell: int,
    budget: Optional[int] = None,
) -> HomSpace:
    return HomSpace(source, target, ell, budget=budget)


# --------------------------------------------------------------------------
# the graded ring L_MF

class LMFRing:
    """L_MF = (+)_{0<=ell<=N} Hom(Q0, Q0(ell)) with composition product.

    Products are computed on representatives and re-reduced; homotopy-class
    well-definedness is a tested invariant, not an assumption.
    """

    def __init__(self, f: Polynomial, max_degree: int, budget: Optional[int] = None):
        from .jacobian import JacobianRing  # local import to avoid a cycle

        self.f = f
        self.jacobian = JacobianRing(f, budget=budget)
        if not self.jacobian.is_smooth():
            raise MFError("lmfRing requires a smooth potential")
        self.max_degree = max_degree
        self.q0 = stabilized_diagonal(f)
        self.hom: Dict[int, HomSpace] = {}
        for ell in range(max_degree + 1):
            self.hom[ell] = HomSpace(self.q0, self.q0, ell, budget=budget)

    def dims(self) -> Tuple[int, ...]:
        return tuple(self.hom[ell].dimension for ell in range(self.max_degree + 1))

    def section_class(self, p: Polynomial) -> Tuple[int, Tuple[object, ...]]:
        """Class of multiplication by p(x) (x-side embedding of a section)."""
        ell = p.homogeneous_degree()
        if ell is None:
            raise MFError("section must be homogeneous and nonzero")
        if ell > self.max_degree:
            raise MFError(f"section degree {ell} exceeds window {self.max_degree}")
        embedded = p.remap_variables(2 * p.num_vars, list(range(p.num_vars)))
        morphism = mult_by_section(self.q0, embedded)
        return ell, self.hom[ell].class_of(morphism)

    def product(
        self,
        ell1: int,
        coords1: Sequence[object],
        ell2: int,
        coords2: Sequence[object],
    ) -> Tuple[object, ...]:
        """Class of the composition (degree ell1 elt) * (degree ell2 elt).

        The product of x in degree ell1 and y in degree ell2 is the class
        of y(ell1) . x in degree ell1+ell2.
        """
        ell = ell1 + ell2
        if ell > self.max_degree:
            raise MFError(f"product degree {ell} exceeds window {self.max_degree}")
        basis1 = self.hom[ell1].basis()
        basis2 = self.hom[ell2].basis()
        field = self.f.field
        result_space = self.hom[ell]
        acc_coords = [field.zero()] * result_space.dimension
        for c1, m1 in zip(coords1, basis1):
            if field.is_zero(c1):
                continue
            for c2, m2 in zip(coords2, basis2):
                if field.is_zero(c2):
                    continue
                composite = compose(m2, m1)
                cls = result_space.class_of(composite)
                scale = field.mul(c1, c2)
                acc_coords = [
                    field.add(a, field.mul(scale, b))
                    for a, b in zip(acc_coords, cls)
                ]
        return tuple(acc_coords)


def lmf_ring(f: Polynomial, max_degree: int, budget: Optional[int] = None) -> LMFRing:
    return LMFRing(f, max_degree, budget=budget)


def compare_with_jacobian(
    f: Polynomial, max_degree: int, budget: Optional[int] = None
) -> dict:
    """Test the section-induced graded map J(f)_ell -> Hom(Q0, Q_ell).

    Per degree ell <= max_degree the report records: the rank of the map
    on the quotient basis (injectivity check), vanishing of every ideal
    element's class (the map factors through J), agreement of the
    degree-1-generated subring of L_MF with the image, and the full
    multiplication-table comparison against J.  The d_i f vanishing is
    double-checked with an explicit chain-rule homotopy certificate.
    """
    ring = lmf_ring(f, max_degree, budget=budget)
    J = ring.jacobian
    field = f.field
    k = f.num_vars

    def embed(p: Polynomial) -> Polynomial:
        return p.remap_variables(2 * k, list(range(k)))

    report: dict = {
        "dims_hom": ring.dims(),
        "dims_jacobian": tuple(
            J.dim(ell) for ell in range(min(max_degree, J.sigma + J.d) + 1)
        ),
        "degrees": {},
        "injective": True,
        "factors_through_jacobian": True,
        "subring_matches": True,
        "multiplication_matches": True,
    }

    # classes of the quotient-basis monomials, per degree
    phi: Dict[int, List[Tuple[object, ...]]] = {}
    for ell in range(max_degree + 1):
        classes = []
        for mono in J.quotient_basis(ell):
            _, cls = ring.section_class(Polynomial.from_monomial(field, mono))
            classes.append(cls)
        phi[ell] = classes
        rank = _span_rank(field, classes)
        injective = rank == J.dim(ell)
        report["degrees"][ell] = {
            "jacobian_dim": J.dim(ell),
            "hom_dim": ring.hom[ell].dimension,
            "map_rank": rank,
            "injective": injective,
        }
        if not injective:
            report["injective"] = False

    # the map kills the ideal: every m * d_i f with deg <= N maps to 0
    ideal_failures = []
    for i in range(k):
        partial = J.partials[i]
        if partial.is_zero:
            continue
        base_degree = partial.homogeneous_degree()
        for extra in range(max_degree - base_degree + 1):
            for mono in monomial_basis(k, extra):
                element = Polynomial.from_monomial(field, mono) * partial
                ell, cls = ring.section_class(element)
                if any(not field.is_zero(c) for c in cls):
                    ideal_failures.append(
                        {"variable": i, "multiplier": mono.render(), "degree": ell}
                    )
    if ideal_failures:
        report["factors_through_jacobian"] = False
        report["ideal_failures"] = ideal_failures

    # chain-rule certificates: d_{x_i} w = -(d_i f)(x), so the negated
    # homotopy certifies multiplication by (d_i f)(x)
    certificates = []
    for i in range(k):
        homotopy = -chain_rule_homotopy(ring.q0, i)
        expected = mult_by_section(
            ring.q0, embed(J.partials[i]), degree=J.d - 1
        )
        certificates.append(homotopy.boundary() == expected)
    report["chain_rule_certificates"] = tuple(certificates)
    if not all(certificates):
        report["factors_through_jacobian"] = False

    # degree-1-generated subring vs the image of J
    subring_dims = [1 if ring.hom[0].dimension >= 1 else 0]
    generators = phi.get(1, [])
    current: List[Tuple[object, ...]] = [
        ring.hom[0].class_of(mult_by_section(ring.q0, Polynomial.one(field, 2 * k)))
    ]
    for ell in range(1, max_degree + 1):
        products = []
        for prev in current:
            for gen in generators:
                products.append(ring.product(ell - 1, prev, 1, gen))
        image = phi[ell]
        subring_rank = _span_rank(field, products)
        image_rank = _span_rank(field, image)
        joint_rank = _span_rank(field, products + image)
        subring_dims.append(subring_rank)
        if not (subring_rank == image_rank == joint_rank):
            report["subring_matches"] = False
        current = products
    report["subring_dims"] = tuple(subring_dims)

    # multiplication tables: phi(m1) * phi(m2) == phi(normal form of m1*m2)
    mismatches = []
    for ell1 in range(max_degree + 1):
        for ell2 in range(max_degree + 1 - ell1):
            basis1 = J.quotient_basis(ell1)
            basis2 = J.quotient_basis(ell2)
            target_basis_classes = phi[ell1 + ell2]
            for i1, m1 in enumerate(basis1):
                for i2, m2 in enumerate(basis2):
                    lhs = ring.product(
                        ell1, phi[ell1][i1], ell2, phi[ell2][i2]
                    )
                    nf = J.normal_form(
                        Polynomial.from_monomial(field, m1 * m2)
                    )
                    rhs = [field.zero()] * ring.hom[ell1 + ell2].dimension
                    for coeff, cls in zip(nf, target_basis_classes):
                        rhs = [
                            field.add(a, field.mul(coeff, b))
                            for a, b in zip(rhs, cls)
                        ]
                    if list(lhs) != list(rhs):
                        mismatches.append(
                            {
                                "left": m1.render(),
                                "right": m2.render(),
                                "degrees": (ell1, ell2),
                            }
                        )
    if mismatches:
        report["multiplication_matches"] = False
        report["multiplication_mismatches"] = mismatches

    report["ok"] = (
        report["injective"]
        and report["factors_through_jacobian"]
        and report["subring_matches"]
        and report["multiplication_matches"]
    )
    return report


def _span_rank(field: Field, vectors: Sequence[Sequence[object]]) -> int:
    rref = SparseRREF(field)
    for vec in vectors:
        rref.add_row(
            {i: c for i, c in enumerate(vec) if not field.is_zero(c)}
        )
    return rref.rank


# --------------------------------------------------------------------------
# text serialization

def mf_to_text(p: MatrixFactorization) -> str:
    """Serialize: header, twist lists, then alpha and beta row-major.

    Matrix entries are polynomial strings separated by " ; ", one row per
    line.  The potential is re-derivable from beta*alpha but stored
    explicitly for readability.
    """
    lines = [
        f"vars {p.num_vars}",
        f"degree {p.d}",
        f"f {p.f.render()}",
        "twistsK " + " ".join(str(a) for a in p.twists_k),
        "twistsL " + " ".join(str(a) for a in p.twists_l),
        "alpha",
    ]
    for row in p.alpha:
        lines.append(" ; ".join(entry.render() for entry in row))
    lines.append("beta")
    for row in p.beta:
        lines.append(" ; ".join(entry.render() for entry in row))
    return "\n".join(lines) + "\n"


def mf_from_text(text: str, field: Field) -> MatrixFactorization:
    lines = [
        line.strip()
        for line in text.splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]
    header: Dict[str, str] = {}
    cursor = 0
    while cursor < len(lines) and lines[cursor] != "alpha":
        key, _, value = lines[cursor].partition(" ")
        header[key] = value.strip()
        cursor += 1
    for required in ("vars", "degree", "f", "twistsK", "twistsL"):
        if required not in header:
            raise MFError(f"missing '{required}' line in MF block")
    num_vars = int(header["vars"])
    d = int(header["degree"])
    f = Polynomial.parse(header["f"], num_vars, field)
    twists_k = tuple(int(tok) for tok in header["twistsK"].split())
    twists_l = tuple(int(tok) for tok in header["twistsL"].split())
    if cursor >= len(lines) or lines[cursor] != "alpha":
        raise MFError("missing 'alpha' section in MF block")
    cursor += 1
    alpha_rows = []
    while cursor < len(lines) and lines[cursor] != "beta":
        alpha_rows.append(
            tuple(
                Polynomial.parse(cell.strip(), num_vars, field)
                for cell in lines[cursor].split(";")
            )
        )
        cursor += 1
    if cursor >= len(lines) or lines[cursor] != "beta":
        raise MFError("missing 'beta' section in MF block")
    cursor += 1
    beta_rows = []
    while cursor < len(lines):
        beta_rows.append(
            tuple(
                Polynomial.parse(cell.strip(), num_vars, field)
                for cell in lines[cursor].split(";")
            )
        )
        cursor += 1
    return MatrixFactorization(
        f=f, d=d, twists_k=twists_k, twists_l=twists_l,
        alpha=tuple(alpha_rows), beta=tuple(beta_rows),
    )
