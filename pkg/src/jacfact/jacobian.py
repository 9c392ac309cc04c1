"""Jacobian (Milnor) rings of homogeneous forms, with Gorenstein data.

For a homogeneous ``f`` of degree d in ``nv`` variables, the Jacobian
ring is J = k[x0..x_{nv-1}]/(df/dx_i).  Because the ideal is generated in
the single degree d-1, each graded piece is an explicit row space: degree
by degree we row-reduce the span of ``m * df/dx_i`` over the monomial
basis and read the quotient off the free columns.  No Groebner machinery
is needed or used.

The socle degree is sigma = nv*(d-2); for smooth ``f`` the ring is
Artinian with one-dimensional top piece J_sigma, the Hilbert function is
symmetric, and multiplication gives a perfect pairing
J_l x J_{sigma-l} -> J_sigma.  All of that is checkable exactly here, and
an independent closed-form Hilbert oracle
((1 - t^{d-1}) / (1 - t))^nv is provided for cross-validation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .field import Field
from .linalg import SparseRREF, check_budget, rank_of_rows
from .poly import Monomial, PolyError, Polynomial, monomial_basis

__all__ = [
    "JacobianRing",
    "JacobianError",
    "PairingCertificate",
    "build_jacobian_ring",
    "hilbert_series_oracle",
    "compare_invariants",
    "certify_linear_iso",
]


class JacobianError(ValueError):
    """Invalid input or precondition failure for Jacobian-ring operations."""


def hilbert_series_oracle(num_vars: int, d: int) -> List[int]:
    """Coefficients of ((1 - t^{d-1})/(1 - t))^num_vars up to sigma + d.

    This is the Hilbert series of any complete intersection cut out by
    num_vars forms of degree d-1, hence of J(f) for smooth f; computed by
    repeated convolution of (1 + t + ... + t^{d-2}) with itself, entirely
    in integer arithmetic.  The list has length sigma + d + 1 where
    sigma = num_vars*(d-2); trailing entries are zero.
    """
    if num_vars < 1 or d < 2:
        raise JacobianError("oracle needs num_vars >= 1 and d >= 2")
    sigma = num_vars * (d - 2)
    upto = sigma + d
    block = [1] * (d - 1)  # 1 + t + ... + t^{d-2}
    coeffs = [1]
    for _ in range(num_vars):
        out = [0] * min(len(coeffs) + len(block) - 1, upto + 1)
        for i, a in enumerate(coeffs):
            for j, b in enumerate(block):
                if i + j <= upto:
                    out[i + j] += a * b
        coeffs = out
    coeffs += [0] * (upto + 1 - len(coeffs))
    return coeffs


@dataclass
class _DegreePiece:
    """Reduction data for one graded piece R_l / (ideal piece)."""

    degree: int
    basis: List[Monomial]
    index: Dict[Monomial, int]
    rref: SparseRREF
    quotient_cols: List[int]
    quotient_basis: List[Monomial]

    @property
    def dim(self) -> int:
        return len(self.quotient_basis)


@dataclass(frozen=True)
class PairingCertificate:
    """The multiplication pairing J_l x J_{sigma-l} -> J_sigma as a matrix."""

    degree: int
    complementary_degree: int
    row_basis: Tuple[Monomial, ...]
    col_basis: Tuple[Monomial, ...]
    matrix: Tuple[Tuple[object, ...], ...]  # socle coordinates
    rank: int
    nondegenerate: bool


class JacobianRing:
    """Graded quotient J = R/(partial derivatives of f), built degreewise.

    Pieces are computed for every degree 0..sigma+d at construction time;
    the object is immutable afterwards and all queries are pure.
    """

    def __init__(self, f: Polynomial, budget: Optional[int] = None):
        if f.is_zero:
            raise JacobianError("zero polynomial has no Jacobian ring")
        try:
            d = f.homogeneous_degree()
        except PolyError as exc:
            raise JacobianError(str(exc)) from exc
        if d is None or d < 2:
            raise JacobianError("f must be homogeneous of degree >= 2")
        if f.num_vars < 2:
            raise JacobianError("f must live in at least 2 variables")
        self.f = f
        self.field: Field = f.field
        self.num_vars = f.num_vars
        self.d = d
        self.sigma = self.num_vars * (d - 2)
        self.partials: Tuple[Polynomial, ...] = tuple(
            f.partial_derivative(i) for i in range(self.num_vars)
        )
        self._pieces: Dict[int, _DegreePiece] = {}
        for ell in range(self.sigma + d + 1):
            self._pieces[ell] = self._build_piece(ell, budget)

    def _build_piece(self, ell: int, budget: Optional[int]) -> _DegreePiece:
        basis = monomial_basis(self.num_vars, ell)
        index = {m: i for i, m in enumerate(basis)}
        rref = SparseRREF(self.field)
        shift = ell - (self.d - 1)
        if shift >= 0:
            multipliers = monomial_basis(self.num_vars, shift)
            check_budget(
                len(multipliers) * self.num_vars,
                len(basis),
                budget,
                f"jacobian degree {ell}",
            )
            for m in multipliers:
                for partial in self.partials:
                    row = {}
                    for mono, coeff in partial.terms.items():
                        row[index[m * mono]] = coeff
                    if row:
                        rref.add_row(row)
        quotient_cols = rref.free_columns(len(basis))
        quotient_basis = [basis[c] for c in quotient_cols]
        return _DegreePiece(ell, basis, index, rref, quotient_cols, quotient_basis)

    # ---------------------------------------------------------------- query
    def piece(self, ell: int) -> _DegreePiece:
        if ell not in self._pieces:
            raise JacobianError(
                f"degree {ell} outside computed range 0..{self.sigma + self.d}"
            )
        return self._pieces[ell]

    def dim(self, ell: int) -> int:
        """dim J_ell (0 beyond the computed window only if Artinian)."""
        return self.piece(ell).dim

    def quotient_basis(self, ell: int) -> List[Monomial]:
        return list(self.piece(ell).quotient_basis)

    def hilbert_function(self) -> Tuple[int, ...]:
        """(dim J_0, ..., dim J_sigma)."""
        return tuple(self.dim(ell) for ell in range(self.sigma + 1))

    def is_smooth(self) -> bool:
        """Artinian test: J vanishes on the window (sigma, sigma+d].

        Sufficient for an ideal generated in degree d-1: if the quotient
        survives past sigma+d it survives in every degree, since J is
        generated in degree 1 over itself.
        """
        return all(
            self.dim(ell) == 0
            for ell in range(self.sigma + 1, self.sigma + self.d + 1)
        )

    def normal_form(self, p: Polynomial, degree: Optional[int] = None) -> List[object]:
        """Coordinates of p mod the ideal, over quotient_basis(deg p).

        p must be homogeneous; a zero polynomial needs an explicit degree.
        The zero vector comes back exactly when p lies in the ideal.
        """
        if p.field != self.field or p.num_vars != self.num_vars:
            raise JacobianError("polynomial/ring mismatch")
        pdeg = p.homogeneous_degree()
        if pdeg is None:
            if degree is None:
                raise JacobianError("zero polynomial: supply a degree")
            pdeg = degree
        elif degree is not None and degree != pdeg:
            raise JacobianError(f"degree hint {degree} != actual degree {pdeg}")
        piece = self.piece(pdeg)
        vec = {piece.index[m]: c for m, c in p.terms.items()}
        reduced = piece.rref.reduce(vec)
        zero = self.field.zero()
        return [reduced.get(col, zero) for col in piece.quotient_cols]

    def socle_monomial(self) -> Monomial:
        top = self.piece(self.sigma)
        if top.dim != 1:
            raise JacobianError(f"dim J_sigma = {top.dim}, expected 1")
        return top.quotient_basis[0]

    # -------------------------------------------------------------- pairing
    def pairing_matrix(self, ell: int) -> PairingCertificate:
        """The Gorenstein pairing J_ell x J_{sigma-ell} -> J_sigma ~ k."""
        if not self.is_smooth():
            raise JacobianError("pairing requires an Artinian (smooth) ring")
        if not 0 <= ell <= self.sigma:
            raise JacobianError(f"degree {ell} outside 0..{self.sigma}")
        if self.piece(self.sigma).dim != 1:
            raise JacobianError("socle is not one-dimensional")
        rows = self.quotient_basis(ell)
        cols = self.quotient_basis(self.sigma - ell)
        matrix = []
        for mr in rows:
            line = []
            for mc in cols:
                product = Polynomial.from_monomial(self.field, mr * mc)
                line.append(self.normal_form(product)[0])
            matrix.append(tuple(line))
        rank = rank_of_rows(
            self.field,
            [
                {j: v for j, v in enumerate(line) if not self.field.is_zero(v)}
                for line in matrix
            ],
        )
        nondegenerate = rank == len(rows) == len(cols)
        return PairingCertificate(
            degree=ell,
            complementary_degree=self.sigma - ell,
            row_basis=tuple(rows),
            col_basis=tuple(cols),
            matrix=tuple(matrix),
            rank=rank,
            nondegenerate=nondegenerate,
        )

    def multiplication_rank(self, ell: int) -> int:
        """Rank of the multiplication map J_1 (x) J_ell -> J_{ell+1}."""
        target = self.piece(ell + 1)
        rows = []
        for u in self.quotient_basis(1):
            for v in self.quotient_basis(ell):
                nf = self.normal_form(Polynomial.from_monomial(self.field, u * v))
                row = {
                    j: c for j, c in enumerate(nf) if not self.field.is_zero(c)
                }
                rows.append(row)
        del target  # existence check above; rank is basis-free
        return rank_of_rows(self.field, rows)

    def gorenstein_report(self) -> dict:
        """Full Gorenstein certificate; raises with a witness on failure.

        Asserts: Artinian-ness, dim J_sigma = 1, Hilbert symmetry, oracle
        agreement, and nondegeneracy of the pairing in every degree.
        """
        if not self.is_smooth():
            witness = next(
                ell
                for ell in range(self.sigma + 1, self.sigma + self.d + 1)
                if self.dim(ell) != 0
            )
            raise JacobianError(
                f"not Artinian: dim J_{witness} = {self.dim(witness)} != 0"
            )
        hilbert = self.hilbert_function()
        if self.dim(self.sigma) != 1:
            raise JacobianError(
                f"socle dimension {self.dim(self.sigma)} != 1"
            )
        for ell in range(self.sigma + 1):
            if hilbert[ell] != hilbert[self.sigma - ell]:
                raise JacobianError(
                    f"Hilbert function asymmetric at degree {ell}: "
                    f"{hilbert[ell]} vs {hilbert[self.sigma - ell]}"
                )
        oracle = hilbert_series_oracle(self.num_vars, self.d)
        if list(hilbert) != oracle[: self.sigma + 1]:
            raise JacobianError(
                f"Hilbert function {hilbert} disagrees with oracle "
                f"{tuple(oracle[: self.sigma + 1])}"
            )
        certificates = []
        for ell in range(self.sigma + 1):
            cert = self.pairing_matrix(ell)
            if not cert.nondegenerate:
                raise JacobianError(
                    f"pairing degenerate at degree {ell}: rank {cert.rank} "
                    f"< dim {self.dim(ell)}"
                )
            certificates.append(cert)
        return {
            "sigma": self.sigma,
            "hilbert": hilbert,
            "oracle_match": True,
            "socle_monomial": self.socle_monomial(),
            "pairing": certificates,
            "smooth": True,
        }


def build_jacobian_ring(f: Polynomial, budget: Optional[int] = None) -> JacobianRing:
    return JacobianRing(f, budget=budget)


def compare_invariants(j1: JacobianRing, j2: JacobianRing) -> dict:
    """Compare computable graded invariants of two Jacobian rings.

    Any mismatch (Hilbert function, or the rank of some multiplication
    map J_1 (x) J_l -> J_{l+1}) certifies the rings are not isomorphic as
    graded algebras.  When everything matches the verdict is
    "inconclusive": these invariants are necessary, not sufficient, and
    no GL-orbit search is attempted.
    """
    report: dict = {"verdict": "inconclusive", "mismatches": []}
    h1, h2 = j1.hilbert_function(), j2.hilbert_function()
    report["hilbert"] = (h1, h2)
    if h1 != h2:
        report["verdict"] = "distinct"
        report["mismatches"].append(
            {"invariant": "hilbert", "left": h1, "right": h2}
        )
        return report
    ranks1, ranks2 = [], []
    for ell in range(j1.sigma):
        r1 = j1.multiplication_rank(ell)
        r2 = j2.multiplication_rank(ell)
        ranks1.append(r1)
        ranks2.append(r2)
        if r1 != r2:
            report["verdict"] = "distinct"
            report["mismatches"].append(
                {"invariant": f"multiplication rank at degree {ell}",
                 "left": r1, "right": r2}
            )
    report["multiplication_ranks"] = (tuple(ranks1), tuple(ranks2))
    return report


def certify_linear_iso(
    j1: JacobianRing, j2: JacobianRing, matrix: Sequence[Sequence[object]]
) -> dict:
    """Check that x -> M.x carries J(f1) isomorphically onto J(f2).

    The certificate verifies that M is invertible and that every
    substituted generator (df1/dx_i) o M reduces to zero in J2.  Since
    the ideals are generated in the single degree d-1 and the Hilbert
    functions agree degreewise, generator containment gives containment
    -- and then equality -- of the ideals in every degree up to sigma,
    so M really induces a graded ring isomorphism.
    """
    if j1.num_vars != j2.num_vars or j1.d != j2.d:
        raise JacobianError("rings must share numVars and degree")
    if j1.field != j2.field:
        raise JacobianError("rings must share the coefficient field")
    field = j1.field
    n = j1.num_vars
    if len(matrix) != n or any(len(row) != n for row in matrix):
        raise JacobianError("substitution matrix shape mismatch")
    rows = [
        {j: c for j, c in enumerate(row) if not field.is_zero(c)}
        for row in matrix
    ]
    if rank_of_rows(field, rows) != n:
        raise JacobianError("substitution matrix is singular")
    failures = []
    for i in range(n):
        image = j1.partials[i].linear_substitute(matrix)
        if image.is_zero:
            continue
        nf = j2.normal_form(image)
        if any(not field.is_zero(c) for c in nf):
            failures.append({"generator": i, "image": image.render()})
    hilbert_match = j1.hilbert_function() == j2.hilbert_function()
    certified = not failures and hilbert_match
    return {
        "certified": certified,
        "generator_failures": failures,
        "hilbert_match": hilbert_match,
    }
