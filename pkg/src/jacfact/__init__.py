"""Exact-arithmetic certificates for graded hypersurface algebra.

The package computes, over the rationals or a prime field, three layers
of structure attached to a homogeneous polynomial ``f``:

* its Jacobian ring, with Hilbert data, smoothness detection, and the
  perfect pairing into the one-dimensional top piece
  (:mod:`jacfact.jacobian`);
* graded matrix factorizations of ``f``, including shifts, morphisms,
  homotopies, graded hom spaces, and the multiplicative comparison of
  endomorphisms of the stabilized diagonal with the Jacobian ring
  (:mod:`jacfact.mf`);
* integer lattices with discriminant forms, glue maps, overlattices,
  and orientation bookkeeping for isometry lifts
  (:mod:`jacfact.lattice`).

Everything runs in exact arithmetic (integers, :class:`~fractions.Fraction`,
or ``Z/p``); no floats enter any computation or report.  The ``jacfact``
command-line tool wraps the common entry points and emits deterministic
certificates; see :mod:`jacfact.cli`.
"""

from .field import QQ, Field, FieldError, PrimeField, RationalField, parse_field_spec
from .jacobian import (
    JacobianError,
    JacobianRing,
    build_jacobian_ring,
    certify_linear_iso,
    compare_invariants,
    hilbert_series_oracle,
)
from .lattice import (
    DiscriminantGroup,
    GlueMap,
    Isometry,
    Lattice,
    LatticeError,
    degree_shift_isometry,
    discriminant_action,
    find_orientation_preserving_lift,
    hexagonal_lattice,
    identity_glue,
    nikulin_extend,
    orientation_sign,
    orthogonal_group,
    orthogonal_sum,
    overlattice_from_glue,
    rescale,
)
from .linalg import ResourceBudget
from .mf import (
    Homotopy,
    HomSpace,
    LMFRing,
    MFError,
    MFMorphism,
    MatrixFactorization,
    chain_rule_homotopy,
    compare_with_jacobian,
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
from .poly import Monomial, ParseError, PolyError, Polynomial, monomial_basis

__version__ = "0.1.0"

__all__ = [
    "QQ",
    "Field",
    "FieldError",
    "PrimeField",
    "RationalField",
    "parse_field_spec",
    "Monomial",
    "ParseError",
    "PolyError",
    "Polynomial",
    "monomial_basis",
    "ResourceBudget",
    "JacobianError",
    "JacobianRing",
    "build_jacobian_ring",
    "certify_linear_iso",
    "compare_invariants",
    "hilbert_series_oracle",
    "MatrixFactorization",
    "MFError",
    "MFMorphism",
    "Homotopy",
    "HomSpace",
    "LMFRing",
    "chain_rule_homotopy",
    "compare_with_jacobian",
    "direct_sum",
    "hom_space",
    "is_null_homotopic",
    "koszul_mf",
    "lmf_ring",
    "mf_from_text",
    "mf_to_text",
    "mult_by_section",
    "stabilized_diagonal",
    "termwise_decomposition",
    "DiscriminantGroup",
    "GlueMap",
    "Isometry",
    "Lattice",
    "LatticeError",
    "degree_shift_isometry",
    "discriminant_action",
    "find_orientation_preserving_lift",
    "hexagonal_lattice",
    "identity_glue",
    "nikulin_extend",
    "orientation_sign",
    "orthogonal_group",
    "orthogonal_sum",
    "overlattice_from_glue",
    "rescale",
    "__version__",
]
