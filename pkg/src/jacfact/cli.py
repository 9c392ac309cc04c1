"""Command-line interface.

Subcommands mirror the library modules:

* ``jacring <file.poly>``: Hilbert function, socle degree, smoothness,
  and the full set of pairing certificates.
* ``mf validate|shift-check|chainrule|hom|lmf <file>``: structural
  checks on matrix factorizations.  A ``.poly`` input is turned into the
  term-wise Koszul factorization of the polynomial (for ``hom``/``lmf``:
  the stabilized diagonal); a ``.mf`` file is parsed as a serialized
  object.
* ``lattice disc|ogroup|glue|extend|orient``: Gram matrices as
  whitespace-separated integer rows in text files; isometries named by
  token (``id``, ``neg-id``, ``rot``, ``rot2``, ``neg-rot``,
  ``neg-rot2``, ``swap``, ``neg-swap``) or ``@file`` for an explicit
  matrix.
* ``corpus [dir]``: run the acceptance battery against the golden
  records.

Exit codes: 0 all checks pass; 1 a mathematical rejection (a result --
e.g. a failed extension criterion -- reported as such); 2 input error;
3 resource budget exceeded.

Reports print to stdout as JSON (exact ``num/den`` rationals, sorted
keys) or text; ``--figures DIR`` additionally renders PNG charts with
CSV companions for the numeric content.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import List, Optional, Tuple

from .acceptance import (
    CRITERIA,
    corpus_root,
    read_gram_file,
    read_poly_file,
)
from .field import Field, FieldError, parse_field_spec
from .jacobian import JacobianError, JacobianRing
from .lattice import (
    Isometry,
    Lattice,
    LatticeError,
    discriminant_action,
    identity_glue,
    nikulin_extend,
    orientation_sign,
    orthogonal_group,
    overlattice_from_glue,
)
from .linalg import ResourceBudget
from .mf import (
    MFError,
    chain_rule_homotopy,
    compare_with_jacobian,
    hom_space,
    is_null_homotopic,
    koszul_mf,
    mf_from_text,
    mult_by_section,
    stabilized_diagonal,
    termwise_decomposition,
)
from .poly import PolyError, Polynomial
from .reports import (
    Report,
    STATUS_ERROR,
    STATUS_REJECT,
    STATUS_RESOURCE,
    fingerprint_gram,
    fingerprint_parts,
    fingerprint_poly,
    render_json,
    render_text,
    to_jsonable,
)

__all__ = ["main", "run_command"]


class InputError(ValueError):
    """File or argument problems: exit code 2."""


# --------------------------------------------------------------------------
# shared helpers

def _field_of(args) -> Field:
    try:
        return parse_field_spec(args.field)
    except FieldError as exc:
        raise InputError(str(exc)) from exc


def _load_poly(path_str: str, field: Field) -> Polynomial:
    path = Path(path_str)
    if not path.is_file():
        raise InputError(f"no such file: {path}")
    try:
        return read_poly_file(path, field)
    except (ValueError, PolyError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _load_gram(path_str: str) -> Lattice:
    path = Path(path_str)
    if not path.is_file():
        raise InputError(f"no such file: {path}")
    try:
        return Lattice(read_gram_file(path))
    except (ValueError, LatticeError) as exc:
        raise InputError(f"{path}: {exc}") from exc


_TOKEN_MATRICES = {
    "id": ((1, 0), (0, 1)),
    "neg-id": ((-1, 0), (0, -1)),
    "rot": ((0, -1), (1, -1)),
    "rot2": ((-1, 1), (-1, 0)),
    "neg-rot": ((0, 1), (-1, 1)),
    "neg-rot2": ((1, -1), (1, 0)),
    "swap": ((0, 1), (1, 0)),
    "neg-swap": ((0, -1), (-1, 0)),
}


def _isometry_from_token(lat: Lattice, token: str) -> Isometry:
    if token.startswith("@"):
        rows = read_gram_file(Path(token[1:]))
        matrix = tuple(tuple(row) for row in rows)
    elif token == "id":
        return Isometry.identity(lat)
    elif token == "neg-id":
        return Isometry.minus_identity(lat)
    elif token in _TOKEN_MATRICES:
        if lat.rank != 2:
            raise InputError(
                f"token '{token}' is only defined for rank-2 lattices"
            )
        matrix = _TOKEN_MATRICES[token]
    else:
        raise InputError(
            f"unknown isometry token '{token}' "
            f"(use {', '.join(sorted(_TOKEN_MATRICES))} or @file)"
        )
    try:
        return Isometry(lat, matrix)
    except LatticeError as exc:
        raise InputError(f"token '{token}': {exc}") from exc


def _figure_dir(args) -> Optional[Path]:
    if getattr(args, "figures", None) is None:
        return None
    path = Path(args.figures)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _config_of(args, **extra) -> dict:
    cfg = {"field": args.field, "output": args.output}
    if getattr(args, "budget", None) is not None:
        cfg["budget"] = args.budget
    cfg.update(extra)
    return cfg


# --------------------------------------------------------------------------
# jacring

def _cmd_jacring(args) -> Report:
    field = _field_of(args)
    f = _load_poly(args.file, field)
    report = Report(
        command=f"jacring {args.file}",
        input_hash=fingerprint_poly(f),
        config=_config_of(args),
    )
    ring = JacobianRing(f, budget=args.budget)
    report.data["f"] = f.render()
    report.data["vars"] = f.num_vars
    report.data["degree"] = ring.d
    report.data["sigma"] = ring.sigma
    report.data["hilbert"] = list(ring.hilbert_function())
    smooth = ring.is_smooth()
    report.add_check(
        "smooth",
        smooth,
        window_dims=[ring.dim(ell) for ell in range(ring.sigma + 1, ring.sigma + ring.d + 1)],
    )
    if not smooth:
        return report  # rejection: the singular case carries no pairing
    summary = ring.gorenstein_report()
    report.data["socle_monomial"] = summary["socle_monomial"].render()
    report.add_check("hilbert_oracle_match", summary["oracle_match"])
    pairings = []
    all_nondeg = True
    for cert in summary["pairing"]:
        pairings.append(
            {
                "degree": cert.degree,
                "complementary_degree": cert.complementary_degree,
                "rank": cert.rank,
                "rows": len(cert.row_basis),
                "cols": len(cert.col_basis),
                "nondegenerate": cert.nondegenerate,
            }
        )
        all_nondeg = all_nondeg and cert.nondegenerate
    report.add_check("pairing_nondegenerate_all_degrees", all_nondeg)
    report.add_check("top_dimension_one", ring.dim(ring.sigma) == 1)
    report.data["pairings"] = pairings
    figures = _figure_dir(args)
    if figures is not None:
        from .figures import save_hilbert_chart, write_csv

        stem = Path(args.file).stem
        save_hilbert_chart(
            figures / f"{stem}_hilbert.png",
            list(ring.hilbert_function()),
            f"Hilbert function ({stem})",
        )
        write_csv(
            figures / f"{stem}_hilbert.csv",
            ["degree", "dimension"],
            list(enumerate(ring.hilbert_function())),
        )
        write_csv(
            figures / f"{stem}_pairings.csv",
            ["degree", "complementary_degree", "rank", "nondegenerate"],
            [
                (p["degree"], p["complementary_degree"], p["rank"], p["nondegenerate"])
                for p in pairings
            ],
        )
    return report


# --------------------------------------------------------------------------
# mf subcommands

def _mf_object(args, field: Field):
    path = Path(args.file)
    if not path.is_file():
        raise InputError(f"no such file: {path}")
    if path.suffix == ".mf":
        try:
            mf = mf_from_text(path.read_text(), field)
        except (MFError, PolyError, ValueError) as exc:
            raise InputError(f"{path}: {exc}") from exc
        return mf, fingerprint_parts("mf", mf.f.render(), str(mf.twists_k), str(mf.twists_l))
    f = _load_poly(args.file, field)
    try:
        mf = koszul_mf(f, termwise_decomposition(f))
    except MFError as exc:
        raise InputError(f"{path}: {exc}") from exc
    return mf, fingerprint_poly(f)


def _cmd_mf_validate(args) -> Report:
    field = _field_of(args)
    mf, digest = _mf_object(args, field)
    report = Report(
        command=f"mf validate {args.file}",
        input_hash=digest,
        config=_config_of(args),
    )
    result = mf.validate()
    report.data["ranks"] = list(mf.rank)
    report.data["twists_k"] = list(mf.twists_k)
    report.data["twists_l"] = list(mf.twists_l)
    report.data["potential"] = mf.f.render()
    report.add_check(
        "factorization_axioms",
        result.ok,
        **({} if result.ok else {"first_violation": result.first_violation}),
    )
    return report


def _cmd_mf_shift_check(args) -> Report:
    field = _field_of(args)
    mf, digest = _mf_object(args, field)
    report = Report(
        command=f"mf shift-check {args.file}",
        input_hash=digest,
        config=_config_of(args),
    )
    report.add_check("object_valid", mf.validate().ok)
    shifted = mf.shift()
    report.add_check("shift_valid", shifted.validate().ok)
    report.add_check(
        "shift_squared_is_degree_shift", shifted.shift() == mf.degree_shift(mf.d)
    )
    report.data["twists_k"] = list(mf.twists_k)
    report.data["shifted_twists_k"] = list(shifted.twists_k)
    return report


def _cmd_mf_chainrule(args) -> Report:
    field = _field_of(args)
    mf, digest = _mf_object(args, field)
    report = Report(
        command=f"mf chainrule {args.file}",
        input_hash=digest,
        config=_config_of(args),
    )
    certificates = []
    for i in range(mf.num_vars):
        partial = mf.f.partial_derivative(i)
        target = mult_by_section(mf, partial, degree=mf.d - 1)
        boundary_ok = chain_rule_homotopy(mf, i).boundary() == target
        solver = is_null_homotopic(target, budget=args.budget)
        certificates.append(
            {
                "variable": i,
                "partial": partial.render(),
                "chain_rule_boundary_ok": boundary_ok,
                "solver_certificate": solver is not None,
            }
        )
        report.add_check(
            f"variable_{i}", boundary_ok and solver is not None, partial=partial.render()
        )
    report.data["certificates"] = certificates
    return report


def _cmd_mf_hom(args) -> Report:
    field = _field_of(args)
    f = _load_poly(args.file, field)
    report = Report(
        command=f"mf hom {args.file}",
        input_hash=fingerprint_poly(f),
        config=_config_of(args, degree=args.degree),
    )
    q0 = stabilized_diagonal(f)
    dims = []
    for ell in range(args.degree + 1):
        dims.append(hom_space(q0, q0, ell, budget=args.budget).dimension)
    report.data["object"] = "stabilized diagonal"
    report.data["ranks"] = list(q0.rank)
    report.data["hom_dimensions"] = dims
    report.add_check("hom_spaces_computed", True, degrees=args.degree + 1)
    figures = _figure_dir(args)
    if figures is not None:
        from .figures import save_dimension_chart, write_csv

        stem = Path(args.file).stem
        save_dimension_chart(
            figures / f"{stem}_hom.png",
            {"hom dimension": dims},
            f"graded hom dimensions ({stem})",
        )
        write_csv(
            figures / f"{stem}_hom.csv",
            ["degree", "dimension"],
            list(enumerate(dims)),
        )
    return report


def _cmd_mf_lmf(args) -> Report:
    field = _field_of(args)
    f = _load_poly(args.file, field)
    report = Report(
        command=f"mf lmf {args.file}",
        input_hash=fingerprint_poly(f),
        config=_config_of(args, degree=args.degree),
    )
    comparison = compare_with_jacobian(f, args.degree, budget=args.budget)
    report.data["dims_hom"] = list(comparison["dims_hom"])
    report.data["dims_jacobian"] = list(comparison["dims_jacobian"])
    report.data["subring_dims"] = list(comparison["subring_dims"])
    report.add_check("map_injective_each_degree", comparison["injective"])
    report.add_check(
        "ideal_maps_to_zero", comparison["factors_through_jacobian"]
    )
    report.add_check("degree_one_subring_matches_image", comparison["subring_matches"])
    report.add_check(
        "multiplication_tables_match", comparison["multiplication_matches"]
    )
    report.add_check(
        "chain_rule_certificates",
        all(comparison["chain_rule_certificates"]),
        per_variable=list(comparison["chain_rule_certificates"]),
    )
    figures = _figure_dir(args)
    if figures is not None:
        from .figures import save_dimension_chart, write_csv

        stem = Path(args.file).stem
        save_dimension_chart(
            figures / f"{stem}_lmf.png",
            {
                "hom": list(comparison["dims_hom"]),
                "jacobian": list(comparison["dims_jacobian"]),
                "degree-1 subring": list(comparison["subring_dims"]),
            },
            f"graded dimensions ({stem})",
        )
        write_csv(
            figures / f"{stem}_lmf.csv",
            ["degree", "hom", "jacobian", "subring"],
            [
                (i, h, j, s)
                for i, (h, j, s) in enumerate(
                    zip(
                        comparison["dims_hom"],
                        list(comparison["dims_jacobian"])
                        + [0] * len(comparison["dims_hom"]),
                        comparison["subring_dims"],
                    )
                )
            ],
        )
    return report


# --------------------------------------------------------------------------
# lattice subcommands

def _cmd_lattice_disc(args) -> Report:
    lat = _load_gram(args.gram)
    report = Report(
        command=f"lattice disc {args.gram}",
        input_hash=fingerprint_gram(lat.gram),
        config=_config_of(args),
    )
    group = lat.discriminant_group()
    report.data["rank"] = lat.rank
    report.data["det"] = lat.det
    report.data["even"] = lat.is_even
    report.data["signature"] = list(lat.signature())
    report.data["invariant_factors"] = list(group.orders)
    report.data["group_order"] = group.size
    generators = []
    for idx, gen in enumerate(group.generators()):
        entry = {
            "coords": list(gen.coords),
            "dual_vector": list(group.dual_vector(gen)),
            "b_self": group.b(gen, gen),
        }
        if lat.is_even:
            entry["q"] = group.q(gen)
        generators.append(entry)
    report.data["generators"] = generators
    report.add_check("order_matches_determinant", group.size == abs(lat.det))
    return report


def _cmd_lattice_ogroup(args) -> Report:
    lat = _load_gram(args.gram)
    report = Report(
        command=f"lattice ogroup {args.gram}",
        input_hash=fingerprint_gram(lat.gram),
        config=_config_of(args),
    )
    group = orthogonal_group(lat, budget=args.budget)
    actions = [discriminant_action(iso) for iso in group]
    trivial = tuple(
        tuple(int(i == j) for j in range(len(lat.discriminant_group().orders)))
        for i in range(len(lat.discriminant_group().orders))
    )
    report.data["order"] = len(group)
    report.data["det_plus_count"] = sum(1 for iso in group if iso.det == 1)
    report.data["restriction_kernel_order"] = sum(
        1 for t in actions if t == trivial
    )
    report.data["distinct_disc_actions"] = len(set(actions))
    report.data["matrices"] = sorted(
        [[list(row) for row in iso.matrix] for iso in group]
    )
    report.add_check("closed_under_inverse", all(
        any(iso.inverse().matrix == other.matrix for other in group)
        for iso in group
    ))
    return report


def _cmd_lattice_glue(args) -> Report:
    l1 = _load_gram(args.gram1)
    l2 = _load_gram(args.gram2)
    report = Report(
        command=f"lattice glue {args.gram1} {args.gram2}",
        input_hash=fingerprint_parts(
            "glue",
            fingerprint_gram(l1.gram),
            fingerprint_gram(l2.gram),
        ),
        config=_config_of(args),
    )
    try:
        glue = identity_glue(l1.discriminant_group(), l2.discriminant_group())
    except LatticeError as exc:
        raise InputError(str(exc)) from exc
    try:
        over = overlattice_from_glue(l1, l2, glue)
    except LatticeError as exc:
        report.status = STATUS_REJECT
        report.add_check("glue_admissible", False, reason=str(exc))
        return report
    report.add_check("glue_admissible", True)
    report.data["glue_order"] = glue.order
    report.data["overlattice"] = {
        "gram": [list(row) for row in over.lattice.gram],
        "rank": over.lattice.rank,
        "det": over.lattice.det,
        "even": over.lattice.is_even,
        "signature": list(over.lattice.signature()),
        "index": over.index,
        "unimodular": over.lattice.is_unimodular,
    }
    report.data["basis"] = [[x for x in row] for row in over.basis]
    return report


def _cmd_lattice_extend(args) -> Report:
    l1 = _load_gram(args.gram1)
    l2 = _load_gram(args.gram2)
    phi = _isometry_from_token(l1, args.phi)
    g = _isometry_from_token(l2, args.g)
    report = Report(
        command=(
            f"lattice extend {args.gram1} {args.gram2} "
            f"--phi {args.phi} --g {args.g}"
        ),
        input_hash=fingerprint_parts(
            "extend",
            fingerprint_gram(l1.gram),
            fingerprint_gram(l2.gram),
            str(phi.matrix),
            str(g.matrix),
        ),
        config=_config_of(args),
    )
    try:
        glue = identity_glue(l1.discriminant_group(), l2.discriminant_group())
    except LatticeError as exc:
        raise InputError(str(exc)) from exc
    try:
        result = nikulin_extend(l1, l2, glue, phi, g)
    except LatticeError as exc:
        report.status = STATUS_REJECT
        report.add_check("glue_admissible", False, reason=str(exc))
        return report
    report.data["phi"] = [list(row) for row in phi.matrix]
    report.data["g"] = [list(row) for row in g.matrix]
    if result.accepted:
        report.add_check("extends_to_overlattice", True)
        report.data["overlattice_gram"] = [
            list(row) for row in result.overlattice.lattice.gram
        ]
        report.data["extended_matrix"] = [list(row) for row in result.matrix]
    else:
        report.add_check(
            "extends_to_overlattice",
            False,
            reason=result.reason,
            witness=result.witness,
        )
    return report


def _cmd_lattice_orient(args) -> Report:
    lat = _load_gram(args.gram)
    iso = _isometry_from_token(lat, args.iso)
    report = Report(
        command=f"lattice orient {args.gram} --iso {args.iso}",
        input_hash=fingerprint_parts(
            "orient", fingerprint_gram(lat.gram), str(iso.matrix)
        ),
        config=_config_of(args),
    )
    if args.basis is not None:
        from fractions import Fraction

        rows = []
        for line in Path(args.basis).read_text().splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([Fraction(tok) for tok in line.split()])
        basis = rows
    else:
        n_plus, _ = lat.signature()
        if n_plus != lat.rank:
            raise InputError(
                "lattice is not positive definite; supply --basis with a "
                "spanning set for the positive subspace"
            )
        basis = [[int(i == j) for j in range(lat.rank)] for i in range(lat.rank)]
    try:
        sign = orientation_sign(lat, iso, basis)
    except LatticeError as exc:
        raise InputError(str(exc)) from exc
    report.data["matrix"] = [list(row) for row in iso.matrix]
    report.data["det"] = iso.det
    report.data["orientation_sign"] = sign
    report.data["disc_action"] = [list(row) for row in discriminant_action(iso)]
    report.add_check("orientation_preserving", sign == 1)
    return report


# --------------------------------------------------------------------------
# corpus

def _cmd_corpus(args) -> Report:
    import json

    field = _field_of(args)
    directory = Path(args.dir) if args.dir else corpus_root()
    if not directory.is_dir():
        raise InputError(f"no such corpus directory: {directory}")
    report = Report(
        command=f"corpus {directory}",
        input_hash=fingerprint_parts("corpus", str(sorted(
            p.name for p in (directory / "polys").glob("*.poly")
        ))),
        config=_config_of(args),
    )
    names = []
    passed_flags = []
    for idx, criterion in enumerate(CRITERIA, 1):
        try:
            result = criterion(field, directory, budget=args.budget)
        except ResourceBudget:
            raise
        except Exception as exc:
            report.add_check(f"criterion_{idx}", False, error=str(exc))
            names.append(f"criterion_{idx}")
            passed_flags.append(False)
            continue
        golden_path = directory / "golden" / f"criterion_{idx}.json"
        golden_ok = True
        golden_note = {}
        if golden_path.is_file():
            recorded = json.loads(golden_path.read_text())
            computed = json.loads(
                json.dumps(to_jsonable(result["golden"]), sort_keys=True)
            )
            golden_ok = recorded == computed
            if not golden_ok:
                golden_note = {"golden_mismatch": True}
        else:
            golden_ok = False
            golden_note = {"golden_missing": golden_path.name}
        ok = result["passed"] and golden_ok
        report.add_check(
            f"criterion_{idx}",
            ok,
            title=result["title"],
            **golden_note,
        )
        names.append(f"criterion_{idx}")
        passed_flags.append(ok)
    report.data["passed"] = sum(passed_flags)
    report.data["total"] = len(passed_flags)
    figures = _figure_dir(args)
    if figures is not None:
        from .figures import save_status_grid, write_csv

        save_status_grid(
            figures / "corpus_status.png", names, passed_flags, "acceptance criteria"
        )
        write_csv(
            figures / "corpus_status.csv",
            ["criterion", "passed"],
            list(zip(names, passed_flags)),
        )
    return report


# --------------------------------------------------------------------------
# parser and dispatch

def _add_common(parser, *, degree=False, figures=True):
    parser.add_argument(
        "--field",
        default="q",
        help="coefficient field: q (rationals) or fp:<prime>",
    )
    parser.add_argument(
        "--output",
        choices=["json", "text"],
        default="text",
        help="report format",
    )
    parser.add_argument(
        "--budget",
        type=int,
        default=None,
        help="resource budget in matrix cells; exceeding it exits 3",
    )
    if degree:
        parser.add_argument(
            "--degree",
            type=int,
            default=2,
            help="top twist for hom/lmf computations",
        )
    if figures:
        parser.add_argument(
            "--figures",
            default=None,
            metavar="DIR",
            help="write PNG charts and CSV companions into DIR",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jacfact",
        description="exact certificates for Jacobian rings, graded matrix "
        "factorizations, and lattice glue data",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_jac = sub.add_parser("jacring", help="Jacobian ring report for a polynomial")
    p_jac.add_argument("file", help="polynomial file (vars header + expression)")
    p_jac.add_argument(
        "--report",
        dest="output",
        choices=["json", "text"],
        default=argparse.SUPPRESS,
        help="alias for --output",
    )
    _add_common(p_jac)
    p_jac.set_defaults(handler=_cmd_jacring)

    p_mf = sub.add_parser("mf", help="matrix factorization checks")
    mf_sub = p_mf.add_subparsers(dest="mf_command", required=True)
    for name, handler, with_degree in [
        ("validate", _cmd_mf_validate, False),
        ("shift-check", _cmd_mf_shift_check, False),
        ("chainrule", _cmd_mf_chainrule, False),
        ("hom", _cmd_mf_hom, True),
        ("lmf", _cmd_mf_lmf, True),
    ]:
        p = mf_sub.add_parser(name)
        p.add_argument("file", help="polynomial (.poly) or serialized object (.mf)")
        _add_common(p, degree=with_degree)
        p.set_defaults(handler=handler)

    p_lat = sub.add_parser("lattice", help="integer lattice computations")
    lat_sub = p_lat.add_subparsers(dest="lattice_command", required=True)

    p = lat_sub.add_parser("disc", help="discriminant group and forms")
    p.add_argument("gram", help="Gram matrix file")
    _add_common(p, figures=False)
    p.set_defaults(handler=_cmd_lattice_disc)

    p = lat_sub.add_parser("ogroup", help="full orthogonal group (definite)")
    p.add_argument("gram")
    _add_common(p, figures=False)
    p.set_defaults(handler=_cmd_lattice_ogroup)

    p = lat_sub.add_parser("glue", help="identity-glue overlattice of two lattices")
    p.add_argument("gram1")
    p.add_argument("gram2")
    _add_common(p, figures=False)
    p.set_defaults(handler=_cmd_lattice_glue)

    p = lat_sub.add_parser("extend", help="extend an isometry pair over the glue")
    p.add_argument("gram1")
    p.add_argument("gram2")
    p.add_argument("--phi", default="id", help="isometry token for the first lattice")
    p.add_argument("--g", default="id", help="isometry token for the second lattice")
    _add_common(p, figures=False)
    p.set_defaults(handler=_cmd_lattice_extend)

    p = lat_sub.add_parser("orient", help="orientation sign of an isometry")
    p.add_argument("gram")
    p.add_argument("--iso", default="id", help="isometry token")
    p.add_argument(
        "--basis", default=None, help="file of rational rows spanning the positive part"
    )
    _add_common(p, figures=False)
    p.set_defaults(handler=_cmd_lattice_orient)

    p_corpus = sub.add_parser("corpus", help="run the acceptance battery")
    p_corpus.add_argument("dir", nargs="?", default=None, help="corpus directory")
    _add_common(p_corpus)
    p_corpus.set_defaults(handler=_cmd_corpus)

    return parser


def run_command(argv: List[str]) -> Tuple[Report, int]:
    """Parse and execute; always returns a report and an exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    fallback_config = {"output": getattr(args, "output", "text") or "text"}
    start = time.perf_counter()
    try:
        report = args.handler(args)
    except InputError as exc:
        report = Report(
            command=" ".join(argv),
            input_hash="",
            config=fallback_config,
            status=STATUS_ERROR,
        )
        report.add_check("input", False, error=str(exc))
    except ResourceBudget as exc:
        report = Report(
            command=" ".join(argv),
            input_hash="",
            config=fallback_config,
            status=STATUS_RESOURCE,
        )
        report.add_check(
            "resource_budget",
            False,
            context=exc.context,
            needed=exc.needed,
            budget=exc.budget,
        )
    except (JacobianError, MFError, LatticeError, PolyError, FieldError) as exc:
        # mathematical precondition failures on well-formed input
        report = Report(
            command=" ".join(argv),
            input_hash="",
            config=fallback_config,
            status=STATUS_REJECT,
        )
        report.add_check("computation", False, reason=str(exc))
    report.timing_seconds = time.perf_counter() - start
    return report, report.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    report, code = run_command(argv)
    output = getattr(report, "config", {}).get("output", "text") or "text"
    if output == "json":
        sys.stdout.write(render_json(report))
    else:
        sys.stdout.write(render_text(report))
    return code


if __name__ == "__main__":
    raise SystemExit(main())
