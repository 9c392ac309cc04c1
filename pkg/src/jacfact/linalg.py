"""Exact sparse linear algebra over a Field.

Vectors are dicts mapping column index to a nonzero scalar.  The central
object is an incremental reduced row echelon form: rows are fed in one at
a time, each is fully reduced against the current pivots, and accepted
rows trigger back-elimination so the stored pivot rows always form a
genuine RREF.  Pivoting is always on the smallest column index present,
which together with the package-wide grevlex basis order makes every
echelon form (and hence every report) canonical.

A soft resource budget (a cap on ``rows * cols`` cells) can be attached
to the larger builders; exceeding it raises :class:`ResourceBudget`
before any heavy allocation happens, and the CLI turns that into a
structured "resource" result.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .field import Field

__all__ = [
    "SparseRREF",
    "ResourceBudget",
    "check_budget",
    "rank_of_rows",
    "kernel_basis",
    "solve",
    "vec_add_scaled",
]

Vector = Dict[int, object]


class ResourceBudget(RuntimeError):
    """Raised when an estimated allocation exceeds the configured budget."""

    def __init__(self, needed: int, budget: int, context: str):
        super().__init__(
            f"resource budget exceeded in {context}: needs ~{needed} cells, "
            f"budget is {budget}"
        )
        self.needed = needed
        self.budget = budget
        self.context = context


def check_budget(rows: int, cols: int, budget: Optional[int], context: str):
    """Guard an upcoming rows x cols computation against the cell budget."""
    if budget is not None and rows * cols > budget:
        raise ResourceBudget(rows * cols, budget, context)


def vec_add_scaled(field: Field, target: Vector, source: Vector, scalar) -> None:
    """target += scalar * source, in place, dropping cancelled entries."""
    if field.is_zero(scalar):
        return
    for col, value in source.items():
        acc = field.add(target.get(col, field.zero()), field.mul(scalar, value))
        if field.is_zero(acc):
            target.pop(col, None)
        else:
            target[col] = acc


class SparseRREF:
    """Incrementally maintained reduced row echelon form."""

    def __init__(self, field: Field):
        self.field = field
        self.pivot_rows: Dict[int, Vector] = {}

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)

    def pivot_columns(self) -> List[int]:
        return sorted(self.pivot_rows)

    def reduce(self, row: Vector) -> Vector:
        """Fully reduce a copy of ``row`` against the stored pivots."""
        field = self.field
        out = dict(row)
        for col in sorted(out):
            if col not in out:
                continue  # cancelled by an earlier elimination step
            pivot = self.pivot_rows.get(col)
            if pivot is None:
                continue
            coeff = out[col]
            vec_add_scaled(field, out, pivot, field.neg(coeff))
        return out

    def add_row(self, row: Vector) -> Optional[int]:
        """Insert a row; returns its pivot column, or None if dependent."""
        field = self.field
        reduced = self.reduce(row)
        if not reduced:
            return None
        lead = min(reduced)
        inv = field.inv(reduced[lead])
        normalized = {c: field.mul(v, inv) for c, v in reduced.items()}
        # Back-eliminate the new pivot column from existing rows so the
        # stored system stays reduced.
        for col, pivot in self.pivot_rows.items():
            if lead in pivot:
                coeff = pivot[lead]
                vec_add_scaled(field, pivot, normalized, field.neg(coeff))
        self.pivot_rows[lead] = normalized
        return lead

    def extend(self, rows: Iterable[Vector]) -> int:
        added = 0
        for row in rows:
            if self.add_row(row) is not None:
                added += 1
        return added

    def free_columns(self, ncols: int) -> List[int]:
        return [c for c in range(ncols) if c not in self.pivot_rows]


def rank_of_rows(field: Field, rows: Iterable[Vector]) -> int:
    rref = SparseRREF(field)
    rref.extend(rows)
    return rref.rank


def kernel_basis(field: Field, rows: Iterable[Vector], ncols: int) -> List[Vector]:
    """Basis of the solution space of the homogeneous system ``rows . x = 0``.

    One basis vector per free column: the free coordinate is set to 1 and
    the pivot coordinates are back-substituted from the RREF.
    """
    rref = SparseRREF(field)
    rref.extend(rows)
    basis = []
    for free in rref.free_columns(ncols):
        vec: Vector = {free: field.one()}
        for pivot_col, pivot_row in rref.pivot_rows.items():
            coeff = pivot_row.get(free)
            if coeff is not None and not field.is_zero(coeff):
                vec[pivot_col] = field.neg(coeff)
        basis.append(vec)
    basis.sort(key=lambda v: min(v))
    return basis


def solve(
    field: Field,
    rows: Sequence[Vector],
    rhs: Sequence[object],
    nunknowns: int,
) -> Optional[Vector]:
    """One solution of the inhomogeneous system, or None if inconsistent.

    Free unknowns are set to zero.  ``rows[i] . x = rhs[i]`` with unknown
    indices in ``[0, nunknowns)``.
    """
    if len(rows) != len(rhs):
        raise ValueError("rows/rhs length mismatch")
    rhs_col = nunknowns
    rref = SparseRREF(field)
    for row, b in zip(rows, rhs):
        augmented = dict(row)
        if not field.is_zero(b):
            augmented[rhs_col] = b
        rref.add_row(augmented)
    if rhs_col in rref.pivot_rows:
        return None  # a row reduced to 0 = 1: inconsistent
    solution: Vector = {}
    for pivot_col, pivot_row in rref.pivot_rows.items():
        value = pivot_row.get(rhs_col)
        if value is not None and not field.is_zero(value):
            # row reads  x_pivot + sum(free terms) = value; frees are 0
            solution[pivot_col] = value
    return solution
