"""Exact sparse Gaussian elimination with a deterministic pivot rule.

Matrices are lists of sparse rows (dict column -> Fraction).  The pivot of a row
is always its first nonzero column in basis order; rows are processed in the
order given.  No pivot-size heuristics, so identical inputs give bit-identical
outputs.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .grading import ONE, ZERO, GradedMap, GradedSpace, Vec, vec_scale, vec_sub

Row = dict  # column index -> Fraction


def _row_sub_scaled(row: Row, factor: Fraction, other: Row) -> Row:
    if not factor:
        return dict(row)
    out = dict(row)
    for j, c in other.items():
        s = out.get(j, ZERO) - factor * c
        if s:
            out[j] = s
        else:
            out.pop(j, None)
    return out


def rref(rows: Sequence[Mapping]) -> tuple[list[Row], list[int]]:
    """Reduced row echelon form.  Returns (rows, pivot_columns).

    Pivot columns come out strictly increasing; returned rows are normalized to
    leading coefficient 1 and fully reduced against each other.
    """
    work: list[Row] = []
    pivots: list[int] = []
    for raw in rows:
        row = dict(raw)
        for pcol, prow in zip(pivots, work):
            c = row.get(pcol)
            if c:
                row = _row_sub_scaled(row, c, prow)
        if not row:
            continue
        pcol = min(row)
        inv = ONE / row[pcol]
        row = vec_scale(inv, row)
        # reduce earlier rows against the new pivot
        for k in range(len(work)):
            c = work[k].get(pcol)
            if c:
                work[k] = _row_sub_scaled(work[k], c, row)
        work.append(row)
        pivots.append(pcol)
    order = sorted(range(len(pivots)), key=lambda k: pivots[k])
    return [work[k] for k in order], sorted(pivots)


def rank(rows: Sequence[Mapping]) -> int:
    return len(rref(rows)[0])


def kernel_basis(rows: Sequence[Mapping], ncols: int) -> list[Vec]:
    """Basis of the right kernel, one vector per free column, ascending."""
    red, pivots = rref(rows)
    pivot_set = set(pivots)
    pivot_row = {p: r for p, r in zip(pivots, red)}
    basis = []
    for f in range(ncols):
        if f in pivot_set:
            continue
        v: Vec = {f: ONE}
        for p in pivots:
            c = pivot_row[p].get(f)
            if c:
                v[p] = -c
        basis.append(v)
    return basis


def solve(rows: Sequence[Mapping], rhs: Sequence[Fraction]) -> Vec | None:
    """One solution of (rows)·x = rhs with free variables set to 0.

    Returns None when the system is inconsistent.  `rhs[i]` pairs with rows[i].
    """
    work: list[Row] = []
    b: list[Fraction] = []
    pivots: list[int] = []
    for raw, beta in zip(rows, rhs):
        row = dict(raw)
        val = beta
        for pcol, prow, pval in zip(pivots, work, b):
            c = row.get(pcol)
            if c:
                row = _row_sub_scaled(row, c, prow)
                val = val - c * pval
        if not row:
            if val:
                return None
            continue
        pcol = min(row)
        inv = ONE / row[pcol]
        row = vec_scale(inv, row)
        val = val * inv
        for k in range(len(work)):
            c = work[k].get(pcol)
            if c:
                work[k] = _row_sub_scaled(work[k], c, row)
                b[k] = b[k] - c * val
        work.append(row)
        b.append(val)
        pivots.append(pcol)
    x: Vec = {}
    for pcol, prow, pval in zip(pivots, work, b):
        # after full reduction each pivot row reads x_p + (free terms) = val;
        # free variables are zero, so x_p = val
        if pval:
            x[pcol] = pval
    return x


def map_rows(f: GradedMap) -> list[Row]:
    """Rows of the matrix of f (row index = target basis index)."""
    rows: list[Row] = [dict() for _ in range(f.target.dim)]
    for j, col in f.cols.items():
        for i, c in col.items():
            rows[i][j] = c
    return rows


def solve_map(f: GradedMap, target_vec: Mapping) -> Vec | None:
    """Solve f(x) = target_vec; None when target is not in the image."""
    rhs = [target_vec.get(i, ZERO) for i in range(f.target.dim)]
    return solve(map_rows(f), rhs)


def kernel_of_map(f: GradedMap) -> list[Vec]:
    return kernel_basis(map_rows(f), f.source.dim)


def invert_block(rows: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Inverse of a small dense square matrix; raises on singular input."""
    n = len(rows)
    aug = [list(map(Fraction, r)) + [ONE if i == j else ZERO for j in range(n)]
           for i, r in enumerate(rows)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            if aug[r][col]:
                piv = r
                break
        if piv is None:
            raise ValueError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = ONE / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def principal_minors_positive(rows: Sequence[Sequence[Fraction]]) -> bool:
    """Sylvester test: all leading principal minors strictly positive."""
    n = len(rows)
    a = [list(map(Fraction, r)) for r in rows]
    # fraction-free-ish: plain elimination tracking determinant of each leading block
    det = ONE
    m = [row[:] for row in a]
    for k in range(n):
        if not m[k][k]:
            # a symmetric PD matrix has positive diagonal pivots throughout
            return False
        det *= m[k][k]
        if det <= 0:
            return False
        for r in range(k + 1, n):
            if m[r][k]:
                f = m[r][k] / m[k][k]
                m[r] = [x - f * y for x, y in zip(m[r], m[k])]
        # after elimination the product of pivots up to k equals the k-th minor
    return True
