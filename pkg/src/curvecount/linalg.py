"""Small exact-rational linear algebra on Fraction matrices.

Matrices are lists of row lists of ``fractions.Fraction`` (or int).
Everything here is written for the tiny, often sparse matrices built by
the homology module; no floats anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

Matrix = List[List[Fraction]]


def zeros(rows: int, cols: int) -> Matrix:
    return [[Fraction(0)] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    out = zeros(n, n)
    for i in range(n):
        out[i][i] = Fraction(1)
    return out


def matmul(a: Matrix, b: Matrix) -> Matrix:
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    out = zeros(rows, cols)
    for i in range(rows):
        arow = a[i]
        orow = out[i]
        for k in range(inner):
            aik = arow[k]
            if not aik:
                continue
            brow = b[k]
            for j in range(cols):
                if brow[j]:
                    orow[j] += aik * brow[j]
    return out


def mat_vec(a: Matrix, v: Sequence[Fraction]) -> List[Fraction]:
    return [sum((row[k] * v[k] for k in range(len(v)) if v[k]), Fraction(0)) for row in a]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)] if a else []


def rref(a: Matrix):
    """Reduced row echelon form; returns (rref_matrix, pivot_columns)."""
    m = [list(map(Fraction, row)) for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        pivot = None
        for i in range(r, rows):
            if m[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = m[r][c]
        m[r] = [x / inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(a: Matrix) -> int:
    if not a or not a[0]:
        return 0
    return len(rref(a)[1])


def column_space_basis(a: Matrix) -> List[List[Fraction]]:
    """A basis of the column space, as column vectors."""
    if not a or not a[0]:
        return []
    _, pivots = rref(a)
    return [[row[c] for row in a] for c in pivots]


def row_space_canonical(rows_in: Sequence[Sequence[Fraction]]) -> tuple:
    """Canonical form of the span of the given row vectors (nonzero rref
    rows as tuples); equal spans give equal canonical forms."""
    if not rows_in:
        return ()
    m, pivots = rref([list(r) for r in rows_in])
    return tuple(tuple(m[i]) for i in range(len(pivots)))


def nullspace_basis(a: Matrix) -> List[List[Fraction]]:
    """A basis of the right kernel, one vector per free column."""
    if not a or not a[0]:
        return []
    m, pivots = rref(a)
    cols = len(a[0])
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][fc]
        basis.append(v)
    return basis


def solve_in_span(basis_cols: List[List[Fraction]], target: Sequence[Fraction]):
    """Coordinates of ``target`` in the span of the given column vectors,
    or None when it lies outside."""
    if not basis_cols:
        return [] if not any(target) else None
    n = len(basis_cols[0])
    aug = [[basis_cols[j][i] for j in range(len(basis_cols))] + [Fraction(target[i])] for i in range(n)]
    m, pivots = rref(aug)
    k = len(basis_cols)
    if k in pivots:
        return None  # inconsistent: pivot in the augmented column
    coords = [Fraction(0)] * k
    for r, pc in enumerate(pivots):
        coords[pc] = m[r][k]
    return coords


def sparse_reduce(vectors) -> list:
    """Canonical reduced basis of the span of sparse vectors.

    Vectors are dicts keyed by any orderable coordinate labels. Each
    basis vector ends up with leading (minimal) key of coefficient 1
    that occurs in no other basis vector, so equal spans produce equal
    bases; the result is sorted by leading key.
    """
    basis = {}
    for vec in vectors:
        v = {k: Fraction(x) for k, x in vec.items() if x}
        while v:
            lead = min(v)
            b = basis.get(lead)
            if b is None:
                break
            coeff = v[lead]
            for k, x in b.items():
                nv = v.get(k, 0) - coeff * x
                if nv:
                    v[k] = nv
                elif k in v:
                    del v[k]
        if not v:
            continue
        lead = min(v)
        c = v[lead]
        v = {k: x / c for k, x in v.items()}
        for b in basis.values():
            f = b.get(lead)
            if f:
                for k, x in v.items():
                    nb = b.get(k, 0) - f * x
                    if nb:
                        b[k] = nb
                    elif k in b:
                        del b[k]
        basis[lead] = v
    return [basis[k] for k in sorted(basis)]


def coords_in_reduced_basis(basis, target):
    """Coordinates of a sparse vector in a ``sparse_reduce`` basis, or
    None when it lies outside the span."""
    residue = {k: Fraction(x) for k, x in target.items() if x}
    coords = []
    for b in basis:
        lead = min(b)
        c = residue.get(lead, Fraction(0))
        coords.append(c)
        if c:
            for k, x in b.items():
                nv = residue.get(k, 0) - c * x
                if nv:
                    residue[k] = nv
                elif k in residue:
                    del residue[k]
    if residue:
        return None
    return coords


def sparse_rank(columns) -> int:
    """Rank of a matrix given as a list of sparse columns ({row: coeff}).

    Gaussian elimination picking the shortest remaining column first, so
    permutation-like matrices eliminate in linear time.
    """
    cols = [{row: Fraction(v) for row, v in c.items()} for c in columns if c]
    r = 0
    while cols:
        cols.sort(key=len)
        col = cols.pop(0)
        r += 1
        pr = min(col)
        pv = col[pr]
        rest = []
        for other in cols:
            x = other.get(pr)
            if x:
                f = x / pv
                for row, val in col.items():
                    nv = other.get(row, 0) - f * val
                    if nv:
                        other[row] = nv
                    elif row in other:
                        del other[row]
            if other:
                rest.append(other)
        cols = rest
    return r
