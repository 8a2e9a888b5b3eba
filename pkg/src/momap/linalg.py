"""Dense exact linear algebra over Q (plain rational pivoting)."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def row_reduce(matrix: Sequence[Sequence]) -> tuple:
    """Reduced row echelon form; returns (rows, pivot columns)."""
    rows = [[Fraction(x) for x in row] for row in matrix]
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(matrix: Sequence[Sequence]) -> int:
    return len(row_reduce(matrix)[1])


def nullspace(matrix: Sequence[Sequence], ncols: int | None = None) -> list:
    """Basis of {x : A x = 0}."""
    if not matrix:
        if ncols is None:
            raise ValueError("empty matrix needs an explicit column count")
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    rows, pivots = row_reduce(matrix)
    n = len(rows[0])
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -rows[r][f]
        basis.append(v)
    return basis


def solve(matrix: Sequence[Sequence], rhs: Sequence, ncols: int | None = None) -> list | None:
    """One solution of A x = b, or None when the system is inconsistent."""
    if not matrix:
        if any(rhs):
            return None
        return [Fraction(0)] * (ncols or 0)
    n = len(matrix[0])
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    rows, pivots = row_reduce(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for r, p in enumerate(pivots):
        x[p] = rows[r][n]
    return x


def transpose(matrix: Sequence[Sequence]) -> list:
    return [list(col) for col in zip(*matrix)]
