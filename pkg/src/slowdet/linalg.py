"""Exact linear algebra over the rationals.

Rows are scaled to integers and reduced with fraction-free (Bareiss)
elimination, so every intermediate value is an integer and the rank is
exact.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from fractions import Fraction

from slowdet.error import SlowdetError


def integer_rows(rows: Sequence[Sequence[Fraction | int]]) -> list[list[int]]:
    """Scale each row by the lcm of its denominators."""
    out = []
    for row in rows:
        fracs = [Fraction(v) for v in row]
        scale = math.lcm(*(v.denominator for v in fracs)) if fracs else 1
        out.append([int(v * scale) for v in fracs])
    return out


def bareiss_echelon(matrix: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[int]]:
    """Row echelon form by fraction-free elimination, with the pivot columns."""
    m = [list(row) for row in matrix]
    if not m:
        return m, []
    n_rows, n_cols = len(m), len(m[0])
    if any(len(row) != n_cols for row in m):
        msg = "matrix rows have different lengths"
        raise SlowdetError.invalid_input(msg)
    pivots: list[int] = []
    previous = 1
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        swap = next((i for i in range(r, n_rows) if m[i][c]), None)
        if swap is None:
            continue
        m[r], m[swap] = m[swap], m[r]
        pivot = m[r][c]
        for i in range(r + 1, n_rows):
            factor = m[i][c]
            for j in range(c, n_cols):
                m[i][j] = (pivot * m[i][j] - factor * m[r][j]) // previous
        # entries left of c in rows below r are zero already
        previous = pivot
        pivots.append(c)
        r += 1
    return m, pivots


def rank(rows: Sequence[Sequence[Fraction | int]]) -> int:
    return len(bareiss_echelon(integer_rows(rows))[1])


def normalize_content(vector: Sequence[int]) -> list[int]:
    """Divide by the gcd and make the first nonzero entry positive."""
    g = math.gcd(*vector)
    if g == 0:
        return list(vector)
    v = [x // g for x in vector]
    first = next(x for x in v if x)
    return [-x for x in v] if first < 0 else v


def nullspace_vector(rows: Sequence[Sequence[Fraction | int]], n_cols: int) -> list[int] | None:
    """A primitive integer vector c with rows . c = 0, or None if there is none.

    The free variable is the first non-pivot column, set to one, with the
    other free variables zero.
    """
    if not rows:
        return normalize_content([1] + [0] * (n_cols - 1)) if n_cols else None
    echelon, pivots = bareiss_echelon(integer_rows(rows))
    free = next((c for c in range(n_cols) if c not in pivots), None)
    if free is None:
        return None
    x: list[Fraction] = [Fraction(0)] * n_cols
    x[free] = Fraction(1)
    for i in reversed(range(len(pivots))):
        p = pivots[i]
        row = echelon[i]
        total = sum((row[j] * x[j] for j in range(p + 1, n_cols)), Fraction(0))
        x[p] = -total / row[p]
    scale = math.lcm(*(v.denominator for v in x))
    return normalize_content([int(v * scale) for v in x])
