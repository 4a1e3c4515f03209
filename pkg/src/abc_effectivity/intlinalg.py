"""Integer linear algebra: exact nullspaces with small (Siegel-type) solutions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Sequence

import flint


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...] = field(repr=False)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [tuple(int(a) for a in r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged matrix")
        return cls(len(rows), cols, tuple(rows))

    def max_entry(self) -> int:
        return max((abs(a) for r in self.entries for a in r), default=0)

    def apply(self, v: Sequence[int]) -> list[int]:
        return [sum(a * b for a, b in zip(r, v)) for r in self.entries]

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.entries]


def siegel_bound(rows: int, cols: int, max_entry: int) -> float:
    """(rows * max_entry) ** (rows / (cols - rows)); needs cols > rows."""
    if cols <= rows:
        raise ValueError("Siegel bound needs more unknowns than equations")
    if rows == 0:
        return 1.0
    return float(max(1, rows * max_entry)) ** (rows / (cols - rows))


def _dot(u, v) -> int:
    return sum(a * b for a, b in zip(u, v))


def _primitive(v: list[int]) -> list[int]:
    g = reduce(math.gcd, v, 0)
    if g > 1:
        v = [a // g for a in v]
    for a in v:
        if a:
            if a < 0:
                v = [-b for b in v]
            break
    return v


def size_reduce(basis: list[list[int]]) -> list[list[int]]:
    """Greedy pairwise reduction: subtract rounded projections while the
    Euclidean norm drops, then order by (max-norm, norm)."""
    b = [list(v) for v in basis]
    changed = True
    while changed:
        changed = False
        b.sort(key=lambda v: (_dot(v, v), v))
        for i in range(len(b)):
            for j in range(len(b)):
                if i == j:
                    continue
                nj = _dot(b[j], b[j])
                if nj == 0:
                    continue
                q = round(Fraction(_dot(b[i], b[j]), nj))
                if q == 0:
                    continue
                cand = [x - q * y for x, y in zip(b[i], b[j])]
                if _dot(cand, cand) < _dot(b[i], b[i]):
                    b[i] = cand
                    changed = True
    b.sort(key=lambda v: (max((abs(a) for a in v), default=0), _dot(v, v), v))
    return b


def lll_reduce(basis: list[list[int]]) -> list[list[int]]:
    if not basis:
        return []
    red = flint.fmpz_mat(basis).lll()
    out = [[int(a) for a in row] for row in red.tolist()]
    out.sort(key=lambda v: (max((abs(a) for a in v), default=0), _dot(v, v), v))
    return out


def integer_kernel(m: IntMatrix | Sequence[Sequence[int]], lll: bool = False) -> list[list[int]]:
    """Z-basis of {v in Z^cols : M v = 0}, reduced, each vector primitive.

    The basis comes from the Hermite form of [M^T | I].  When the first
    vector misses the Siegel bound (cols > rows) the basis is LLL-reduced
    before returning.
    """
    if not isinstance(m, IntMatrix):
        m = IntMatrix.from_rows(m)
    r, c = m.rows, m.cols
    if c == 0:
        return []
    if r == 0:
        basis = [[int(i == j) for j in range(c)] for i in range(c)]
        return basis
    aug = [[m.entries[i][j] for i in range(r)] + [int(j == k) for k in range(c)] for j in range(c)]
    h = flint.fmpz_mat(aug).hnf().tolist()
    basis = [
        [int(a) for a in row[r:]]
        for row in h
        if all(int(a) == 0 for a in row[:r]) and any(int(a) for a in row[r:])
    ]
    if not basis:
        return []
    basis = lll_reduce(basis) if lll else size_reduce(basis)
    if not lll and c > r:
        bound = siegel_bound(r, c, m.max_entry())
        if max(abs(a) for a in basis[0]) > bound:
            basis = lll_reduce(basis)
    basis = [_primitive(v) for v in basis]
    for v in basis:
        assert all(x == 0 for x in m.apply(v)), "kernel vector failed verification"
    return basis
