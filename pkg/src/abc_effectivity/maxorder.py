"""p-maximal orders by the round-two method (p-radical and its multiplier ring).

Orders are kept as Z-bases written in the power basis of a monic integral
generator theta0: a basis is a list of d rational row vectors.  Only the
p-part of the index is enlarged, which is all the root discriminant needs.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import flint

from .numfield import NumberField
from .polys import IntPoly


def _common_den(rows) -> int:
    den = 1
    for r in rows:
        for x in r:
            den = math.lcm(den, x.denominator)
    return den


def _hnf_basis(rows: list[list[Fraction]], d: int) -> list[list[Fraction]]:
    """A Z-basis of the module spanned by rational rows (full rank d)."""
    den = _common_den(rows)
    M = flint.fmpz_mat([[int(x * den) for x in r] for r in rows])
    H = M.hnf().tolist()
    out = [[Fraction(int(a), den) for a in r] for r in H if any(int(a) for a in r)]
    assert len(out) == d, "module lost rank"
    return out


def _det(rows: list[list[Fraction]]) -> Fraction:
    den = _common_den(rows)
    d = len(rows)
    D = flint.fmpz_mat([[int(x * den) for x in r] for r in rows]).det()
    return Fraction(int(D), den**d)


class _Order:
    def __init__(self, K: NumberField, basis: list[list[Fraction]]):
        self.K = K
        self.d = K.degree
        self.basis = basis
        self.elems = [self._elem(r) for r in basis]
        den = _common_den(basis)
        self._inv = flint.fmpq_mat([[flint.fmpq(int(x * den), den) for x in r] for r in basis]).inv()

    def _elem(self, row):
        return self.K.elem(flint.fmpq_poly([flint.fmpq(x.numerator, x.denominator) for x in row]))

    def vec(self, e) -> list[Fraction]:
        cs = list(e.coeffs()) + [0] * (self.d - len(e.coeffs()))
        return [Fraction(int(c.p), int(c.q)) if isinstance(c, flint.fmpq) else Fraction(int(c)) for c in cs[: self.d]]

    def coords(self, e) -> list[Fraction]:
        """Coordinates of e in this basis (integers when e lies in the order)."""
        v = flint.fmpq_mat([[flint.fmpq(x.numerator, x.denominator) for x in self.vec(e)]])
        c = v * self._inv
        return [Fraction(int(c[0, j].p), int(c[0, j].q)) for j in range(self.d)]

    def power(self, e, k: int):
        return self.K.pow(e, k)


def _int_coords(order: _Order, e, p: int) -> list[int]:
    cs = order.coords(e)
    for c in cs:
        assert c.denominator == 1, "element left the order"
    return [int(c) % p for c in cs]


def _radical_basis(order: _Order, p: int) -> list[list[Fraction]]:
    d = order.d
    q = p
    while q < d:
        q *= p
    # Frobenius-power map on O/pO; its kernel is I_p / pO
    cols = [_int_coords(order, order.power(b, q), p) for b in order.elems]
    A = flint.nmod_mat([[cols[j][i] for j in range(d)] for i in range(d)], p)
    X, nullity = A.nullspace()
    gens = [[Fraction(p) * x for x in r] for r in order.basis]
    for k in range(nullity):
        v = [int(X[i, k]) for i in range(d)]
        gens.append([sum(Fraction(v[i]) * order.basis[i][t] for i in range(d)) for t in range(d)])
    return _hnf_basis(gens, d)


def _enlarge(order: _Order, p: int) -> list[list[Fraction]] | None:
    """The multiplier ring of the p-radical, or None if it equals the order."""
    d = order.d
    rad = _radical_basis(order, p)
    R = _Order(order.K, rad)
    # x in O with x * I_p inside p I_p: linear conditions mod p
    rows = []
    for b in order.elems:
        row = []
        for g in R.elems:
            row.extend(_int_coords(R, order.K.mul(b, g), p))
        rows.append(row)
    A = flint.nmod_mat(
        [[rows[i][j] for i in range(d)] for j in range(d * d)], p
    )
    X, nullity = A.nullspace()
    if nullity == 0:
        return None
    gens = [list(r) for r in order.basis]
    for k in range(nullity):
        v = [int(X[i, k]) for i in range(d)]
        gens.append([sum(Fraction(v[i], p) * order.basis[i][t] for i in range(d)) for t in range(d)])
    return _hnf_basis(gens, d)


@lru_cache(maxsize=512)
def p_maximal_basis(F0_coeffs: tuple[int, ...], p: int) -> tuple[tuple[Fraction, ...], ...]:
    """Z-basis (power-basis coordinates) of an order that is maximal at p."""
    K = NumberField(IntPoly(F0_coeffs))
    d = K.degree
    basis = [[Fraction(int(i == j)) for j in range(d)] for i in range(d)]
    order = _Order(K, basis)
    while True:
        bigger = _enlarge(order, p)
        if bigger is None:
            break
        order = _Order(K, bigger)
    return tuple(tuple(r) for r in order.basis)


def p_maximal_elements(F0: IntPoly, p: int) -> list[flint.fmpq_poly]:
    return [
        flint.fmpq_poly([flint.fmpq(x.numerator, x.denominator) for x in r])
        for r in p_maximal_basis(F0.coeffs, p)
    ]


@lru_cache(maxsize=512)
def p_index(F0_coeffs: tuple[int, ...], p: int) -> int:
    """v_p of [O_K : Z[theta0]] for theta0 a root of the monic F0."""
    basis = [list(r) for r in p_maximal_basis(F0_coeffs, p)]
    index = 1 / _det(basis)
    assert index.denominator == 1
    idx = int(index)
    k = 0
    while idx % p == 0:
        idx //= p
        k += 1
    assert idx == 1, "enlargement introduced a prime other than p"
    return k
