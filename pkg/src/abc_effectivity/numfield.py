"""Arithmetic in a simple number field Q[t]/(rho) and in K[y].

Elements are ``flint.fmpq_poly`` values reduced modulo the defining
polynomial.  This is internal plumbing for point computations on curves:
gcds in K[y], truncated power series over K, characteristic polynomials.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import flint

from .polys import IntPoly, PolynomialError, factor_over_int


Elem = flint.fmpq_poly


def _mpoly_ctx(names):
    return flint.fmpz_mpoly_ctx.get(tuple(names), "lex")


class NumberField:
    """K = Q[t] / (rho) for an irreducible rho in Z[t]."""

    def __init__(self, rho: IntPoly):
        if rho.degree < 1:
            raise PolynomialError("defining polynomial must be non-constant")
        self.rho = rho.primitive()
        self._mod = self.rho.to_fmpq()
        self.degree = self.rho.degree

    def __repr__(self) -> str:
        return f"NumberField({self.rho})"

    # elements -----------------------------------------------------------
    def elem(self, v) -> Elem:
        if isinstance(v, flint.fmpq_poly):
            return v % self._mod
        if isinstance(v, IntPoly):
            return v.to_fmpq() % self._mod
        if isinstance(v, Fraction):
            return flint.fmpq_poly([flint.fmpq(v.numerator, v.denominator)])
        return flint.fmpq_poly([v])

    def gen(self) -> Elem:
        return self.elem(flint.fmpq_poly([0, 1]))

    def zero(self) -> Elem:
        return flint.fmpq_poly([])

    def one(self) -> Elem:
        return flint.fmpq_poly([1])

    def add(self, a: Elem, b: Elem) -> Elem:
        return a + b

    def sub(self, a: Elem, b: Elem) -> Elem:
        return a - b

    def mul(self, a: Elem, b: Elem) -> Elem:
        return (a * b) % self._mod

    def inv(self, a: Elem) -> Elem:
        if a.is_zero():
            raise ZeroDivisionError("inverse of zero in number field")
        g, s, _ = a.xgcd(self._mod)
        # g is a nonzero constant since rho is irreducible
        return (s / g) % self._mod

    def div(self, a: Elem, b: Elem) -> Elem:
        return self.mul(a, self.inv(b))

    def pow(self, a: Elem, k: int) -> Elem:
        if k < 0:
            return self.pow(self.inv(a), -k)
        out = self.one()
        base = a
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def is_zero(self, a: Elem) -> bool:
        return a.is_zero()

    def is_rational(self, a: Elem) -> bool:
        return a.degree() <= 0

    def rational_value(self, a: Elem) -> Fraction:
        if a.is_zero():
            return Fraction(0)
        if a.degree() > 0:
            raise ValueError("element is not rational")
        c = a.coeffs()[0]
        return Fraction(int(c.p), int(c.q))

    def eval_intpoly(self, f: IntPoly, a: Elem) -> Elem:
        acc = self.zero()
        for c in reversed(f.coeffs):
            acc = self.mul(acc, a) + c
        return acc

    def eval_fmpq(self, f: Elem, a: Elem) -> Elem:
        """f(a) for a rational polynomial f."""
        acc = self.zero()
        for c in reversed(f.coeffs()):
            acc = self.mul(acc, a) + c
        return acc

    # characteristic / minimal polynomials -----------------------------------
    def charpoly(self, a: Elem) -> IntPoly:
        """Primitive integer multiple of prod (z - a(t_i)) over roots t_i."""
        num = a.numer()
        den = int(a.denom())
        ctx = _mpoly_ctx(("t", "z"))
        t, z = ctx.gens()
        r = ctx.from_dict({(i, 0): int(c) for i, c in enumerate(self.rho.coeffs) if c})
        e = ctx.from_dict({(i, 0): int(c) for i, c in enumerate(num.coeffs()) if c})
        res = r.resultant(z * den - e, "t")
        d = res.to_dict()
        deg = max((k[1] for k in d), default=0)
        coeffs = [0] * (deg + 1)
        for k, v in d.items():
            coeffs[k[1]] += int(v)
        return IntPoly(coeffs).primitive()

    def minpoly(self, a: Elem) -> IntPoly:
        facs = factor_over_int(self.charpoly(a))
        facs = [g for g, _ in facs if g.degree > 0]
        if len(facs) != 1:
            raise ArithmeticError("characteristic polynomial is not a power of an irreducible")
        return facs[0]

    def express_in(self, e: Elem, x: Elem) -> Elem | None:
        """x as a polynomial in e (a K-element of degree [K:Q]), or None
        when e does not generate K."""
        d = self.degree
        cols = []
        acc = self.one()
        for _ in range(d):
            cols.append([acc.coeffs()[i] if i < len(acc.coeffs()) else 0 for i in range(d)])
            acc = self.mul(acc, e)
        m = flint.fmpq_mat([[cols[j][i] for j in range(d)] for i in range(d)])
        if m.det() == 0:
            return None
        xc = x.coeffs()
        rhs = flint.fmpq_mat([[xc[i] if i < len(xc) else 0] for i in range(d)])
        sol = m.solve(rhs)
        return flint.fmpq_poly([sol[i, 0] for i in range(d)])

    # polynomials over K ---------------------------------------------------
    def poly_trim(self, f: list[Elem]) -> list[Elem]:
        f = list(f)
        while f and f[-1].is_zero():
            f.pop()
        return f

    def poly_monic(self, f: list[Elem]) -> list[Elem]:
        f = self.poly_trim(f)
        if not f:
            return f
        li = self.inv(f[-1])
        return [self.mul(c, li) for c in f]

    def poly_rem(self, f: list[Elem], g: list[Elem]) -> list[Elem]:
        f = self.poly_trim(f)
        g = self.poly_monic(g)
        if not g:
            raise ZeroDivisionError("polynomial division by zero")
        dg = len(g) - 1
        while len(f) - 1 >= dg and f:
            c = f[-1]
            shift = len(f) - 1 - dg
            for i in range(dg + 1):
                f[shift + i] = f[shift + i] - self.mul(c, g[i])
            f = self.poly_trim(f)
        return f

    def poly_gcd(self, f: list[Elem], g: list[Elem]) -> list[Elem]:
        a, b = self.poly_trim(f), self.poly_trim(g)
        while b:
            a, b = b, self.poly_rem(a, b)
        return self.poly_monic(a)

    def poly_eval(self, f: Sequence[Elem], a: Elem) -> Elem:
        acc = self.zero()
        for c in reversed(list(f)):
            acc = self.mul(acc, a) + c
        return acc

    # power series over K ---------------------------------------------------
    def series_mul(self, a: list[Elem], b: list[Elem], prec: int) -> list[Elem]:
        out = [self.zero() for _ in range(prec)]
        for i, x in enumerate(a[:prec]):
            if x.is_zero():
                continue
            for j, y in enumerate(b[: prec - i]):
                if not y.is_zero():
                    out[i + j] = out[i + j] + self.mul(x, y)
        return out

    def series_order(self, a: list[Elem]) -> int | None:
        for i, x in enumerate(a):
            if not x.is_zero():
                return i
        return None


def poly_in_two_vars_at(coeffs: dict[tuple[int, int], int], K: NumberField, u: Elem, w: Elem) -> Elem:
    """Evaluate sum c_{ij} u^i w^j in K."""
    acc = K.zero()
    upows: dict[int, Elem] = {}
    wpows: dict[int, Elem] = {}
    for (i, j), c in coeffs.items():
        if i not in upows:
            upows[i] = K.pow(u, i)
        if j not in wpows:
            wpows[j] = K.pow(w, j)
        acc = acc + K.mul(K.mul(upows[i], wpows[j]), K.elem(c))
    return acc
