import cmath
import math
from fractions import Fraction

import flint
import pytest
from hypothesis import assume, given, strategies as st

from abc_effectivity.algebraic import (
    AlgebraicError,
    AlgebraicNumber,
    PlaceQ,
    ProjPoint,
    alg_add,
    alg_inv,
    alg_mul,
    alg_neg,
    chordal_distance,
    primitive_element,
    product_formula_sum,
    roots_of,
    valuation_profile,
    weil_height,
)
from abc_effectivity.polys import IntPoly, is_irreducible

from oracles import mahler_float, peval
from strategies import algebraic_numbers, rationals

P = IntPoly.parse
INF = PlaceQ(None)


def root(text, near):
    return AlgebraicNumber.root_near(P(text), near)


def contains(ball, value, tol=0.0):
    return float(ball.lower()) - tol <= value <= float(ball.upper()) + tol


class TestRoots:
    def test_sqrt2(self):
        rs = roots_of(P("x^2 - 2"), Fraction(1, 10**9))
        vals = sorted(r.to_complex().real for r in rs)
        assert len(rs) == 2
        assert abs(vals[0] + math.sqrt(2)) < 1e-9 and abs(vals[1] - math.sqrt(2)) < 1e-9
        for r in rs:
            lo_re, hi_re = r.box[0], r.box[1]
            assert hi_re - lo_re <= Fraction(1, 10**9)
            # interval Newton oracle: f changes sign across the real box
            assert peval([-2, 0, 1], lo_re) * peval([-2, 0, 1], hi_re) <= 0

    def test_rational(self):
        (r,) = roots_of(P("x - 3"))
        assert r.is_rational() and r.rational_value() == 3

    def test_i(self):
        zs = sorted((r.to_complex() for r in roots_of(P("x^2 + 1"))), key=lambda z: z.imag)
        assert abs(zs[0] + 1j) < 1e-12 and abs(zs[1] - 1j) < 1e-12

    def test_squarefree_count(self):
        assert len(roots_of(P("x^3 - x^2"))) == 2


class TestArithmetic:
    def test_sqrt2_plus_sqrt3(self):
        s = alg_add(root("x^2 - 2", 1.4), root("x^2 - 3", 1.7))
        assert s.minpoly == P("x^4 - 10*x^2 + 1")
        assert abs(s.to_complex() - (math.sqrt(2) + math.sqrt(3))) < 1e-9

    def test_identity(self):
        a = root("x^3 - 2", 1.26)
        assert alg_add(a, AlgebraicNumber.rational(0)) == a

    def test_gaussian_norm(self):
        i = root("x^2 + 1", 1j)
        p = alg_mul(alg_add(AlgebraicNumber.rational(1), i), alg_add(AlgebraicNumber.rational(1), alg_neg(i)))
        assert p.is_rational() and p.rational_value() == 2

    def test_inverse_of_zero(self):
        with pytest.raises((AlgebraicError, ZeroDivisionError, ValueError)):
            alg_inv(AlgebraicNumber.rational(0))

    @given(algebraic_numbers(max_degree=2), algebraic_numbers(max_degree=2))
    def test_numeric_agreement(self, a, b):
        s, p = alg_add(a, b), alg_mul(a, b)
        assert abs(s.to_complex() - (a.to_complex() + b.to_complex())) < 1e-8
        assert abs(p.to_complex() - a.to_complex() * b.to_complex()) < 1e-8
        assert is_irreducible(s.minpoly) and is_irreducible(p.minpoly)


class TestPrimitiveElement:
    def test_sqrt2_sqrt3(self):
        pe = primitive_element(root("x^2 - 2", 1.4), root("x^2 - 3", 1.7))
        assert pe.gamma.degree == 4 and pe.k == 1
        assert pe.gamma.minpoly == P("x^4 - 10*x^2 + 1")

    def test_rational_partner(self):
        a = root("x^2 - 2", 1.4)
        pe = primitive_element(a, AlgebraicNumber.rational(Fraction(1, 2)))
        assert pe.gamma == a and pe.k == 0

    def test_same(self):
        i = root("x^2 + 1", 1j)
        pe = primitive_element(i, i)
        assert pe.gamma == i and pe.gamma.degree == 2


class TestValuationProfile:
    def test_examples(self):
        assert valuation_profile(root("x^2 - 2", 1.4), 2).entries == ((Fraction(1, 2), 2),)
        assert valuation_profile(AlgebraicNumber.rational(Fraction(1, 3)), 3).entries == ((Fraction(-1), 1),)
        assert valuation_profile(root("x^2 + 1", 1j), 7).entries == ((Fraction(0), 2),)

    def test_zero(self):
        with pytest.raises(ValueError):
            valuation_profile(AlgebraicNumber.rational(0), 2)

    @given(algebraic_numbers(), st.sampled_from([2, 3, 5, 7]))
    def test_counts(self, a, p):
        assert sum(c for _, c in valuation_profile(a, p).entries) == a.degree


class TestHeights:
    def test_examples(self):
        assert contains(weil_height(AlgebraicNumber.rational(Fraction(3, 2))), math.log(3))
        h = weil_height(root("x^2 - 2", 1.4), Fraction(1, 10**10))
        assert abs(float(h.mid()) - math.log(2) / 2) < 1e-9
        assert float(h.rad()) * 2 <= 1e-10
        for k in (3, 5, 12):
            zeta = AlgebraicNumber.root_near(P(f"x^{k} - 1"), cmath.exp(2j * math.pi / k))
            assert contains(weil_height(zeta), 0.0)

    @given(algebraic_numbers())
    def test_mahler_oracle(self, a):
        assert contains(weil_height(a), mahler_float(list(a.minpoly.coeffs)) / a.degree, 1e-7)

    @given(algebraic_numbers(max_degree=2), algebraic_numbers(max_degree=2))
    def test_subadditivity(self, a, b):
        ha, hb = weil_height(a), weil_height(b)
        log2 = flint.arb(2).log()
        assert weil_height(alg_mul(a, b)).lower() <= (ha + hb).upper()
        assert weil_height(alg_add(a, b)).lower() <= (ha + hb + log2).upper()

    @given(algebraic_numbers())
    def test_galois_invariance(self, a):
        hs = [weil_height(r) for r in roots_of(a.minpoly)]
        for h in hs:
            assert h.overlaps(hs[0])


class TestProductFormula:
    @given(algebraic_numbers(max_degree=4, max_coeff=3))
    def test_sum_vanishes(self, a):
        s = product_formula_sum(a)
        assert abs(float(s.mid())) + float(s.rad()) < 1e-9


class TestChordal:
    def test_examples(self):
        one_zero = ProjPoint.from_pair(1, 0)
        inf = ProjPoint.from_pair(0, 1)
        assert chordal_distance(one_zero, inf, INF).overlaps(flint.arb(1))
        d = chordal_distance(ProjPoint.from_pair(1, 1), ProjPoint.from_pair(1, 2), INF)
        assert contains(d, 0.5) and float(d.rad()) == 0
        d2 = chordal_distance(one_zero, ProjPoint.from_pair(1, 2), PlaceQ(2))
        assert contains(d2, 0.5)

    def test_archimedean_can_exceed_one(self):
        d = chordal_distance(ProjPoint.affine(1), ProjPoint.affine(-1), INF)
        assert contains(d, 2.0)

    @given(rationals(), rationals(), st.sampled_from([None, 2, 3, 5]))
    def test_symmetry_and_range(self, a, b, p):
        v = PlaceQ(p)
        A, B = ProjPoint.affine(a), ProjPoint.affine(b)
        d1, d2 = chordal_distance(A, B, v), chordal_distance(B, A, v)
        assert d1.overlaps(d2)
        assert float(d1.lower()) >= 0
        assert float(d1.upper()) <= (2 if p is None else 1)
        assert (a == b) == (float(d1.upper()) == 0)

    @given(rationals(), rationals(), st.integers(1, 40), st.integers(1, 40), st.sampled_from([None, 2, 3]))
    def test_scaling_invariance(self, a, b, s, t, p):
        assume(a != b)
        v = PlaceQ(p)
        d = chordal_distance(ProjPoint.affine(a), ProjPoint.affine(b), v)
        A = ProjPoint.from_pair(AlgebraicNumber.rational(s), AlgebraicNumber.rational(s * a))
        B = ProjPoint.from_pair(AlgebraicNumber.rational(-t), AlgebraicNumber.rational(-t * b))
        assert d.overlaps(chordal_distance(A, B, v))

    def test_degenerate(self):
        with pytest.raises(ValueError):
            ProjPoint.from_pair(0, 0)


class TestSerialization:
    @given(algebraic_numbers())
    def test_roundtrip(self, a):
        b = AlgebraicNumber.from_json(a.to_json())
        assert b == a and b.minpoly == a.minpoly

    def test_placeq(self):
        assert str(PlaceQ.parse("inf")) == "inf" and PlaceQ.parse("7").p == 7
        with pytest.raises(ValueError):
            PlaceQ(6)
