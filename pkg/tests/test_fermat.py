import cmath
from fractions import Fraction

import flint
import pytest
from hypothesis import assume, given, strategies as st

from abc_effectivity.algebraic import AlgebraicNumber, ProjPoint
from abc_effectivity.comparison import sample_points
from abc_effectivity.fermat import (
    FFElement,
    FunctionFieldError,
    RatFunc,
    ff_add,
    ff_complexity,
    ff_inverse,
    ff_mul,
    ff_normalize,
    ff_pow,
    format_ff,
    local_parameter_identity_check,
    parse_ff,
)
from abc_effectivity.fermat_local import CurvePoint, ff_critical_locus, ff_evaluate, ff_map_degree

from oracles import peval


def X(n):
    return FFElement.x(n)


def Y(n):
    return FFElement.y(n)


def elements(n, max_exp=2, max_coeff=4):
    """Random small FFElements: polynomial numerator over a polynomial in x."""
    monos = st.dictionaries(
        st.tuples(st.integers(0, max_exp), st.integers(0, n - 1)), st.integers(-max_coeff, max_coeff), max_size=4
    )
    dens = st.lists(st.integers(-3, 3), min_size=1, max_size=3).filter(lambda c: any(c))
    return st.builds(
        lambda t, d: ff_mul(FFElement.from_xy(n, t), FFElement.from_xpoly(n, 1, flint.fmpz_poly(d))), monos, dens
    )


def rf(num, den=(1,)):
    return RatFunc.make(flint.fmpz_poly(list(num)), flint.fmpz_poly(list(den)))


class TestNormalize:
    def test_common_factors(self):
        f = ff_normalize(2, [rf([0, 2], [2]), rf([0])])
        assert f == X(2)
        g = ff_normalize(2, [rf([-1, 0, 1], [-1, 1]), rf([0])])
        assert g == FFElement.from_xpoly(2, flint.fmpz_poly([1, 1]))

    def test_idempotent(self):
        f = ff_add(X(3), ff_mul(Y(3), FFElement.const(3, Fraction(2, 3))))
        assert ff_normalize(3, f.coeffs) == f

    def test_zero_denominator(self):
        with pytest.raises(ZeroDivisionError):
            ff_normalize(2, [(flint.fmpz_poly([1]), flint.fmpz_poly([0]))])


class TestArithmetic:
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_relation(self, n):
        assert ff_mul(Y(n), ff_pow(Y(n), n - 1)) == FFElement.from_xpoly(n, flint.fmpz_poly([1] + [0] * (n - 1) + [-1]))

    def test_add_zero(self):
        f = ff_add(X(3), Y(3))
        assert ff_add(f, FFElement.zero(3)) == f

    def test_difference_of_squares(self):
        f = ff_mul(ff_add(X(2), Y(2)), ff_add(X(2), -Y(2)))
        assert f == FFElement.from_xpoly(2, flint.fmpz_poly([-1, 0, 2]))

    def test_mismatched(self):
        with pytest.raises(FunctionFieldError):
            ff_add(X(2), X(3))

    @given(elements(2), elements(2), elements(2))
    def test_ring_axioms_c2(self, f, g, h):
        assert ff_mul(ff_mul(f, g), h) == ff_mul(f, ff_mul(g, h))
        assert ff_mul(f, ff_add(g, h)) == ff_add(ff_mul(f, g), ff_mul(f, h))
        assert ff_add(f, g) == ff_add(g, f)

    @given(elements(3), elements(3), elements(3))
    def test_ring_axioms_c3(self, f, g, h):
        assert ff_mul(ff_mul(f, g), h) == ff_mul(f, ff_mul(g, h))
        assert ff_mul(f, ff_add(g, h)) == ff_add(ff_mul(f, g), ff_mul(f, h))


class TestInverse:
    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_y(self, n):
        expected = ff_mul(ff_pow(Y(n), n - 1), FFElement.from_xpoly(n, 1, flint.fmpz_poly([1] + [0] * (n - 1) + [-1])))
        assert ff_inverse(Y(n)) == expected

    def test_x(self):
        inv = ff_inverse(X(3))
        assert inv.coeffs[0].num == flint.fmpz_poly([1]) and inv.coeffs[0].den == flint.fmpz_poly([0, 1])

    def test_shift(self):
        f = ff_add(ff_mul(FFElement.const(2, 2), X(2)), -Y(2))
        # norm (2x - y)(2x + y) = 5x^2 - 1
        assert ff_mul(f, ff_add(ff_mul(FFElement.const(2, 2), X(2)), Y(2))) == FFElement.from_xpoly(
            2, flint.fmpz_poly([-1, 0, 5])
        )
        assert ff_mul(f, ff_inverse(f)) == FFElement.one(2)

    def test_zero(self):
        with pytest.raises((ZeroDivisionError, FunctionFieldError)):
            ff_inverse(FFElement.zero(2))

    @given(st.sampled_from([2, 3, 4]).flatmap(elements))
    def test_product_is_one(self, f):
        assume(not f.is_zero())
        assume(ff_complexity(f).H <= 8)
        assert ff_mul(f, ff_inverse(f)) == FFElement.one(f.n)


def _numeric_value(f: FFElement, x0: complex, y0: complex) -> complex:
    total = 0j
    for i, c in enumerate(f.coeffs):
        if c.is_zero():
            continue
        num = peval([int(v) for v in c.num.coeffs()], x0)
        den = peval([int(v) for v in c.den.coeffs()], x0)
        total += num / den * y0**i
    return total


class TestEvaluate:
    def test_examples(self):
        Q = CurvePoint(2, AlgebraicNumber.rational(Fraction(3, 5)), AlgebraicNumber.rational(Fraction(4, 5)))
        assert ff_evaluate(X(2), Q) == ProjPoint.affine(Fraction(3, 5))
        Q1 = CurvePoint(3, AlgebraicNumber.rational(1), AlgebraicNumber.rational(0))
        assert ff_evaluate(ff_pow(X(3), 3), Q1) == ProjPoint.affine(1)
        Q2 = CurvePoint(2, AlgebraicNumber.rational(0), AlgebraicNumber.rational(1))
        assert ff_evaluate(ff_mul(Y(2), ff_inverse(X(2))), Q2).is_infinity

    def test_off_curve(self):
        with pytest.raises(FunctionFieldError):
            CurvePoint(2, AlgebraicNumber.rational(1), AlgebraicNumber.rational(1))

    @given(st.sampled_from([2, 3]).flatmap(lambda n: st.tuples(elements(n), elements(n), st.integers(0, 10**6))))
    def test_multiplicative_and_numeric(self, args):
        f, g, seed = args
        n = f.n
        (Q,) = sample_points(n, 1, seed=seed)
        fq, gq, fgq = ff_evaluate(f, Q), ff_evaluate(g, Q), ff_evaluate(ff_mul(f, g), Q)
        if fq.is_infinity or gq.is_infinity or fgq.is_infinity:
            return
        prod = fq.alpha * gq.alpha
        assert prod == fgq.alpha
        x0, y0 = Q.x0.to_complex(), Q.y0.to_complex()
        assert cmath.isclose(fq.alpha.to_complex(), _numeric_value(f, x0, y0), rel_tol=1e-8, abs_tol=1e-8)


class TestComplexity:
    def test_examples(self):
        assert ff_complexity(X(2)).H == 2
        assert ff_complexity(ff_pow(X(2), 5)).H == 5
        c = ff_complexity(ff_mul(FFElement.const(2, 10), X(2)))
        assert c.max_coeff == 10 and c.H >= c.log_height

    @given(st.sampled_from([2, 3, 4]).flatmap(elements))
    def test_at_least_n(self, f):
        assert ff_complexity(f).H >= f.n


class TestCriticalLocus:
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_pi(self, n):
        loc = ff_critical_locus(ff_pow(X(n), n))
        assert loc.degree == n * n
        assert all(o.e == n for o in loc.orbits)
        assert sum(o.size for o in loc.orbits) == 3 * n
        assert {str(v) for v in loc.critical_values()} == {"[1:0]", "[1:1]", "[0:1]"}
        g = (n - 1) * (n - 2) // 2
        assert loc.total_ramification == 3 * n * (n - 1) == 2 * g - 2 + 2 * n * n

    def test_x_on_conic(self):
        loc = ff_critical_locus(X(2))
        assert loc.complete and loc.total_ramification == 2
        # the branch points (1, 0) and (-1, 0) are two rational orbits
        assert sorted(str(o.x_minpoly) for o in loc.orbits) == ["x + 1", "x - 1"]
        assert all(o.e == 2 and o.size == 1 for o in loc.orbits)

    def test_moebius_in_x(self):
        h = ff_mul(ff_add(ff_mul(FFElement.const(2, 2), X(2)), FFElement.one(2)), ff_inverse(ff_add(X(2), FFElement.const(2, 3))))
        loc = ff_critical_locus(h)
        ref = ff_critical_locus(X(2))
        assert sorted(str(o.x_minpoly) for o in loc.orbits) == sorted(str(o.x_minpoly) for o in ref.orbits)

    def test_constant(self):
        with pytest.raises((FunctionFieldError, ValueError)):
            ff_critical_locus(FFElement.const(2, 3))


class TestDegree:
    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_examples(self, n):
        assert ff_map_degree(ff_pow(X(n), n)) == n * n
        assert ff_map_degree(X(n)) == n
        assert isinstance(ff_map_degree(X(n)), int)

    def test_x_squared_on_conic(self):
        assert ff_map_degree(ff_pow(X(2), 2)) == 4


class TestLocalParameter:
    @pytest.mark.parametrize("n,a", [(2, 2), (3, 2), (5, 7)])
    def test_examples(self, n, a):
        assert local_parameter_identity_check(n, a)


class TestText:
    @given(st.sampled_from([2, 3, 4]).flatmap(elements))
    def test_roundtrip(self, f):
        assert parse_ff(format_ff(f), f.n) == f

    def test_expression_syntax(self):
        n = 2
        X, Y = FFElement.x(n), FFElement.y(n)
        assert parse_ff("x", n) == X
        assert parse_ff("x^2 + y", n) == ff_add(ff_pow(X, 2), Y)
        # on C_2, (y + 2)(2 - y) = x^2 + 3
        got = parse_ff("(x - 1)/(y + 2)", n)
        assert ff_mul(got, parse_ff("y + 2", n)) == parse_ff("x - 1", n)
        assert parse_ff("x^-1", n) == ff_inverse(X)
        # the curve relation collapses to zero
        assert parse_ff("x^2 + y^2 - 1", n).is_zero()

    @pytest.mark.parametrize("bad", ["x + z", "x^y", "1.5*x", "x/0", "x +"])
    def test_expression_errors(self, bad):
        from abc_effectivity.polys import PolynomialError

        with pytest.raises(PolynomialError):
            parse_ff(bad, 2)
