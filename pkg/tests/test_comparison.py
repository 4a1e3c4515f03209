import math
from fractions import Fraction

import flint
import pytest
from hypothesis import given, settings, strategies as st

from abc_effectivity.algebraic import AlgebraicNumber
from abc_effectivity.comparison import (
    Dependency,
    DependencyError,
    comparison_constants,
    evaluate_dependency,
    find_dependency,
    sample_points,
    verify_comparison,
)
from abc_effectivity.fermat import FFElement, ff_add, ff_complexity, ff_mul, ff_pow
from abc_effectivity.fermat_local import CurvePoint



def X(n):
    return FFElement.x(n)


def Y(n):
    return FFElement.y(n)


def _as_vectors(elems):
    """Coefficient vectors over Q of FFElements after clearing one common
    x-denominator; built with function-field arithmetic only."""
    den = flint.fmpz_poly([1])
    for e in elems:
        for c in e.coeffs:
            if not c.is_zero():
                den = den * c.den // den.gcd(c.den)
    vecs = []
    for e in elems:
        v = {}
        for l, c in enumerate(e.coeffs):
            if c.is_zero():
                continue
            num = c.num * (den // c.den)
            for k, a in enumerate(num.coeffs()):
                if a:
                    v[(k, l)] = Fraction(int(a))
        vecs.append(v)
    return vecs


def _rank(vecs) -> int:
    keys = sorted({k for v in vecs for k in v})
    rows = [[v.get(k, Fraction(0)) for v in vecs] for k in keys]
    # rank by elimination on the transpose
    m = [list(r) for r in zip(*rows)] if rows else []
    rank = 0
    cols = len(keys)
    for c in range(cols):
        piv = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c] != 0:
                f = m[r][c] / m[rank][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def no_dependency_below(f, g, L):
    """Oracle: f^i g^j (i, j < L) are Q-linearly independent."""
    elems = [ff_mul(ff_pow(f, i), ff_pow(g, j)) for i in range(L) for j in range(L)]
    return _rank(_as_vectors(elems)) == len(elems)


class TestFindDependency:
    @pytest.mark.parametrize("n", [2, 3])
    def test_fermat_relation(self, n):
        dep = find_dependency(X(n), Y(n))
        assert dep.verified and dep.L == 4 * n**3
        nz = dep.nonzero()
        sign = nz[(0, 0)]
        assert {k: v * -sign for k, v in nz.items()} == {(n, 0): 1, (0, n): 1, (0, 0): -1}
        assert evaluate_dependency(X(n), Y(n), dep.coeffs).is_zero()
        assert no_dependency_below(X(n), Y(n), dep.L_used - 1)

    def test_power(self):
        n = 3
        dep = find_dependency(ff_pow(X(n), n), X(n))
        assert evaluate_dependency(ff_pow(X(n), n), X(n), dep.coeffs).is_zero()

    def test_dimension_count(self):
        H = 3
        L = 4 * H**3
        assert L * L > 2 * H**3 * L

    def test_constant_rejected(self):
        with pytest.raises(ValueError):
            find_dependency(FFElement.const(2, 3), X(2))

    def test_mismatched(self):
        with pytest.raises(ValueError):
            find_dependency(X(2), X(3))

    @settings(max_examples=12)
    @given(
        st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 1)), st.integers(-3, 3), min_size=1, max_size=3),
        st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 1)), st.integers(-3, 3), min_size=1, max_size=3),
    )
    def test_random_small_on_c2(self, tf, tg):
        f, g = FFElement.from_xy(2, tf), FFElement.from_xy(2, tg)
        if f.is_constant() or g.is_constant():
            return
        if max(ff_complexity(f).H, ff_complexity(g).H) > 3:
            return
        dep = find_dependency(f, g)
        assert evaluate_dependency(f, g, dep.coeffs).is_zero()
        if dep.L_used <= 5:
            assert no_dependency_below(f, g, dep.L_used - 1)


class TestConstants:
    def test_fermat_c2(self):
        dep = find_dependency(X(2), Y(2))
        c = comparison_constants(dep, 2)
        assert c.a == 32 == 4 * 2**3
        assert c.m == 2
        # reduced relation x^2 + y^2 - 1: max |c| = 1, deg_Y = 2
        assert c.q == pytest.approx(math.log(1) + math.log(3) + 2 * math.log(2))
        assert c.b == pytest.approx(c.q + 6 * math.log(2) + 5 * math.log(2))
        assert c.b >= 0

    def test_monotone_in_coefficients(self):
        base = Dependency(32, 3, [[-1, 0, 1], [0, 0, 0], [1, 0, 0]], 1.0, 1, 1, True)
        big = Dependency(32, 3, [[-7, 0, 1], [0, 0, 0], [1, 0, 0]], 1.0, 1, 1, True)
        assert comparison_constants(big, 2).b > comparison_constants(base, 2).b

    def test_no_f_terms(self):
        dep = Dependency(32, 2, [[1, -1], [0, 0]], 1.0, 1, 1, True)
        with pytest.raises(DependencyError):
            comparison_constants(dep, 2)


class TestVerifyComparison:
    def test_fifty_samples(self):
        f, g = X(2), Y(2)
        dep = find_dependency(f, g)
        c = comparison_constants(dep, 2)
        rep = verify_comparison(f, g, c, sample_points(2, 50, seed=11))
        assert rep.holds and len(rep.rows) == 50

    def test_point_0_1(self):
        f, g = X(2), Y(2)
        c = comparison_constants(find_dependency(f, g), 2)
        Q = CurvePoint(2, AlgebraicNumber.rational(0), AlgebraicNumber.rational(1))
        assert verify_comparison(f, g, c, [Q]).holds

    def test_nontrivial_pair(self):
        f = ff_add(ff_pow(X(2), 2), Y(2))
        g = X(2)
        H = max(ff_complexity(f).H_ceil, ff_complexity(g).H_ceil)
        c = comparison_constants(find_dependency(f, g, H), H)
        assert verify_comparison(f, g, c, sample_points(2, 20, seed=5)).holds
