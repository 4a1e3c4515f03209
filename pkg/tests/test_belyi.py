from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from abc_effectivity.algebraic import AlgebraicNumber, ProjPoint
from abc_effectivity.belyi import (
    ONE_ORBIT,
    ZERO_ORBIT,
    RationalMapP1,
    ResourceLimitExceeded,
    belyi_p1,
    build_F,
    choose_shift_a,
    disjoint_family,
    noncritical_belyi,
    orbit_of,
    t_coordinate,
    verify_certificate,
)
from abc_effectivity.fermat import FFElement, ff_pow
from abc_effectivity.fermat_local import CurvePoint, ff_critical_locus, ff_map_degree
from abc_effectivity.polys import IntPoly, factor_over_int, resultant

from p1_oracle import p1_critical_values_special

P = IntPoly.parse


def ratpt(q):
    return ProjPoint.affine(Fraction(q))


class TestLambdaMaps:
    @pytest.mark.parametrize("m", range(1, 7))
    @pytest.mark.parametrize("l", range(1, 7))
    def test_critical_data(self, m, l):
        g = RationalMapP1.lam(m, l)
        assert p1_critical_values_special(g)
        W = g.num.derivative() * g.den - g.num * g.den.derivative()
        roots = {Fraction(-h.coeffs[0], h.coeffs[1]) for h, _ in factor_over_int(W) if h.degree == 1}
        # 0 (resp. 1) is critical only when it is a multiple zero (m, l >= 2)
        expected = {Fraction(m, m + l)} | ({Fraction(0)} if m > 1 else set()) | ({Fraction(1)} if l > 1 else set())
        assert roots == expected
        assert all(h.degree <= 1 for h, _ in factor_over_int(W))
        assert g(Fraction(m, m + l)) == 1
        assert g(None) is None  # infinity is a pole of order m + l


class TestBelyiP1:
    @pytest.mark.parametrize(
        "T",
        [
            [ratpt(2)],
            [ratpt(Fraction(1, 2))],
            [ProjPoint.affine(AlgebraicNumber.root_near(P("x^2 - 2"), 1.4))],
        ],
    )
    def test_clauses(self, T):
        res = belyi_p1(T)
        g = res.g
        assert p1_critical_values_special(g)
        for t in T:
            assert g.image_orbit(orbit_of(t)) in (ZERO_ORBIT, ONE_ORBIT, None)
        assert g(Fraction(0)) not in (None, Fraction(0), Fraction(1))
        assert res.image_of_zero == g(Fraction(0))

    def test_sqrt2_uses_degree_lowering(self):
        res = belyi_p1([ProjPoint.affine(AlgebraicNumber.root_near(P("x^2 - 2"), 1.4))])
        stages = [t["stage"] for t in res.trace]
        assert 1 in stages
        # progress measure decreases strictly
        assert all(a > b for a, b in zip(res.progress, res.progress[1:]))

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            belyi_p1([ratpt(0)])

    @settings(max_examples=15)
    @given(st.lists(st.fractions(min_value=-6, max_value=6, max_denominator=6), min_size=1, max_size=2))
    def test_random_rational_sets(self, qs):
        """Either a sound map or a typed resource failure with its trace."""
        qs = [q for q in qs if q != 0]
        if not qs:
            return
        try:
            res = belyi_p1([ratpt(q) for q in qs])
        except ResourceLimitExceeded as exc:
            assert exc.trace
            return
        assert res.g.degree <= 2000
        assert p1_critical_values_special(res.g)
        for q in qs:
            assert res.g(q) in (None, Fraction(0), Fraction(1))


class TestShift:
    def test_empty(self):
        assert choose_shift_a(2, []) == 2

    def test_forced(self):
        # y = 2x on C_2: x = 1/sqrt5, y = 2/sqrt5, so pi = x^2 = 1/5
        x0 = AlgebraicNumber.root_near(P("5*x^2 - 1"), 0.45)
        y0 = AlgebraicNumber.root_near(P("5*x^2 - 4"), 0.9)
        assert choose_shift_a(2, [CurvePoint(2, x0, y0)]) == 3
        assert choose_shift_a(2, [ratpt(Fraction(1, 5))]) == 3

    def test_irrational_ratios(self):
        assert choose_shift_a(2, [ProjPoint.affine(AlgebraicNumber.root_near(P("x^2 - 3"), 1.7))]) == 2


class TestBuildF:
    def test_exponents(self):
        assert build_F(2, [], verify=False).exponent == -3
        assert build_F(2, [ratpt(2)], verify=False).exponent == -5

    def test_verified_fibre(self):
        frag = build_F(2, [ratpt(2)])
        assert frag.fibre_ok and frag.unramified_over_zero
        assert ZERO_ORBIT not in frag.T


@pytest.fixture(scope="module")
def cert():
    return noncritical_belyi(2, [ratpt(0), ratpt(1), ProjPoint.infinity(), ProjPoint.from_pair(1, 2)])


class TestCertificate:
    def test_valid(self, cert):
        assert cert.valid
        assert all(cert.clause_flags.values())
        assert {str(v) for v in cert.critical_values} <= {"[1:0]", "[1:1]", "[0:1]"}

    def test_independent_rederivation(self, cert):
        locus = ff_critical_locus(cert.f)
        assert locus.complete
        assert all(v.is_special() for v in locus.critical_values())
        # genus-0 route: f = g o t with t an isomorphism, so the P^1 oracle applies to g
        assert p1_critical_values_special(cert.g)

    def test_noncritical_and_image(self, cert):
        assert cert.g_of_zero not in (None, 0, 1)
        assert any(o not in (ZERO_ORBIT, ONE_ORBIT, None) for o in cert.fibre_values)

    def test_degree_multiplicative(self, cert):
        assert ff_map_degree(cert.f) == cert.g.degree * ff_map_degree(cert.F)
        assert cert.F == t_coordinate(2)

    def test_tamper_detected(self, cert):
        bad = noncritical_belyi(2, [ratpt(2)], verify=False)
        bad.f = ff_pow(FFElement.x(2), 2) * FFElement.const(2, 3)
        verify_certificate(bad)
        assert not bad.valid

    def test_json(self, cert):
        js = cert.to_json()
        assert js["valid"] and js["route"] == "genus-0"

    def test_general_route_resource_limit(self):
        with pytest.raises(ResourceLimitExceeded) as info:
            noncritical_belyi(3, [ratpt(2)], degree_ceiling=200)
        assert info.value.trace


class TestFamily:
    def test_single(self):
        fam = disjoint_family(2, 1)
        assert fam.count == 1 and fam.disjoint

    def test_three_maps(self):
        fam = disjoint_family(2, 3)
        assert fam.count == 3 and fam.disjoint
        assert all(r != 0 for r in fam.resultants.values())
        # oracle: recompute the resultants of finite branch-image eliminants
        elims = []
        for img in fam.branch_images:
            E = IntPoly((1,))
            for o in img:
                if o is not None:
                    E = E * o
            elims.append((E, None in img))
        for i in range(3):
            for j in range(i + 1, 3):
                assert resultant(elims[i][0], elims[j][0]) != 0
                assert not (elims[i][1] and elims[j][1])
        for c in fam.certificates[1:]:
            assert c.valid
