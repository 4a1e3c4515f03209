import math
import random
from fractions import Fraction

import flint
import pytest
from hypothesis import given, strategies as st

from abc_effectivity.algebraic import PlaceQ, ProjPoint
from abc_effectivity.belyi import disjoint_family
from abc_effectivity.heights import in_compact_set
from abc_effectivity.fermat_local import ff_evaluate
from abc_effectivity.pipeline import (
    A_zero,
    Z7,
    Z_generic,
    compute_constants,
    epsilon_condition,
    epsilon_prime,
    parameters,
    preimage,
    reduce_point,
    repaired_epsilon,
    select_index,
)

INF = PlaceQ(None)
TWO = PlaceQ(2)


@pytest.fixture(scope="module")
def demo_family():
    return disjoint_family(2, 3)


@pytest.fixture(scope="module")
def demo_trace(demo_family):
    params = parameters(1, Fraction(1, 2), [INF], n_override=2, m_override=3)
    return reduce_point(ProjPoint.affine(5), params, demo_family, A_zero)


class TestParameters:
    def test_two_places(self):
        p = parameters(1, Fraction(1, 2), [TWO, INF])
        assert (p.n, p.m) == (12, 289)
        assert not p.demo_mode

    def test_one_place(self):
        p = parameters(1, Fraction(9, 10), [INF])
        assert (p.n, p.m) == (12, 145)

    def test_duplicate_places_collapse(self):
        assert parameters(1, Fraction(1, 2), [INF, INF]).m == 145

    @pytest.mark.parametrize("eps", [0, 1, Fraction(3, 2), -1])
    def test_bad_eps(self, eps):
        with pytest.raises(ValueError):
            parameters(1, eps, [INF])

    def test_demo_range(self):
        assert parameters(1, Fraction(1, 2), [INF], n_override=2, m_override=3).demo_mode
        with pytest.raises(ValueError):
            parameters(1, Fraction(1, 2), [INF], n_override=6)
        with pytest.raises(ValueError):
            parameters(1, Fraction(1, 2), [INF], m_override=3)

    @given(st.fractions(min_value=Fraction(1, 10**4), max_value=Fraction(9999, 10**4)).filter(lambda e: 0 < e < 1))
    def test_three_over_n_at_most_half_eps(self, eps):
        n = parameters(1, eps, [INF]).n
        assert Fraction(3, n) <= eps / 2
        if (1 / eps).denominator != 1:
            assert Fraction(3, n) < eps / 2

    def test_equality_at_unit_fractions(self):
        # eps = 1/k gives n = 6k and 3/n = eps/2 exactly
        for k in range(2, 20):
            assert Fraction(3, parameters(1, Fraction(1, k), [INF]).n) == Fraction(1, 2 * k)

    def test_random_eps_strict(self):
        rng = random.Random(1)
        for _ in range(1000):
            b = rng.randint(2, 10**6)
            eps = Fraction(rng.randint(1, b - 1), b)
            if (1 / eps).denominator == 1:
                continue
            assert Fraction(3, parameters(1, eps, [INF]).n) < eps / 2


class TestEpsilon:
    def test_value(self):
        e, _ = epsilon_prime(Fraction(1, 2), 10)
        assert e == Fraction(1, 32008)

    def test_m1_fails_exactly(self):
        e, chk = epsilon_prime(Fraction(1, 2), 1, 12)
        assert e == Fraction(1, 40)
        assert chk.lhs == Fraction(41, 32) and chk.rhs == Fraction(9, 8)
        assert not chk.holds

    def test_m10_also_fails(self):
        # as M grows the left side climbs toward 4/3, which already exceeds 9/8
        _, chk = epsilon_prime(Fraction(1, 2), 10, 12)
        assert chk.rhs < chk.lhs < Fraction(4, 3)
        assert Fraction(4, 3) - chk.lhs < Fraction(1, 1000)
        assert not chk.holds

    def test_oracle_form(self):
        # independent rewrite: (1+e) < R (1 - 8 e M^3) with a positive denominator
        for M in (1, 2, 5, 10):
            for eps in (Fraction(1, 2), Fraction(9, 10), Fraction(1, 7)):
                n = 6 * math.ceil(1 / eps)
                e, chk = epsilon_prime(eps, M, n)
                R = (1 - Fraction(3, n)) * (1 + eps)
                expected = 1 - 8 * e * M**3 > 0 and (1 + e) < R * (1 - 8 * e * M**3)
                assert chk.holds == expected

    def test_repaired(self):
        e, chk = repaired_epsilon(Fraction(1, 2), 10, 12)
        assert e == Fraction(1, 144016)
        assert chk.holds

    def test_repaired_undefined_in_demo(self):
        with pytest.raises(ValueError):
            repaired_epsilon(Fraction(1, 2), 3, 2)

    @given(
        st.fractions(min_value=Fraction(1, 100), max_value=Fraction(99, 100)),
        st.integers(1, 50),
    )
    def test_repaired_always_holds(self, eps, M):
        n = 6 * math.ceil(1 / eps)
        if (1 - Fraction(3, n)) * (1 + eps) <= 1:
            return
        assert repaired_epsilon(eps, M, n)[1].holds

    def test_den_nonpositive(self):
        chk = epsilon_condition(Fraction(1), Fraction(1, 2), Fraction(1), 12)
        assert chk.lhs is None and not chk.holds


class TestZ:
    @staticmethod
    def z7_oracle(n):
        total = 0.0
        for p in range(2, n + 1):
            if n % p == 0 and all(p % q for q in range(2, p)):
                k = 0
                while p**k <= n * n:
                    k += 1
                total += k * math.log(p)  # k - 1 = floor(log_p n^2), plus one
        return total

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 12, 30])
    def test_z7(self, n):
        assert float(Z7(n).mid()) == pytest.approx(self.z7_oracle(n), rel=1e-12)

    def test_z_generic(self):
        assert Z_generic(2) == pytest.approx(16 * math.log(8))

    def test_demo_constants(self, demo_family):
        rep = compute_constants(1, Fraction(1, 2), [INF], 2, 3, family=demo_family)
        assert rep.demo_mode
        names = [n for n, _, _ in rep.Z_ledger]
        assert names == ["Z(M)", "b(M)", "Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "C"]
        assert all(v.is_finite() for _, _, v in rep.Z_ledger)
        assert rep.repaired is None  # (1 - 3/2)(3/2) < 1
        assert 0 < rep.eta <= 1
        js = rep.to_json()
        assert js["params"]["demo_mode"] is True


class TestSelection:
    def test_preimage_lies_over_P(self):
        P = ProjPoint.affine(5)
        for n in (2, 3):
            Q = preimage(n, P)
            assert Q.x0 ** n == P.alpha

    def test_preimage_rejects_special(self):
        with pytest.raises(ValueError):
            preimage(2, ProjPoint.affine(1))

    def test_select_index_membership(self, demo_family):
        P = ProjPoint.affine(5)
        rep = compute_constants(1, Fraction(1, 2), [INF], 2, 3, family=demo_family)
        sel = select_index(P, demo_family, rep.eta, [INF])
        f = demo_family.maps[sel.index - 1]
        val = ff_evaluate(f, preimage(2, P))
        assert in_compact_set(val, [INF], rep.eta)
        assert sel.to_json()["pigeonhole"]["guaranteed"] is False  # 1 * 1 * 4 >= 3


class TestReduce:
    def test_unconditional_steps(self, demo_trace):
        for s in demo_trace.steps:
            if s.kind in ("identity", "unconditional"):
                assert s.holds, s.name
        assert demo_trace.unconditional_ok

    def test_step_inventory(self, demo_trace):
        kinds = {s.kind for s in demo_trace.steps}
        assert kinds == {"identity", "unconditional", "formula", "conditional"}
        names = [s.name for s in demo_trace.steps]
        assert any(n.startswith("Kummer") for n in names)
        assert any(n.startswith("comparison") for n in names)

    def test_final_step_fails_in_demo(self, demo_trace):
        # with n = 2 the factor 1 - 3/n is negative, so the final chain is vacuous
        assert not demo_trace.step(next(s.name for s in demo_trace.steps if s.name.startswith("final"))).holds

    def test_heights_consistent(self, demo_trace):
        q = demo_trace.quantities
        assert (q["h(P)"] - flint.arb(5).log()).contains(0)

    def test_rejects_degree_above_d(self, demo_family):
        from abc_effectivity.algebraic import AlgebraicNumber
        from abc_effectivity.polys import IntPoly

        params = parameters(1, Fraction(1, 2), [INF], n_override=2, m_override=3)
        P = ProjPoint(AlgebraicNumber.root_near(IntPoly([-2, 0, 1]), 1.4))
        with pytest.raises(ValueError):
            reduce_point(P, params, demo_family)
