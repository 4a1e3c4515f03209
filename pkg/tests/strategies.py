"""Hypothesis strategies for algebraic numbers and points."""

from fractions import Fraction

from hypothesis import strategies as st

from abc_effectivity.algebraic import AlgebraicNumber, ProjPoint, roots_of
from abc_effectivity.polys import IntPoly, factor_over_int


def _pick_root(coeffs, index):
    f = IntPoly(coeffs)
    facs = [g for g, _ in factor_over_int(f) if g.degree >= 1]
    g = facs[index % len(facs)]
    roots = roots_of(g)
    return roots[(index // len(facs)) % len(roots)]


def algebraic_numbers(max_degree=4, max_coeff=3, nonzero=True):
    coeffs = st.integers(1, max_degree).flatmap(
        lambda d: st.tuples(
            st.lists(st.integers(-max_coeff, max_coeff), min_size=d, max_size=d),
            st.integers(1, max_coeff),
        ).map(lambda t: list(t[0]) + [t[1]])
    )
    out = st.builds(_pick_root, coeffs, st.integers(0, 50))
    if nonzero:
        out = out.filter(lambda a: not a.is_zero())
    return out


def rationals(bound=50):
    return st.builds(Fraction, st.integers(-bound, bound), st.integers(1, bound))


def points(max_degree=3, max_coeff=3):
    return st.one_of(
        st.just(ProjPoint.infinity()),
        algebraic_numbers(max_degree, max_coeff, nonzero=False).map(ProjPoint.affine),
    )


def rational_algebraic(q) -> AlgebraicNumber:
    return AlgebraicNumber.rational(q)
