"""Exact check that a rational map of P^1 is Belyi.

Uses the package's integer factorisation, which has its own oracle tests;
everything else is plain divisibility.
"""

from fractions import Fraction

from abc_effectivity.belyi import RationalMapP1
from abc_effectivity.polys import factor_over_int


def p1_critical_values_special(g: RationalMapP1) -> bool:
    """Exact oracle: every critical value of g lies in {0, 1, inf}.

    An irreducible factor h of the Wronskian has its roots mapped to 0, inf
    or 1 exactly when h divides num, den or num - den.  Infinity is critical
    when the Wronskian has degree below 2 deg g - 2.
    """
    num, den = g.num, g.den
    W = num.derivative() * den - num * den.derivative()
    for h, _ in factor_over_int(W):
        if h.degree < 1:
            continue
        if not (h.divides(num) or h.divides(den) or h.divides(num - den)):
            return False
    d = g.degree
    if W.is_zero() or W.degree < 2 * d - 2:
        v = g(None)
        if v not in (None, Fraction(0), Fraction(1)):
            return False
    return True
