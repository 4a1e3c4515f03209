"""Heights, conductors and root discriminants of points of P^1(Qbar).

Place decompositions come from Dedekind's criterion.  For a prime p we look
for an integral generator theta of K whose order Z[theta] is p-maximal; the
places above p then match the factors g_i^e_i of the minimal polynomial of
theta mod p, and valuations of an element at each place are read off from
Hensel-lifted local factors.  When no such generator turns up the prime is
handled with certified lower/upper bounds instead of an exact value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import itertools
from functools import lru_cache

import flint

from .algebraic import (
    INF,
    AlgebraicNumber,
    PlaceQ,
    ProjPoint,
    _conjugates,
    alg_mul,
    alg_sub,
    chordal_distance,
    newton_polygon_slopes,
    primitive_element,
    vp,
    vp_fraction,
    weil_height,
)
from .intervals import arb_bounds, arb_from_fraction, bits_for_width, frac_str, working_precision
from .maxorder import p_index, p_maximal_elements
from .numfield import NumberField
from .polys import IntPoly, discriminant, factor_mod_p, poly_gcd, resultant


class SupportError(ValueError):
    """The point lies on the support {0, 1, infinity} of the divisor."""


class MembershipError(ValueError):
    """A value does not lie in the field it was claimed to lie in."""


# ---------------------------------------------------------------------------
# results


def _log_combination(terms: dict[int, tuple[Fraction, Fraction]], bits: int = 128) -> flint.arb:
    with working_precision(bits):
        lo = flint.arb(0)
        hi = flint.arb(0)
        for p, (a, b) in terms.items():
            lp = flint.arb(p).log()
            lo += arb_from_fraction(a) * lp
            hi += arb_from_fraction(b) * lp
        return lo.union(hi)


def _terms_json(terms):
    return {str(p): [frac_str(a), frac_str(b)] for p, (a, b) in sorted(terms.items())}


@dataclass
class ConductorResult:
    """Conductor as sum_p c_p log p with c_p in [lo_p, hi_p] (equal when exact)."""

    terms: dict[int, tuple[Fraction, Fraction]]
    regular_primes: list[int]
    irregular_primes: list[int]
    field_degree: int

    @property
    def exact(self) -> bool:
        return not self.irregular_primes

    @property
    def value(self) -> flint.arb:
        return _log_combination(self.terms)

    def to_json(self) -> dict:
        return {
            "value": [str(x) for x in _fmt(self.value)],
            "exact": self.exact,
            "field_degree": self.field_degree,
            "log_coefficients": _terms_json(self.terms),
            "regular_primes": self.regular_primes,
            "irregular_primes": self.irregular_primes,
        }


@dataclass
class RootDiscResult:
    """log root discriminant (1/[K:Q]) sum_p v_p(D_K) log p."""

    valuations: dict[int, tuple[int, int]]
    field_degree: int
    irregular_primes: list[int] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return not self.irregular_primes

    @property
    def value(self) -> flint.arb:
        d = self.field_degree
        return _log_combination({p: (Fraction(a, d), Fraction(b, d)) for p, (a, b) in self.valuations.items()})

    def to_json(self) -> dict:
        return {
            "value": [str(x) for x in _fmt(self.value)],
            "exact": self.exact,
            "field_degree": self.field_degree,
            "disc_valuations": {str(p): list(v) for p, v in sorted(self.valuations.items())},
            "irregular_primes": self.irregular_primes,
        }


def _fmt(x: flint.arb):
    from .intervals import fmt_interval

    return fmt_interval(x, 15)


# ---------------------------------------------------------------------------
# Dedekind's criterion and p-regular generators


def _prod_nmod(polys, p):
    out = flint.nmod_poly([1], p)
    for g in polys:
        out *= g
    return out


def _to_nmod(f: IntPoly, p: int) -> flint.nmod_poly:
    return flint.nmod_poly([c % p for c in f.coeffs], p)


def _lift(g: flint.nmod_poly) -> IntPoly:
    return IntPoly(int(c) for c in g.coeffs())


def dedekind_criterion(F: IntPoly, p: int):
    """Dedekind's test for a monic F at p.

    Returns (regular, factors, U): factors is the factorization of F mod p
    as [(g_i, e_i)]; when not regular, U(theta)/p is integral but not in
    Z[theta].
    """
    facs = factor_mod_p(F, p)
    gs = [_to_nmod(g, p) for g, _ in facs]
    g_bar = _prod_nmod(gs, p)
    h_bar = _prod_nmod([g**(e - 1) for g, (_, e) in zip(gs, facs) if e > 1], p)
    gh = _lift(g_bar) * _lift(h_bar)
    diff = F - gh
    assert all(c % p == 0 for c in diff.coeffs)
    f_bar = _to_nmod(IntPoly(c // p for c in diff.coeffs), p)
    z = g_bar.gcd(h_bar)
    if not f_bar.is_zero():
        z = z.gcd(f_bar)
    if z.degree() <= 0:
        return True, facs, None
    F_bar = _to_nmod(F, p)
    U = _lift(divmod(F_bar, z)[0])
    return False, facs, U


@dataclass(frozen=True)
class LocalGenerator:
    """An integral generator of K = Q[theta0]/(F0), tried at one prime."""

    element: flint.fmpq_poly  # in the theta0 basis
    minpoly: IntPoly  # monic
    regular: bool
    factors: tuple = ()


_MAX_TRIES = 24


@lru_cache(maxsize=1024)
def _local_search(F0_coeffs: tuple[int, ...], p: int) -> tuple[LocalGenerator | None, tuple[LocalGenerator, ...]]:
    F0 = IntPoly(F0_coeffs)
    K = NumberField(F0)
    queue = [K.gen()]
    seen: set[tuple] = set()
    tried: list[LocalGenerator] = []
    while queue and len(tried) < _MAX_TRIES:
        e = queue.pop(0)
        key = tuple(str(c) for c in e.coeffs())
        if key in seen:
            continue
        seen.add(key)
        F = K.charpoly(e)
        if F.lc != 1 or F.degree != K.degree or poly_gcd(F, F.derivative()).degree > 0:
            continue
        regular, facs, U = dedekind_criterion(F, p)
        gen = LocalGenerator(e, F, regular, tuple(facs))
        tried.append(gen)
        if regular:
            return gen, tuple(tried)
        omega = K.eval_intpoly(U, e) * flint.fmpq(1, p)
        for cand in (omega, e + omega, omega + 2 * e, omega - e, 2 * omega + e, K.mul(omega, e) + omega):
            queue.append(K.elem(cand))
    # small combinations of a p-maximal basis; none is regular exactly when
    # p is a common index divisor of the field
    basis = p_maximal_elements(F0, p)
    for coeffs in itertools.product(range(-1, 3), repeat=len(basis)):
        if len(tried) >= _MAX_TRIES + 256:
            break
        e = K.elem(sum((c * b for c, b in zip(coeffs, basis)), flint.fmpq_poly([])))
        F = K.charpoly(e)
        if F.lc != 1 or F.degree != K.degree or poly_gcd(F, F.derivative()).degree > 0:
            continue
        regular, facs, _ = dedekind_criterion(F, p)
        gen = LocalGenerator(e, F, regular, tuple(facs))
        tried.append(gen)
        if regular:
            return gen, tuple(tried)
    return None, tuple(tried)


def local_generator(F0: IntPoly, p: int):
    """(regular generator or None, all generators tried) for monic F0 at p."""
    return _local_search(F0.coeffs, p)


# ---------------------------------------------------------------------------
# Hensel lifting


def _hensel_two(F: IntPoly, g: IntPoly, h: IntPoly, p: int, N: int) -> tuple[IntPoly, IntPoly]:
    """Lift F = g h mod p (g, h monic and coprime mod p) to mod p^N."""
    gb, hb = _to_nmod(g, p), _to_nmod(h, p)
    d, s, t = gb.xgcd(hb)
    assert d.degree() == 0
    inv = pow(int(d.coeffs()[0]), -1, p)
    s, t = s * inv, t * inv  # s g + t h = 1 mod p
    pk = p
    for _ in range(1, N):
        err = F - g * h
        assert all(c % pk == 0 for c in err.coeffs)
        e = _to_nmod(IntPoly(c // pk for c in err.coeffs), p)
        a = divmod(e * t, gb)[1]
        b, r = divmod(e - a * hb, gb)
        assert r.is_zero()
        g = g + _lift(a).scale(pk)
        h = h + _lift(b).scale(pk)
        pk *= p
    return g, h


def hensel_factors(F: IntPoly, facs, p: int, N: int) -> list[IntPoly]:
    """Monic local factors h_i = g_i^e_i (mod p), lifted to mod p^N."""
    blocks = [_lift(_to_nmod(g, p) ** e) for g, e in facs]
    out = []
    rest = F
    for i, blk in enumerate(blocks[:-1]):
        others = IntPoly((1,))
        for b in blocks[i + 1 :]:
            others = others * b
        others_red = _lift(_to_nmod(others, p))
        hi, rest = _hensel_two(rest, blk, others_red, p, N)
        out.append(hi)
    out.append(rest)
    return out


def _vp_mod(n: int, p: int, N: int) -> int:
    n %= p**N
    if n == 0:
        raise ArithmeticError("Hensel precision too low")
    return vp(n, p)


def place_valuations(F: IntPoly, facs, p: int, elements: list[flint.fmpq_poly]) -> list[list[Fraction]]:
    """v_P(x) for every place P above p and every x in ``elements``.

    F must be a monic p-regular minimal polynomial with factorization facs
    mod p; elements are given as polynomials in a root of F.
    """
    d = F.degree
    parts = []
    N = 2
    for x in elements:
        num = IntPoly(int(c) for c in x.numer().coeffs())
        den = int(x.denom())
        if num.is_zero():
            raise ValueError("valuation of zero")
        r = resultant(F, num) if num.degree > 0 else num.lc**d
        N += vp(r, p)
        parts.append((num, den))
    hs = hensel_factors(F, facs, p, N)
    out = []
    for h in hs:
        row = []
        for num, den in parts:
            r = resultant(h, num) if num.degree > 0 else num.lc**h.degree
            row.append(Fraction(_vp_mod(r, p, N), h.degree) - vp(den, p))
        out.append(row)
    return out


# ---------------------------------------------------------------------------
# conductor


def _integral_model(theta: AlgebraicNumber):
    """(F0 monic, c) with theta0 = c * theta integral of minpoly F0."""
    f = theta.minpoly
    d, c = f.degree, f.lc
    F0 = IntPoly(a * c ** (d - 1 - i) if i < d else 1 for i, a in enumerate(f.coeffs))
    return F0, c


def _prime_divisors(n: int) -> list[int]:
    n = abs(n)
    if n <= 1:
        return []
    return [int(p) for p, _ in flint.fmpz(n).factor()]


def _rational_conductor(q: Fraction) -> ConductorResult:
    a, c = q.numerator, q.denominator
    primes = sorted(set(_prime_divisors(a * c * (c - a))))
    return ConductorResult({p: (Fraction(1), Fraction(1)) for p in primes}, primes, [], 1)


def conductor_in_field(theta: AlgebraicNumber, beta: flint.fmpq_poly) -> ConductorResult:
    """Conductor of [1:beta] for beta in K = Q(theta), with places of K.

    beta is a polynomial in theta; beta must not be 0 or 1.
    """
    K = NumberField(theta.minpoly)
    beta = K.elem(beta)
    if K.is_rational(beta):
        q = K.rational_value(beta)
        if q in (0, 1):
            raise SupportError("point lies on {0, 1, infinity}")
        if K.degree == 1:
            return _rational_conductor(q)
    d = K.degree
    F0, c = _integral_model(theta)
    K0 = NumberField(F0)
    # beta(theta) = beta(theta0 / c)
    B = K0.eval_fmpq(beta, K0.gen() * flint.fmpq(1, c))
    one_minus = K0.one() - B
    if B.is_zero() or one_minus.is_zero():
        raise SupportError("point lies on {0, 1, infinity}")
    cb = K0.charpoly(B)
    cb1 = K0.charpoly(one_minus)
    cands = set(_prime_divisors(cb.lc)) | set(_prime_divisors(cb.coeffs[0])) | set(_prime_divisors(cb1.coeffs[0]))
    terms: dict[int, tuple[Fraction, Fraction]] = {}
    regular, irregular = [], []
    for p in sorted(cands):
        meeting = sum(n for s, n in newton_polygon_slopes(cb, p) if s != 0)
        meeting += sum(n for s, n in newton_polygon_slopes(cb1, p) if s > 0)
        if meeting == 0:
            continue
        gen, _ = local_generator(F0, p)
        if gen is None:
            irregular.append(p)
            terms[p] = (Fraction(1, d), Fraction(meeting, d))
            continue
        Kg = NumberField(gen.minpoly)
        t0 = K0.express_in(gen.element, K0.gen())
        Bg = Kg.eval_fmpq(B, t0)
        vals = place_valuations(gen.minpoly, gen.factors, p, [Bg, Kg.one() - Bg])
        f_sum = 0
        for (g, _e), (vb, v1) in zip(gen.factors, vals):
            if vb != 0 or v1 > 0:
                f_sum += g.degree
        regular.append(p)
        if f_sum:
            terms[p] = (Fraction(f_sum, d), Fraction(f_sum, d))
    return ConductorResult(terms, regular, irregular, d)


def conductor(P: ProjPoint) -> ConductorResult:
    """cond_{[0]+[1]+[inf]}(P) over the finite places of Q(P)."""
    if P.is_special():
        raise SupportError("conductor is undefined on the support {0, 1, infinity}")
    a = P.alpha
    if a.is_rational():
        return _rational_conductor(a.rational_value())
    K = NumberField(a.minpoly)
    return conductor_in_field(a, K.gen())


def conductor_pullback(Q_field, value) -> ConductorResult:
    """Conductor of ``value`` counted over the places of Q(x0, y0)."""
    x0, y0 = Q_field
    pe = primitive_element(x0, y0)
    if isinstance(value, flint.fmpq_poly):
        return conductor_in_field(pe.gamma, value)
    if value.is_rational():
        q = value.rational_value()
        if q in (0, 1):
            raise SupportError("value lies on {0, 1, infinity}")
        return conductor_in_field(pe.gamma, pe.field.elem(q))
    pe2 = primitive_element(pe.gamma, value)
    if pe2.field.degree != pe.field.degree:
        raise MembershipError("value does not lie in Q(x0, y0)")
    return conductor_in_field(pe2.gamma, pe2.expr_b)


# ---------------------------------------------------------------------------
# root discriminant


def log_root_disc_field(theta: AlgebraicNumber) -> RootDiscResult:
    """d_K for K = Q(theta)."""
    d = theta.degree
    if d == 1:
        return RootDiscResult({}, 1)
    F0, _ = _integral_model(theta)
    D0 = discriminant(F0)
    vals: dict[int, tuple[int, int]] = {}
    irregular = []
    for p in _prime_divisors(D0):
        gen, tried = local_generator(F0, p)
        if gen is not None:
            v = vp(discriminant(gen.minpoly), p)
            vals[p] = (v, v)
            continue
        v = vp(D0, p) - 2 * p_index(F0.coeffs, p)
        vals[p] = (v, v)
    vals = {p: v for p, v in vals.items() if v[1] > 0}
    return RootDiscResult(vals, d, irregular)


def log_root_disc(P: ProjPoint) -> RootDiscResult:
    if P.is_infinity or P.alpha.is_rational():
        return RootDiscResult({}, 1)
    return log_root_disc_field(P.alpha)


# ---------------------------------------------------------------------------
# heights, Liouville, compact sets


def height_point(P: ProjPoint, precision=Fraction(1, 10**12)) -> flint.arb:
    if P.is_infinity:
        return flint.arb(0)
    return weil_height(P.alpha, precision)


@dataclass
class LiouvilleResult:
    lhs: flint.arb
    rhs: flint.arb
    holds: bool

    def to_json(self) -> dict:
        return {"lhs": _fmt(self.lhs), "rhs": _fmt(self.rhs), "holds": self.holds}


def liouville_gap(a: ProjPoint, b: ProjPoint, v: PlaceQ, precision=Fraction(1, 10**12)) -> LiouvilleResult:
    """-log delta_v(a, b) against deg a * deg b * (h(a) + h(b) + log 2)."""
    if a == b:
        raise ValueError("Liouville bound needs distinct points")
    bits = bits_for_width(precision)
    with working_precision(bits):
        delta = chordal_distance(a, b, v, precision)
        lo, _ = arb_bounds(delta)
        lhs = -delta.log() if lo > 0 else -flint.arb(arb_from_fraction(lo)).log()
        if lo <= 0:
            raise ArithmeticError("chordal distance not separated from 0")
        rhs = a.degree * b.degree * (height_point(a, precision) + height_point(b, precision) + flint.arb(2).log())
        exact = _liouville_rational(a, b, v)
        holds = exact if exact is not None else bool(lhs.upper() <= rhs.lower())
    return LiouvilleResult(lhs, rhs, holds)


def _rational_coords(P: ProjPoint) -> tuple[int, int] | None:
    """Coprime integers (x0, x1) with P = [x0:x1], or None if P is irrational."""
    if P.is_infinity:
        return 0, 1
    if not P.alpha.is_rational():
        return None
    q = P.alpha.rational_value()
    return q.denominator, q.numerator


def _liouville_rational(a: ProjPoint, b: ProjPoint, v: PlaceQ) -> bool | None:
    """Exact verdict for two rational points, where the bound can be attained.

    After exponentiating, the claim reads delta_v(a, b) * 2 H(a) H(b) >= 1
    with H the multiplicative height max(|x0|, |x1|) of coprime coordinates.
    """
    ca, cb = _rational_coords(a), _rational_coords(b)
    if ca is None or cb is None:
        return None
    (x0, x1), (y0, y1) = ca, cb
    cross = x0 * y1 - x1 * y0
    if v.is_infinite:
        delta = Fraction(abs(cross), max(abs(x0), abs(x1)) * max(abs(y0), abs(y1)))
    else:
        # coprime coordinates have max |.|_p = 1
        delta = Fraction(v.p) ** -vp_fraction(Fraction(cross), v.p)
    return delta * 2 * max(abs(x0), abs(x1)) * max(abs(y0), abs(y1)) >= 1


def _conj_abs_sq_rational(z: AlgebraicNumber) -> Fraction | None:
    """|z|^2 when it is rational, else None."""
    zbar = AlgebraicNumber(z.minpoly, (z.box[0], z.box[1], -z.box[3], -z.box[2]))
    n = alg_mul(z, zbar)
    return n.rational_value() if n.is_rational() else None


def _arch_ok(alpha: AlgebraicNumber, eta: Fraction) -> bool:
    if alpha.is_rational():
        x = alpha.rational_value()
        if x == 0 or x == 1:
            return False
        return min(abs(x), abs(1 - x), 1 / abs(x)) >= eta
    for z in _conjugates(alpha):
        w = alg_sub(AlgebraicNumber.rational(1), z)
        if not _abs_at_least(z, eta) or not _abs_at_least(w, eta):
            return False
        if not _abs_at_most(z, 1 / eta):
            return False
    return True


def _abs_cmp(z: AlgebraicNumber, r: Fraction) -> int:
    """sign(|z| - r), certified."""
    bits = 64
    ra = arb_from_fraction(r)
    while bits <= 1 << 12:
        with working_precision(bits):
            m = abs(z.ball(bits))
            if m > ra:
                return 1
            if m < ra:
                return -1
        bits *= 2
    sq = _conj_abs_sq_rational(z)
    if sq is not None:
        return (sq > r * r) - (sq < r * r)
    raise ArithmeticError("could not separate |z| from the threshold")


def _abs_at_least(z, r) -> bool:
    return _abs_cmp(z, r) >= 0


def _abs_at_most(z, r) -> bool:
    return _abs_cmp(z, r) <= 0


def _pow_ge(p: int, k: Fraction, eta: Fraction) -> bool:
    """p^(-k) >= eta, exactly."""
    a, b = k.numerator, k.denominator
    return Fraction(p) ** (-a) >= eta**b


def _padic_ok(alpha: AlgebraicNumber, p: int, eta: Fraction) -> bool:
    if alpha.is_rational():
        from .algebraic import vp_fraction

        x = alpha.rational_value()
        v = vp_fraction(x, p)
        if v != 0:
            return _pow_ge(p, Fraction(abs(v)), eta)
        return _pow_ge(p, Fraction(vp_fraction(1 - x, p)), eta)
    for s, _ in newton_polygon_slopes(alpha.minpoly, p):
        if not _pow_ge(p, abs(s), eta):
            return False
    one_minus = alg_sub(AlgebraicNumber.rational(1), alpha)
    for s, _ in newton_polygon_slopes(one_minus.minpoly, p):
        if s > 0 and not _pow_ge(p, s, eta):
            return False
    return True


def in_compact_set(P: ProjPoint, places, eta) -> bool:
    """Whether every conjugate of P clears the eta threshold at every v in places."""
    eta = Fraction(eta)
    if not (0 < eta <= 1):
        raise ValueError("eta must lie in (0, 1]")
    if P.is_special():
        return False
    for v in places:
        ok = _arch_ok(P.alpha, eta) if v.is_infinite else _padic_ok(P.alpha, v.p, eta)
        if not ok:
            return False
    return True


__all__ = [
    "ConductorResult",
    "RootDiscResult",
    "LiouvilleResult",
    "SupportError",
    "MembershipError",
    "conductor",
    "conductor_in_field",
    "conductor_pullback",
    "log_root_disc",
    "log_root_disc_field",
    "height_point",
    "liouville_gap",
    "in_compact_set",
    "dedekind_criterion",
    "local_generator",
    "hensel_factors",
    "place_valuations",
    "INF",
]
