"""Non-critical Belyi maps on C_n and on P^1.

Two routes produce a map f : C_n -> P^1 with critical values in {0, 1, inf}
and f(pi^{-1}(S)) outside {0, 1, inf}:

* ``general``: f = g o F with F = (ax - y)^(-3 - n|S'|) x y prod (pi - alpha)
  and g a Belyi map on P^1 (degree lowering, lambda-maps, tracked image of
  0).  Exact, but the degrees explode quickly; a degree ceiling turns that
  into a typed ``ResourceLimitExceeded`` carrying the partial trace.
* ``genus-0``: only for n = 2, where t = x/(1+y) identifies C_2 with P^1.
  Here f = lambda o nu o t with lambda(z) = 4z(1-z) and nu a rational
  Moebius map chosen so that nu(t(pi^{-1}(S))) misses {0, 1, 1/2, inf}.

Either way the certificate is checked from scratch: critical values come
from ``ff_critical_locus`` of the composite, not from the construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import flint

from .algebraic import AlgebraicNumber, ProjPoint, roots_of, weil_height
from .fermat import FFElement, ff_complexity, ff_inverse, ff_mul, ff_add, ff_pow, format_ff
from .fermat_local import (
    CurvePoint,
    LocalPoint,
    _ctx,
    _theta,
    ff_critical_locus,
    ff_map_degree,
    fraction_as_mpoly,
    infinity_orbits,
    local_behaviour,
    points_on,
)
from .intervals import fmt_interval, frac_str
from .numfield import NumberField
from .polys import IntPoly, factor_over_int, format_poly, poly_gcd, resultant


class ResourceLimitExceeded(RuntimeError):
    """A construction outgrew its configured ceiling."""

    def __init__(self, message: str, trace: list, partial=None):
        super().__init__(message)
        self.trace = trace
        self.partial = partial


# ---------------------------------------------------------------------------
# Galois orbits in P^1: an irreducible primitive minpoly, or None for infinity

Orbit = "IntPoly | None"
ZERO_ORBIT = IntPoly((0, 1))
ONE_ORBIT = IntPoly((-1, 1))


def orbit_of(P: ProjPoint):
    return None if P.is_infinity else P.alpha.minpoly


def orbit_is_special(o) -> bool:
    return o is None or o == ZERO_ORBIT or o == ONE_ORBIT


def orbit_rational(o):
    """Fraction for a rational finite orbit, None for infinity."""
    if o is None:
        return None
    return Fraction(-o.coeffs[0], o.coeffs[1])


def rational_orbit(q):
    if q is None:
        return None
    q = Fraction(q)
    return IntPoly((-q.numerator, q.denominator))


def orbit_str(o) -> str:
    if o is None:
        return "inf"
    if o.degree == 1:
        return frac_str(orbit_rational(o))
    return f"roots of {format_poly(o)}"


def orbit_points(o) -> list[ProjPoint]:
    if o is None:
        return [ProjPoint.infinity()]
    return [ProjPoint.affine(a) for a in roots_of(o)]


# ---------------------------------------------------------------------------
# rational maps of P^1


@dataclass(frozen=True)
class RationalMapP1:
    num: IntPoly
    den: IntPoly

    @staticmethod
    def make(num: IntPoly, den: IntPoly) -> "RationalMapP1":
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        g = poly_gcd(num, den)
        if g.degree > 0:
            num, den = _exact(num, g), _exact(den, g)
        c = math.gcd(num.content(), den.content())
        if c > 1:
            num, den = IntPoly(a // c for a in num.coeffs), IntPoly(a // c for a in den.coeffs)
        if den.lc < 0:
            num, den = -num, -den
        if num.degree < 1 and den.degree < 1:
            raise ValueError("constant map")
        return RationalMapP1(num, den)

    @staticmethod
    def identity() -> "RationalMapP1":
        return RationalMapP1(IntPoly((0, 1)), IntPoly((1,)))

    @staticmethod
    def moebius(a, b, c, d) -> "RationalMapP1":
        """z -> (a z + b) / (c z + d) with integer entries."""
        if a * d - b * c == 0:
            raise ValueError("degenerate Moebius map")
        return RationalMapP1.make(IntPoly((b, a)), IntPoly((d, c)))

    @staticmethod
    def lam(m: int, l: int) -> "RationalMapP1":
        """The lambda-map z -> ((m+l)^(m+l) / (m^m l^l)) z^m (1-z)^l."""
        num = IntPoly((0, 1)) ** m * IntPoly((1, -1)) ** l * (m + l) ** (m + l)
        return RationalMapP1.make(num, IntPoly((m**m * l**l,)))

    @property
    def degree(self) -> int:
        return max(self.num.degree, self.den.degree)

    def compose(self, inner: "RationalMapP1") -> "RationalMapP1":
        """self o inner."""
        d = self.degree
        p, q = inner.num, inner.den
        qp = [IntPoly((1,))]
        pp = [IntPoly((1,))]
        for _ in range(d):
            qp.append(qp[-1] * q)
            pp.append(pp[-1] * p)

        def hom(f: IntPoly) -> IntPoly:
            acc = IntPoly()
            for i, c in enumerate(f.coeffs):
                if c:
                    acc = acc + pp[i] * qp[d - i] * c
            return acc

        return RationalMapP1.make(hom(self.num), hom(self.den))

    def __call__(self, z):
        """Evaluate at a rational z (None = infinity)."""
        if z is None:
            dn, dd = self.num.degree, self.den.degree
            if dn > dd:
                return None
            if dn < dd:
                return Fraction(0)
            return Fraction(self.num.lc, self.den.lc)
        z = Fraction(z)
        d = self.den.eval_fraction(z)
        if d == 0:
            return None
        return self.num.eval_fraction(z) / d

    def image_orbit(self, o):
        if o is None or o.degree == 1:
            return rational_orbit(self(orbit_rational(o)))
        K = NumberField(o)
        t = K.gen()
        d = K.eval_intpoly(self.den, t)
        if d.is_zero():
            return None
        v = K.div(K.eval_intpoly(self.num, t), d)
        if K.is_rational(v):
            return rational_orbit(K.rational_value(v))
        return K.minpoly(v)

    def wronskian(self) -> IntPoly:
        return self.num.derivative() * self.den - self.num * self.den.derivative()

    def critical_orbits(self, work_ceiling: int | None = None) -> list[tuple[object, int, object]]:
        """[(critical-point orbit, ramification index, value orbit)].

        With a work ceiling, an orbit whose degree times deg(self) exceeds it
        raises ResourceLimitExceeded instead of evaluating in a huge field.
        """
        W = self.wronskian()
        out = []
        for rho, mult in factor_over_int(W):
            if rho.degree == 0:
                continue
            if work_ceiling is not None and rho.degree * self.degree > work_ceiling:
                raise ResourceLimitExceeded(
                    f"critical orbit of degree {rho.degree} on a map of degree {self.degree} exceeds work ceiling {work_ceiling}",
                    [],
                )
            out.append((rho, mult + 1, self.image_orbit(rho)))
        e_inf = 2 * self.degree - 1 - W.degree
        if e_inf >= 2:
            out.append((None, e_inf, self.image_orbit(None)))
        return out

    def critical_values(self, work_ceiling: int | None = None) -> list:
        vals = []
        for _, _, v in self.critical_orbits(work_ceiling):
            if v not in vals:
                vals.append(v)
        return vals

    def __str__(self) -> str:
        return f"({format_poly(self.num, 'z')})/({format_poly(self.den, 'z')})"

    def to_json(self) -> dict:
        return {"num": format_poly(self.num, "z"), "den": format_poly(self.den, "z"), "degree": self.degree}


def _exact(f: IntPoly, g: IntPoly) -> IntPoly:
    return f.exact_div(g.primitive()) if g.content() != 1 else f.exact_div(g)


_S3 = [
    RationalMapP1.moebius(1, 0, 0, 1),  # z
    RationalMapP1.moebius(-1, 1, 0, 1),  # 1 - z
    RationalMapP1.moebius(0, 1, 1, 0),  # 1/z
    RationalMapP1.moebius(0, 1, -1, 1),  # 1/(1 - z)
    RationalMapP1.moebius(1, 0, 1, -1),  # z/(z - 1)
    RationalMapP1.moebius(1, -1, 1, 0),  # (z - 1)/z
]

# Moebius precompositions tried to keep the image of 0 off {0, 1, inf}
_PRECOMPOSITIONS = [
    (1, 2, 0, 1),
    (1, -2, 0, 1),
    (0, 2, 1, 1),
    (1, 2, 1, 1),
    (1, 3, 0, 1),
    (0, -2, 1, 1),
    (2, 3, 1, 1),
    (1, -3, 0, 1),
    (0, 3, 1, 2),
    (3, 2, 1, 1),
]


@dataclass
class BelyiP1Result:
    g: RationalMapP1
    precomposition: RationalMapP1
    trace: list[dict]
    image_of_zero: Fraction | None
    progress: list[tuple[int, int]]

    def to_json(self) -> dict:
        return {
            "g": self.g.to_json(),
            "precomposition": str(self.precomposition),
            "image_of_zero": None if self.image_of_zero is None else frac_str(self.image_of_zero),
            "trace": self.trace,
            "stage1_progress": [list(p) for p in self.progress],
        }


class _Collision(Exception):
    pass


def _run_belyi(T: list, mu: RationalMapP1, ceiling: int, trace: list):
    g = mu
    z_star = mu(Fraction(0))
    progress = []
    # stage 1: degree lowering
    while True:
        V = []
        try:
            crit = g.critical_values(4 * ceiling)
        except ResourceLimitExceeded as exc:
            raise ResourceLimitExceeded(str(exc), trace, g) from None
        for o in [g.image_orbit(o) for o in T] + crit:
            if o not in V:
                V.append(o)
        irr = [o for o in V if o is not None and o.degree > 1]
        if not irr:
            break
        top = max(o.degree for o in irr)
        measure = (top, sum(1 for o in irr if o.degree == top))
        if progress and not measure < progress[-1]:
            raise AssertionError("stage-1 progress measure failed to decrease")
        progress.append(measure)
        h = min((o for o in irr if o.degree == top), key=lambda o: o.sort_key())
        step = RationalMapP1.make(h, IntPoly((1,)))
        g = step.compose(g)
        z_star = step(z_star)
        trace.append({"stage": 1, "postcompose": str(step), "degree": g.degree})
        if g.degree > ceiling:
            raise ResourceLimitExceeded(f"degree {g.degree} exceeds ceiling {ceiling} in stage 1", trace, g)
    # stage 2: fold rational points into {0, 1, inf}
    B = [orbit_rational(o) for o in V]
    if orbit_is_special(rational_orbit(z_star)) or z_star in B:
        raise _Collision()
    while True:
        pending = [b for b in B if not orbit_is_special(rational_orbit(b))]
        if not pending:
            break
        best = None
        over = None
        for r in pending:
            for sigma in _S3:
                s = sigma(r)
                if s is None or not (0 < s < 1):
                    continue
                m, l = s.numerator, s.denominator - s.numerator
                if g.degree * (m + l) > ceiling:
                    # never build a lambda-map that cannot be used
                    over = (r, m, l) if over is None or m + l < over[1] + over[2] else over
                    continue
                phi = RationalMapP1.lam(m, l).compose(sigma)
                if orbit_is_special(rational_orbit(phi(z_star))):
                    continue
                if best is None or m + l < best[0]:
                    best = (m + l, phi, r, m, l)
        if best is None:
            if over is not None:
                r, m, l = over
                trace.append({"stage": 2, "fold": frac_str(r), "lambda": [m, l], "degree": g.degree * (m + l)})
                raise ResourceLimitExceeded(
                    f"degree {g.degree * (m + l)} exceeds ceiling {ceiling} in stage 2", trace, g
                )
            raise _Collision()
        _, phi, r, m, l = best
        g = phi.compose(g)
        B = list(dict.fromkeys(phi(b) for b in B))
        z_star = phi(z_star)
        trace.append({"stage": 2, "fold": frac_str(r), "lambda": [m, l], "degree": g.degree})
    if orbit_is_special(rational_orbit(z_star)):
        raise _Collision()
    return g, z_star, progress


def belyi_p1(T: Iterable, degree_ceiling: int = 2000) -> BelyiP1Result:
    """g : P^1 -> P^1 over Q with g(T) in {0,1,inf}, g(0) outside, and
    critical values in {0,1,inf}.  T holds ProjPoints or orbits."""
    orbits = []
    for t in T:
        o = orbit_of(t) if isinstance(t, ProjPoint) else t
        if o is not None and o.coeffs == (0, 1):
            raise ValueError("T must not contain 0")
        if o not in orbits:
            orbits.append(o)
    attempts = []
    for a, b, c, d in _PRECOMPOSITIONS:
        mu = RationalMapP1.moebius(a, b, c, d)
        trace: list[dict] = [{"stage": 3, "precompose": str(mu)}]
        try:
            g, z_star, progress = _run_belyi(orbits, mu, degree_ceiling, trace)
        except _Collision:
            attempts.append(str(mu))
            continue
        trace.append({"stage": 3, "image_of_zero": frac_str(z_star) if z_star is not None else "inf"})
        return BelyiP1Result(g, mu, trace, z_star, progress)
    raise ResourceLimitExceeded("no precomposition kept g(0) off {0, 1, inf}", [{"tried": attempts}])


# ---------------------------------------------------------------------------
# the map F of the general route


def galois_closure(S: Sequence[ProjPoint]) -> list:
    """Orbits of S together with {0, 1, inf}."""
    out = [ZERO_ORBIT, ONE_ORBIT, None]
    for P in S:
        o = orbit_of(P)
        if o not in out:
            out.append(o)
    return out


def choose_shift_a(n: int, S_prime: Sequence) -> int:
    """Least a >= 2 with y/x != a at every point of pi^{-1}(S').

    Entries may be CurvePoints (checked directly) or points/orbits of S'
    (y/x = a above alpha exactly when alpha = 1/(1 + a^n)).
    """
    limit = 2 + n * n * max(1, len(S_prime))
    for a in range(2, limit + 2):
        ok = True
        for s in S_prime:
            if isinstance(s, CurvePoint):
                if s.at_infinity:
                    continue
                lp = s.local()
                K = lp.K
                if not lp.x0.is_zero() and K.div(lp.y0, lp.x0) == K.elem(a):
                    ok = False
            else:
                o = orbit_of(s) if isinstance(s, ProjPoint) else s
                if o is not None and o.degree == 1 and orbit_rational(o) == Fraction(1, 1 + a**n):
                    ok = False
            if not ok:
                break
        if ok:
            return a
    raise AssertionError("pigeonhole bound violated")


def fibre_polynomial(n: int, orbits: Sequence):
    """x * y * prod rho(x^n) over finite orbits of S' (an mpoly in x, y)."""
    ctx = _ctx(("x", "y"))
    x, y = ctx.gens()
    P = x * y
    for o in orbits:
        if orbit_is_special(o):
            continue
        acc = ctx.from_dict({})
        for i, c in enumerate(o.coeffs):
            if c:
                acc = acc + c * x ** (n * i)
        P = P * acc
    return P


def fibre_points(n: int, orbits: Sequence) -> list[LocalPoint]:
    """Representatives of the Galois orbits of pi^{-1}(S)."""
    pts, _ = points_on(n, fibre_polynomial(n, orbits))
    out = [LocalPoint(n, K, _theta(rho), x0, y0) for rho, K, x0, y0 in pts]
    for rho, K in infinity_orbits(n):
        out.append(LocalPoint(n, K, _theta(rho), None, None, K.gen()))
    return out


@dataclass
class FragmentF:
    F: FFElement
    a: int
    exponent: int
    S_orbits: list
    fibre_ok: bool
    unramified_over_zero: bool
    T: list  # critical value orbits of F

    def to_json(self) -> dict:
        return {
            "F": format_ff(self.F),
            "a": self.a,
            "exponent": self.exponent,
            "S": [orbit_str(o) for o in self.S_orbits],
            "fibre_maps_to_zero": self.fibre_ok,
            "unramified_over_zero": self.unramified_over_zero,
            "critical_values": [orbit_str(o) for o in self.T],
        }


def build_F(n: int, S: Sequence[ProjPoint], verify: bool = True) -> FragmentF:
    orbits = galois_closure(S)
    s_prime = [o for o in orbits if not orbit_is_special(o)]
    size = sum(o.degree for o in s_prime)
    a = choose_shift_a(n, s_prime)
    X, Y = FFElement.x(n), FFElement.y(n)
    pi = ff_pow(X, n)
    prod = FFElement.one(n)
    for o in s_prime:
        acc = FFElement.zero(n)
        for c in reversed(o.coeffs):
            acc = ff_add(ff_mul(acc, pi), FFElement.const(n, c))
        prod = ff_mul(prod, acc)
    exponent = -3 - n * size
    shift = ff_add(ff_mul(FFElement.const(n, a), X), -Y)
    F = ff_mul(ff_mul(ff_mul(X, Y), prod), ff_pow(ff_inverse(shift), -exponent))
    fibre_ok = unram = True
    T: list = []
    if verify:
        for lp in fibre_points(n, orbits):
            value, e = local_behaviour(F, lp)
            if value is None or not value.is_zero():
                fibre_ok = False
            if e != 1:
                unram = False
        locus = ff_critical_locus(F)
        for orb in locus.orbits:
            o = orbit_of(orb.value)
            if o not in T:
                T.append(o)
        if ZERO_ORBIT in T:
            unram = False
    return FragmentF(F, a, exponent, orbits, fibre_ok, unram, T)


# ---------------------------------------------------------------------------
# composition and certificates


def compose_ff(g: RationalMapP1, F: FFElement) -> FFElement:
    n = F.n

    def ev(p: IntPoly) -> FFElement:
        acc = FFElement.zero(n)
        for c in reversed(p.coeffs):
            acc = ff_add(ff_mul(acc, F), FFElement.const(n, c))
        return acc

    return ff_mul(ev(g.num), ff_inverse(ev(g.den)))


def t_coordinate(n: int = 2) -> FFElement:
    """t = x / (1 + y) on C_2, an isomorphism onto P^1."""
    if n != 2:
        raise ValueError("t is an isomorphism only on C_2")
    X, Y = FFElement.x(2), FFElement.y(2)
    return ff_mul(X, ff_inverse(ff_add(FFElement.one(2), Y)))


LAMBDA_2 = RationalMapP1.lam(1, 1)  # 4 z (1 - z)
_LAMBDA_FIBRE = [Fraction(0), Fraction(1), Fraction(1, 2), None]


def _k_bound(n: int, s: int) -> int:
    """Search radius that pigeonhole guarantees for the genus-0 Moebius map."""
    lines = 4 * (3 * n + n * n * s) + 1
    return (lines + 1) // 2


def belyi_bound(n: int, d: int, H, s: int) -> float:
    """Implementation-specific worst-case B(n, d, H) for the genus-0 route.

    s = number of points of S' (counted with conjugates).  With |k|, |j| <= K
    the points pi(Q), Q in f^{-1}{0,1,inf}, are pi = 4u^2v^2/(u^2+v^2)^2 with
    |u|, |v| <= 3K, so their heights are at most 4 log(3K) + log 4; the
    presentation of f has degree <= 4 and coefficients <= 64 (3K + 1)^4.
    """
    K = _k_bound(n, s)
    return max(4.0, 4 * math.log(3 * K) + math.log(4), math.log(64 * (3 * K + 1) ** 4))


@dataclass
class BelyiCertificate:
    n: int
    f: FFElement
    degree: int
    route: str
    chain: list[str]
    S_orbits: list
    g: RationalMapP1
    F: FFElement
    critical_values: list[ProjPoint] = field(default_factory=list)
    clause_flags: dict = field(default_factory=dict)
    bound_B: float = 0.0
    achieved: dict = field(default_factory=dict)
    branch_points_heights: list = field(default_factory=list)
    branch_image: list = field(default_factory=list)  # orbits of pi(f^{-1}{0,1,inf})
    fibre_values: list = field(default_factory=list)
    g_of_zero: object = None

    @property
    def valid(self) -> bool:
        return bool(self.clause_flags) and all(self.clause_flags.values()) and all(
            P.is_special() for P in self.critical_values
        )

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "route": self.route,
            "map": format_ff(self.f),
            "degree": self.degree,
            "chain": self.chain,
            "S": [orbit_str(o) for o in self.S_orbits],
            "g": self.g.to_json(),
            "g_of_zero": None if self.g_of_zero is None else frac_str(self.g_of_zero),
            "critical_values": [str(P) for P in self.critical_values],
            "clause_flags": self.clause_flags,
            "bound_B": self.bound_B,
            "achieved": self.achieved,
            "branch_image": [orbit_str(o) for o in self.branch_image],
            "branch_points_heights": [fmt_interval(h, 12) for h in self.branch_points_heights],
            "fibre_values": [orbit_str(o) for o in self.fibre_values],
            "valid": self.valid,
        }


def _genus0_nu(n: int, orbits) -> tuple[RationalMapP1, int, int]:
    """nu(z) = (2z + k)/(z + j) with nu(t(pi^{-1}S)) off {0, 1, 1/2, inf}."""
    bad = set()
    for lp in fibre_points(n, orbits):
        K = lp.K
        t = _t_value(lp)
        if t is None:
            bad.add(None)
        elif K.is_rational(t):
            bad.add(K.rational_value(t))
    s = sum(o.degree for o in orbits if not orbit_is_special(o))
    K_max = _k_bound(n, s)
    for radius in range(0, K_max + 1):
        for k in range(-radius, radius + 1):
            for j in range(-radius, radius + 1):
                if max(abs(k), abs(j)) != radius or 2 * j - k == 0:
                    continue
                nu = RationalMapP1.moebius(2, k, 1, j)
                if all(LAMBDA_2(nu(b)) not in (0, 1, None) for b in bad):
                    return nu, k, j
    raise AssertionError("pigeonhole bound violated")


def _t_value(lp: LocalPoint):
    """t = x/(1+y) at a point of C_2 (None for t = inf)."""
    K = lp.K
    if lp.at_infinity:
        # x/(1+y) -> 1/r0 as s -> 0
        return K.inv(lp.r0)
    den = K.one() + lp.y0
    if den.is_zero():
        return None
    return K.div(lp.x0, den)


def noncritical_belyi(
    n: int,
    S: Sequence[ProjPoint],
    d: int | None = None,
    H=None,
    route: str = "auto",
    degree_ceiling: int = 2000,
    verify: bool = True,
) -> BelyiCertificate:
    """A certified map f: C_n -> P^1 satisfying the four clauses."""
    orbits = galois_closure(S)
    if d is not None and any(o is not None and o.degree > d for o in orbits):
        raise ValueError("S has points of degree above d")
    if route == "auto":
        route = "genus-0" if n == 2 else "general"
    if route == "genus-0":
        if n != 2:
            raise ValueError("the genus-0 route needs n = 2")
        t = t_coordinate(2)
        nu, k, j = _genus0_nu(n, orbits)
        g = LAMBDA_2.compose(nu)
        F = t
        f = compose_ff(g, F)
        chain = ["t = x/(1+y)", f"nu = {nu}", f"lambda = {LAMBDA_2}"]
        s = sum(o.degree for o in orbits if not orbit_is_special(o))
        bound = belyi_bound(n, d or 1, H or 0, s)
        g0 = g(Fraction(0))
    else:
        frag = build_F(n, S)
        trace = [{"stage": "F", "degree_F": ff_map_degree(frag.F), "T": [orbit_str(o) for o in frag.T]}]
        try:
            res = belyi_p1(frag.T, degree_ceiling=degree_ceiling)
        except ResourceLimitExceeded as exc:
            raise ResourceLimitExceeded(str(exc), trace + exc.trace, frag) from None
        g = res.g
        F = frag.F
        f = compose_ff(g, F)
        chain = [f"F = {format_ff(F)}"] + [str(step) for step in res.trace]
        bound = float("inf")
        g0 = res.image_of_zero
    cert = BelyiCertificate(n, f, 0, route, chain, orbits, g, F, g_of_zero=g0, bound_B=bound)
    if verify:
        verify_certificate(cert)
    return cert


def branch_image(f: FFElement) -> tuple[list, list]:
    """Orbits of pi(Q) for Q in f^{-1}{0,1,inf}, plus their local points."""
    n = f.n
    A, B = fraction_as_mpoly(f)
    pts, _ = points_on(n, A * B * (A - B))
    locs = [LocalPoint(n, K, _theta(rho), x0, y0) for rho, K, x0, y0 in pts]
    locs += [LocalPoint(n, K, _theta(rho), None, None, K.gen()) for rho, K in infinity_orbits(n)]
    out, used = [], []
    for lp in locs:
        value, _ = local_behaviour(f, lp)
        if value is not None and not (value.is_zero() or (value - lp.K.one()).is_zero()):
            continue
        if lp.at_infinity:
            o = None
        else:
            v = lp.K.pow(lp.x0, n)
            o = rational_orbit(lp.K.rational_value(v)) if lp.K.is_rational(v) else lp.K.minpoly(v)
        used.append(lp)
        if o not in out:
            out.append(o)
    return out, used


def verify_certificate(cert: BelyiCertificate) -> BelyiCertificate:
    """Recompute every clause of the certificate from the map alone."""
    f, n = cert.f, cert.n
    locus = ff_critical_locus(f)
    cert.critical_values = locus.critical_values()
    cert.degree = ff_map_degree(f)
    unram = locus.complete and all(P.is_special() for P in cert.critical_values)
    fibre_vals = []
    for lp in fibre_points(n, cert.S_orbits):
        value, _ = local_behaviour(f, lp)
        if value is None:
            o = None
        elif lp.K.is_rational(value):
            o = rational_orbit(lp.K.rational_value(value))
        else:
            o = lp.K.minpoly(value)
        if o not in fibre_vals:
            fibre_vals.append(o)
    cert.fibre_values = fibre_vals
    image_ok = any(not orbit_is_special(o) for o in fibre_vals)
    g0 = cert.g(Fraction(0))
    noncrit = not orbit_is_special(rational_orbit(g0))
    cert.g_of_zero = g0
    cx = ff_complexity(f)
    branch, _ = branch_image(f)
    cert.branch_image = branch
    heights = []
    for o in branch:
        if o is None:
            heights.append(flint.arb(0))
        else:
            heights.append(weil_height(orbit_points(o)[0].alpha))
    cert.branch_points_heights = heights
    max_h = max((float(h.upper()) for h in heights), default=0.0)
    cert.achieved = {
        "degree": cert.degree,
        "presentation_degree": int(cx.max_degree),
        "presentation_log_height": cx.log_height,
        "max_branch_height": max_h,
    }
    B = cert.bound_B
    bounds = cert.degree <= B and int(cx.max_degree) <= B and cx.log_height <= B and max_h <= B
    if cert.route == "genus-0":
        zero_in_F_image = local_behaviour(cert.F, CurvePoint(2, AlgebraicNumber.rational(0), AlgebraicNumber.rational(1)).local())[0]
        noncrit = noncrit and zero_in_F_image is not None and zero_in_F_image.is_zero()
    cert.clause_flags = {
        "unramified_outside_fibre": bool(unram),
        "image_condition": bool(image_ok),
        "non_criticality": bool(noncrit),
        "bounds": bool(bounds),
    }
    return cert


# ---------------------------------------------------------------------------
# families


@dataclass
class BelyiFamily:
    n: int
    maps: list[FFElement]
    certificates: list[BelyiCertificate | None]
    branch_images: list[list]
    M: float
    disjoint: bool = False
    resultants: dict = field(default_factory=dict)
    requested: int = 0

    @property
    def count(self) -> int:
        return len(self.maps)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "requested": self.requested,
            "count": self.count,
            "maps": [format_ff(f) for f in self.maps],
            "branch_images": [[orbit_str(o) for o in b] for b in self.branch_images],
            "M": self.M,
            "pairwise_disjoint": self.disjoint,
            "resultants": {f"{i},{j}": str(r) for (i, j), r in self.resultants.items()},
            "certificates": [c.to_json() if c else None for c in self.certificates],
        }


def eliminant(orbits) -> tuple[IntPoly, bool]:
    """(product of finite orbit polynomials, contains infinity)."""
    E = IntPoly((1,))
    for o in orbits:
        if o is not None:
            E = E * o
    return E, any(o is None for o in orbits)


def families_disjoint(images: list[list]) -> tuple[bool, dict]:

    ok = True
    res = {}
    for i in range(len(images)):
        for j in range(i + 1, len(images)):
            Ei, inf_i = eliminant(images[i])
            Ej, inf_j = eliminant(images[j])
            r = resultant(Ei, Ej)
            res[(i + 1, j + 1)] = r
            if r == 0 or (inf_i and inf_j):
                ok = False
    return ok, res


def disjoint_family(n: int, m: int, d: int = 1, eps=None, Sigma=None, degree_ceiling: int = 2000) -> BelyiFamily:
    """f_1 = pi, f_2, ..., f_m with pairwise disjoint pi(f_i^{-1}{0,1,inf})."""
    if m < 1:
        raise ValueError("m must be positive")
    pi = ff_pow(FFElement.x(n), n)
    maps = [pi]
    certs: list = [None]
    images = [[ZERO_ORBIT, ONE_ORBIT, None]]
    M = float(n * n)
    fam = BelyiFamily(n, maps, certs, images, M, requested=m)
    for _ in range(1, m):
        S_orbits = []
        for img in images:
            for o in img:
                if o not in S_orbits:
                    S_orbits.append(o)
        S_points = [P for o in S_orbits for P in orbit_points(o)]
        try:
            cert = noncritical_belyi(n, S_points, route="auto", degree_ceiling=degree_ceiling)
        except ResourceLimitExceeded as exc:
            fam.disjoint, fam.resultants = families_disjoint(images)
            raise ResourceLimitExceeded(
                f"family stopped after {len(maps)} of {m} maps: {exc}", exc.trace, fam
            ) from None
        maps.append(cert.f)
        certs.append(cert)
        images.append(cert.branch_image)
        fam.M = max(fam.M, cert.bound_B)
    fam.disjoint, fam.resultants = families_disjoint(images)
    return fam
