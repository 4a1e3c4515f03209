"""Exact algebraic numbers with certified complex enclosures.

An ``AlgebraicNumber`` is an irreducible primitive minimal polynomial plus
a rational box in C isolating one of its roots.  Arithmetic goes through
resultants; the root of the result is selected by ball arithmetic on the
operands, refining until exactly one candidate root remains.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import flint

from .intervals import (
    arb_bounds,
    arb_from_fraction,
    bits_for_width,
    frac_str,
    working_precision,
)
from .numfield import NumberField
from .polys import (
    IntPoly,
    PolynomialError,
    factor_over_int,
    format_poly,
    is_prime,
    parse_poly,
)


class AlgebraicError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# places of Q


@dataclass(frozen=True, order=True)
class PlaceQ:
    """A place of Q: a prime p, or the archimedean place when p is None."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None and not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @property
    def is_infinite(self) -> bool:
        return self.p is None

    def __str__(self) -> str:
        return "inf" if self.p is None else str(self.p)

    @classmethod
    def parse(cls, s: str) -> "PlaceQ":
        s = s.strip().lower()
        if s in ("inf", "infinity", "oo", "∞"):
            return cls(None)
        return cls(int(s))

    def sort_key(self):
        return (self.p is None, self.p or 0)


INF = PlaceQ(None)


# ---------------------------------------------------------------------------
# root enclosures


@lru_cache(maxsize=4096)
def _root_balls(coeffs: tuple[int, ...], bits: int) -> tuple:
    f = flint.fmpz_poly(list(coeffs))
    with working_precision(bits):
        roots = f.complex_roots()
    out = []
    for z, mult in roots:
        out.extend([z] * int(mult))
    return tuple(out)


def root_balls(f: IntPoly, bits: int) -> list[flint.acb]:
    """Certified enclosures of the complex roots of f (with multiplicity)."""
    return list(_root_balls(f.coeffs, int(bits)))


def _box_of(z: flint.acb) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    rl, rh = arb_bounds(z.real)
    il, ih = arb_bounds(z.imag)
    return (rl, rh, il, ih)


def _boxes_disjoint(a, b) -> bool:
    return a[1] < b[0] or b[1] < a[0] or a[3] < b[2] or b[3] < a[2]


def _ball_in_box(z: flint.acb, box) -> bool:
    rl, rh, il, ih = _box_of(z)
    return box[0] <= rl and rh <= box[1] and box[2] <= il and ih <= box[3]


def _ball_meets_box(z: flint.acb, box) -> bool:
    rl, rh, il, ih = _box_of(z)
    return not (rh < box[0] or box[1] < rl or ih < box[2] or box[3] < il)


def _box_width(box) -> Fraction:
    return max(box[1] - box[0], box[3] - box[2])


class AlgebraicNumber:
    """A root of an irreducible primitive integer polynomial, selected by box."""

    __slots__ = ("minpoly", "box", "_hash")

    def __init__(self, minpoly: IntPoly, box: Sequence[Fraction]):
        self.minpoly = minpoly
        self.box = tuple(Fraction(b) for b in box)
        self._hash = None

    # constructors --------------------------------------------------------
    @classmethod
    def rational(cls, q) -> "AlgebraicNumber":
        q = Fraction(q)
        return cls(IntPoly((-q.numerator, q.denominator)), (q, q, Fraction(0), Fraction(0)))

    @classmethod
    def from_ball(cls, minpoly: IntPoly, z: flint.acb) -> "AlgebraicNumber":
        if minpoly.degree == 1:
            return cls.rational(Fraction(-minpoly.coeffs[0], minpoly.coeffs[1]))
        return cls(minpoly, _box_of(z))

    @classmethod
    def root_near(cls, f: IntPoly, approx: complex) -> "AlgebraicNumber":
        """The root of f closest to ``approx`` (f need not be irreducible)."""
        best = None
        for g, _ in factor_over_int(f):
            if g.degree == 0:
                continue
            for r in roots_of(g, Fraction(1, 10**12)):
                v = r.to_complex()
                dist = abs(v - approx)
                if best is None or dist < best[0]:
                    best = (dist, r)
        if best is None:
            raise AlgebraicError(f"{f} has no roots")
        return best[1]

    # basic properties ----------------------------------------------------
    @property
    def degree(self) -> int:
        return self.minpoly.degree

    def is_rational(self) -> bool:
        return self.minpoly.degree == 1

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise AlgebraicError("not a rational number")
        return Fraction(-self.minpoly.coeffs[0], self.minpoly.coeffs[1])

    def is_zero(self) -> bool:
        return self.minpoly.coeffs == (0, 1)

    def is_one(self) -> bool:
        return self.minpoly.coeffs == (-1, 1)

    def is_real(self) -> bool:
        if self.is_rational():
            return True
        # complex roots come in conjugate pairs; a box symmetric about the
        # real axis that isolates a root must isolate a real one
        return self.box[2] <= 0 <= self.box[3] and self._conjugate_box_isolates()

    def _conjugate_box_isolates(self) -> bool:
        bits = 64
        while True:
            balls = root_balls(self.minpoly, bits)
            hits = [z for z in balls if _ball_meets_box(z, self.box)]
            if len(hits) == 1 and _ball_in_box(hits[0], self.box):
                z = hits[0]
                if z.imag.contains(0):
                    il, ih = arb_bounds(z.imag)
                    if il == 0 == ih:
                        return True
                    conj = [w for w in balls if _ball_meets_box(w.conjugate(), _box_of(z))]
                    if len(conj) == 1:
                        return True
                else:
                    return False
            bits *= 2
            if bits > 1 << 16:
                raise AlgebraicError("could not decide reality")

    # enclosures ----------------------------------------------------------
    def ball(self, bits: int = 64) -> flint.acb:
        """Certified enclosure of the selected root at ``bits`` precision."""
        if self.is_rational():
            with working_precision(bits):
                return flint.acb(arb_from_fraction(self.rational_value()))
        b = bits
        while True:
            balls = root_balls(self.minpoly, b)
            hits = [z for z in balls if _ball_meets_box(z, self.box)]
            if len(hits) == 1:
                return hits[0]
            if not hits:
                raise AlgebraicError(f"box does not meet any root of {self.minpoly}")
            b *= 2
            if b > 1 << 16:
                raise AlgebraicError("box does not isolate a root")

    def refine(self, width) -> "AlgebraicNumber":
        if self.is_rational():
            return self
        bits = bits_for_width(width)
        while True:
            z = self.ball(bits)
            box = _box_of(z)
            if _box_width(box) <= Fraction(width):
                return AlgebraicNumber(self.minpoly, box)
            bits *= 2

    def to_complex(self) -> complex:
        z = self.ball(64)
        return complex(float(z.real.mid()), float(z.imag.mid()))

    # comparisons ---------------------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraicNumber):
            if isinstance(other, (int, Fraction)):
                return self.is_rational() and self.rational_value() == other
            return NotImplemented
        if self.minpoly != other.minpoly:
            return False
        if self.is_rational():
            return True
        bits = 64
        while True:
            z1, z2 = self.ball(bits), other.ball(bits)
            if not z1.overlaps(z2):
                return False
            balls = root_balls(self.minpoly, bits)
            if sum(1 for w in balls if w.overlaps(z1)) == 1:
                return True
            bits *= 2

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.minpoly)
        return self._hash

    def __repr__(self) -> str:
        if self.is_rational():
            return f"AlgebraicNumber({frac_str(self.rational_value())})"
        z = self.to_complex()
        return f"AlgebraicNumber(root of {self.minpoly} near {z.real:.6g}{z.imag:+.6g}j)"

    def __str__(self) -> str:
        if self.is_rational():
            return frac_str(self.rational_value())
        z = self.to_complex()
        near = f"{z.real:.6g}" if abs(z.imag) < 1e-12 else f"{z.real:.6g}{z.imag:+.6g}i"
        return f"root({self.minpoly}, near {near})"

    def sort_key(self):
        return (self.degree, self.minpoly.coeffs, self.box)

    # serialization -------------------------------------------------------
    def to_json(self) -> dict:
        return {"minpoly": format_poly(self.minpoly), "box": [frac_str(b) for b in self.box]}

    @classmethod
    def from_json(cls, d: dict) -> "AlgebraicNumber":
        f = parse_poly(d["minpoly"]).primitive()
        box = [Fraction(s) for s in d["box"]]
        a = cls(f, box)
        if f.degree > 1:
            a.ball(64)
        return a

    # operators -----------------------------------------------------------
    def __add__(self, other):
        return alg_add(self, _as_alg(other))

    __radd__ = __add__

    def __neg__(self):
        return alg_neg(self)

    def __sub__(self, other):
        return alg_add(self, alg_neg(_as_alg(other)))

    def __rsub__(self, other):
        return alg_add(_as_alg(other), alg_neg(self))

    def __mul__(self, other):
        return alg_mul(self, _as_alg(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return alg_mul(self, alg_inv(_as_alg(other)))

    def __rtruediv__(self, other):
        return alg_mul(_as_alg(other), alg_inv(self))

    def __pow__(self, k: int):
        return alg_pow(self, k)


def _as_alg(v) -> AlgebraicNumber:
    if isinstance(v, AlgebraicNumber):
        return v
    if isinstance(v, (int, Fraction)):
        return AlgebraicNumber.rational(v)
    raise TypeError(f"cannot use {type(v).__name__} as an algebraic number")


# ---------------------------------------------------------------------------
# root isolation


def roots_of(f: IntPoly, precision=Fraction(1, 10**6)) -> list[AlgebraicNumber]:
    """One AlgebraicNumber per distinct complex root, boxes of width <= precision."""
    if f.is_zero():
        raise PolynomialError("roots of the zero polynomial")
    out: list[AlgebraicNumber] = []
    for g, _ in factor_over_int(f):
        if g.degree == 0:
            continue
        if g.degree == 1:
            out.append(AlgebraicNumber.rational(Fraction(-g.coeffs[0], g.coeffs[1])))
            continue
        bits = bits_for_width(precision)
        while True:
            balls = root_balls(g, bits)
            boxes = [_box_of(z) for z in balls]
            ok = all(_box_width(b) <= Fraction(precision) for b in boxes) and all(
                _boxes_disjoint(boxes[i], boxes[j])
                for i in range(len(boxes))
                for j in range(i + 1, len(boxes))
            )
            if ok:
                break
            bits *= 2
        out.extend(AlgebraicNumber(g, b) for b in boxes)
    out.sort(key=lambda a: (a.degree, a.minpoly.coeffs, a.box[0], a.box[2]))
    return out


def _conjugates(a: AlgebraicNumber) -> list[AlgebraicNumber]:
    """All conjugates of a (a itself included)."""
    if a.is_rational():
        return [a]
    return roots_of(a.minpoly, Fraction(1, 2**20))


# ---------------------------------------------------------------------------
# arithmetic


def _ctx2():
    return flint.fmpz_mpoly_ctx.get(("x", "y"), "lex")


def _resultant_y(f_y: dict, g_xy: dict) -> IntPoly:
    """Res_y(f(y), g(x, y)) as a polynomial in x."""
    ctx = _ctx2()
    F = ctx.from_dict(f_y)
    G = ctx.from_dict(g_xy)
    r = F.resultant(G, "y")
    d = r.to_dict()
    deg = max((k[0] for k in d), default=0)
    c = [0] * (deg + 1)
    for k, v in d.items():
        c[k[0]] += int(v)
    return IntPoly(c)


def _select_root(candidate: IntPoly, evaluate) -> AlgebraicNumber:
    """The unique root of ``candidate`` inside the enclosure ``evaluate(bits)``."""
    factors = [g for g, _ in factor_over_int(candidate) if g.degree > 0]
    bits = 64
    while True:
        target = evaluate(bits)
        hits = []
        for g in factors:
            for z in root_balls(g, bits):
                if z.overlaps(target):
                    hits.append((g, z))
        if len(hits) == 1:
            g, z = hits[0]
            if g.degree == 1:
                return AlgebraicNumber.rational(Fraction(-g.coeffs[0], g.coeffs[1]))
            # shrink to an isolating box for g
            return _isolating(g, z, bits)
        if not hits:
            raise AlgebraicError("no candidate root matches the enclosure")
        bits *= 2
        if bits > 1 << 15:
            raise AlgebraicError("root matching did not converge")


def _isolating(g: IntPoly, z: flint.acb, bits: int) -> AlgebraicNumber:
    while True:
        balls = root_balls(g, bits)
        hits = [w for w in balls if w.overlaps(z)]
        if len(hits) == 1:
            box = _box_of(hits[0])
            others = [_box_of(w) for w in balls if w is not hits[0]]
            if all(_boxes_disjoint(box, o) for o in others):
                return AlgebraicNumber(g, box)
        bits *= 2


def alg_neg(a: AlgebraicNumber) -> AlgebraicNumber:
    if a.is_rational():
        return AlgebraicNumber.rational(-a.rational_value())
    f = IntPoly(c * (-1) ** i for i, c in enumerate(a.minpoly.coeffs)).primitive()
    rl, rh, il, ih = a.box
    return AlgebraicNumber(f, (-rh, -rl, -ih, -il))


def alg_inv(a: AlgebraicNumber) -> AlgebraicNumber:
    if a.is_zero():
        raise ZeroDivisionError("inverse of zero")
    if a.is_rational():
        return AlgebraicNumber.rational(1 / a.rational_value())
    f = a.minpoly.reverse().primitive()
    return _select_root(f, lambda bits: 1 / a.ball(bits))


def alg_add(a: AlgebraicNumber, b: AlgebraicNumber) -> AlgebraicNumber:
    if a.is_rational() and b.is_rational():
        return AlgebraicNumber.rational(a.rational_value() + b.rational_value())
    if b.is_rational():
        a, b = b, a
    if a.is_rational():
        q = a.rational_value()
        if q == 0:
            return b
        # b + q has minpoly den^d f((x - q))
        f = b.minpoly
        num, den = q.numerator, q.denominator
        shifted = IntPoly()
        lin = IntPoly((-num, den))  # den*x - num
        for i, c in enumerate(f.coeffs):
            shifted = shifted + (lin**i) * (c * den ** (f.degree - i))
        f2 = shifted.primitive()
        rl, rh, il, ih = b.box
        return AlgebraicNumber(f2, (rl + q, rh + q, il, ih))
    fa = {(0, i): c for i, c in enumerate(a.minpoly.coeffs) if c}
    # g(x, y) = fb(x - y)
    ctx = _ctx2()
    x, y = ctx.gens()
    gb = ctx.from_dict({})
    for k, c in enumerate(b.minpoly.coeffs):
        if c:
            gb = gb + c * (x - y) ** k
    cand = _resultant_y(fa, gb.to_dict())
    return _select_root(cand, lambda bits: a.ball(bits) + b.ball(bits))


def alg_mul(a: AlgebraicNumber, b: AlgebraicNumber) -> AlgebraicNumber:
    if a.is_rational() and b.is_rational():
        return AlgebraicNumber.rational(a.rational_value() * b.rational_value())
    if b.is_rational():
        a, b = b, a
    if a.is_rational():
        q = a.rational_value()
        if q == 0:
            return AlgebraicNumber.rational(0)
        if q == 1:
            return b
        # roots scaled by q: den^... f(x / q)
        f = b.minpoly
        d = f.degree
        num, den = q.numerator, q.denominator
        f2 = IntPoly(c * den**i * num ** (d - i) for i, c in enumerate(f.coeffs)).primitive()
        return _select_root(f2, lambda bits: b.ball(bits) * arb_from_fraction(q))
    if a.is_zero() or b.is_zero():
        return AlgebraicNumber.rational(0)
    fa = {(0, i): c for i, c in enumerate(a.minpoly.coeffs) if c}
    db = b.minpoly.degree
    gb = {(k, db - k): c for k, c in enumerate(b.minpoly.coeffs) if c}
    cand = _resultant_y(fa, gb)
    return _select_root(cand, lambda bits: a.ball(bits) * b.ball(bits))


def alg_sub(a: AlgebraicNumber, b: AlgebraicNumber) -> AlgebraicNumber:
    return alg_add(a, alg_neg(b))


def alg_div(a: AlgebraicNumber, b: AlgebraicNumber) -> AlgebraicNumber:
    return alg_mul(a, alg_inv(b))


def alg_pow(a: AlgebraicNumber, k: int) -> AlgebraicNumber:
    if k < 0:
        return alg_pow(alg_inv(a), -k)
    if a.is_rational():
        return AlgebraicNumber.rational(a.rational_value() ** k)
    if k == 0:
        return AlgebraicNumber.rational(1)
    # minpoly of a^k divides Res_y(f(y), x - y^k)
    fa = {(0, i): c for i, c in enumerate(a.minpoly.coeffs) if c}
    cand = _resultant_y(fa, {(1, 0): 1, (0, k): -1})
    return _select_root(cand, lambda bits: a.ball(bits) ** k)


def alg_eval_poly(f: IntPoly, a: AlgebraicNumber) -> AlgebraicNumber:
    """f(a) computed in Q(a)."""
    if a.is_rational():
        return AlgebraicNumber.rational(f.eval_fraction(a.rational_value()))
    K = NumberField(a.minpoly)
    e = K.eval_intpoly(f, K.gen())
    return field_element_to_alg(K, e, a)


def field_element_to_alg(K: NumberField, e, theta: AlgebraicNumber) -> AlgebraicNumber:
    """The algebraic number e(theta) for e in K = Q(theta)."""
    if K.is_rational(e):
        return AlgebraicNumber.rational(K.rational_value(e))
    cand = K.charpoly(e)

    def ev(bits):
        z = theta.ball(bits)
        with working_precision(bits):
            acc = flint.acb(0)
            for c in reversed(e.coeffs()):
                acc = acc * z + flint.acb(flint.arb(c))
            return acc

    return _select_root(cand, ev)


# ---------------------------------------------------------------------------
# primitive elements


@dataclass(frozen=True)
class PrimitiveElement:
    gamma: AlgebraicNumber
    k: int
    field: NumberField
    expr_a: flint.fmpq_poly  # a = expr_a(gamma)
    expr_b: flint.fmpq_poly  # b = expr_b(gamma)


def primitive_element(a: AlgebraicNumber, b: AlgebraicNumber) -> PrimitiveElement:
    """gamma = a + k b with the least k >= 0 such that Q(gamma) = Q(a, b)."""
    if b.is_rational():
        K = NumberField(a.minpoly)
        return PrimitiveElement(a, 0, K, K.gen(), K.elem(b.rational_value()))
    if a.is_rational():
        K = NumberField(b.minpoly)
        return PrimitiveElement(b, 0, K, K.elem(a.rational_value()), K.gen())
    k = 1
    while True:
        gamma = alg_add(a, alg_mul(AlgebraicNumber.rational(k), b))
        K = NumberField(gamma.minpoly)
        t = K.gen()
        fb = [K.elem(c) for c in b.minpoly.coeffs]
        # fa(t - k y) as a polynomial in y over K
        fa_sub = _compose_linear(K, a.minpoly, t, -k)
        g = K.poly_gcd(fb, fa_sub)
        if len(g) == 2:
            eb = -g[0]
            ea = t - K.elem(k) * eb if k else t
            ea = K.elem(ea)
            eb = K.elem(eb)
            if not K.is_zero(K.eval_intpoly(a.minpoly, ea)) or not K.is_zero(K.eval_intpoly(b.minpoly, eb)):
                raise AlgebraicError("primitive element verification failed")
            if K.degree == a.degree:
                # b already lies in Q(a): k = 0 works
                Ka = NumberField(a.minpoly)
                t_in_a = K.express_in(ea, t)
                eb_a = Ka.eval_fmpq(eb, t_in_a)
                if not Ka.is_zero(Ka.eval_intpoly(b.minpoly, eb_a)):
                    raise AlgebraicError("primitive element verification failed")
                return PrimitiveElement(a, 0, Ka, Ka.gen(), eb_a)
            return PrimitiveElement(gamma, k, K, ea, eb)
        k += 1


def _compose_linear(K: NumberField, f: IntPoly, c0, c1: int) -> list:
    """f(c0 + c1*y) as a polynomial in y with coefficients in K."""
    out = [K.zero()]
    lin = [c0, K.elem(c1)]
    for c in reversed(f.coeffs):
        # out = out * lin + c
        new = [K.zero() for _ in range(len(out) + 1)]
        for i, x in enumerate(out):
            new[i] = new[i] + K.mul(x, lin[0])
            new[i + 1] = new[i + 1] + K.mul(x, lin[1])
        new[0] = new[0] + K.elem(c)
        out = new
    return K.poly_trim(out)


# ---------------------------------------------------------------------------
# Newton polygons and p-adic valuations


def vp(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def vp_fraction(q: Fraction, p: int) -> int:
    q = Fraction(q)
    return vp(q.numerator, p) - vp(q.denominator, p)


def newton_polygon_slopes(f: IntPoly, p: int) -> list[tuple[Fraction, int]]:
    """[(root valuation, number of roots)] from the lower convex hull of
    (i, v_p(c_i)); roots at zero are omitted."""
    pts = [(i, vp(c, p)) for i, c in enumerate(f.coeffs) if c]
    if len(pts) < 2:
        return []
    hull: list[tuple[int, int]] = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # keep strictly convex lower hull
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    out: list[tuple[Fraction, int]] = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        slope = Fraction(y2 - y1, x2 - x1)
        out.append((-slope, x2 - x1))
    out.sort()
    return out


@dataclass(frozen=True)
class ValuationProfile:
    place: PlaceQ
    entries: tuple[tuple[Fraction, int], ...]

    def to_json(self) -> dict:
        return {
            "place": str(self.place),
            "entries": [{"valuation": frac_str(v), "count": c} for v, c in self.entries],
        }


def valuation_profile(a: AlgebraicNumber, p: int) -> ValuationProfile:
    if a.is_zero():
        raise ValueError("valuation profile of zero")
    return ValuationProfile(PlaceQ(p), tuple(newton_polygon_slopes(a.minpoly, p)))


# ---------------------------------------------------------------------------
# heights and distances


def _log_plus_abs(z: flint.acb) -> flint.arb:
    return abs(z).log().max(flint.arb(0))


def weil_height(a: AlgebraicNumber, precision=Fraction(1, 10**12)) -> flint.arb:
    """Absolute logarithmic Weil height of a, via the Mahler measure."""
    if a.is_rational():
        q = a.rational_value()
        bits = bits_for_width(precision)
        with working_precision(bits):
            return arb_from_fraction(Fraction(max(abs(q.numerator), abs(q.denominator)))).log()
    return mahler_log(a.minpoly, precision) / a.degree


def product_formula_sum(a: AlgebraicNumber, precision=Fraction(1, 10**12)) -> flint.arb:
    """(1/deg a) * sum over all places v of n_v log|a|_v; zero for a != 0.

    The archimedean part comes from root enclosures, the finite part from
    Newton polygons at the primes dividing the end coefficients.
    """
    if a.is_zero():
        raise ValueError("product formula needs a nonzero number")
    f = a.minpoly
    bits = bits_for_width(precision)
    with working_precision(bits):
        acc = flint.arb(0)
        for z in root_balls(f, bits):
            acc += abs(z).log()
        for p, _ in flint.fmpz(f.coeffs[0] * f.lc).factor():
            p = int(p)
            total = sum(v * k for v, k in newton_polygon_slopes(f, p))
            acc -= arb_from_fraction(Fraction(total)) * flint.arb(p).log()
        return acc / f.degree


def mahler_log(f: IntPoly, precision=Fraction(1, 10**12)) -> flint.arb:
    """log of the Mahler measure of f."""
    bits = bits_for_width(precision)
    while True:
        with working_precision(bits):
            acc = flint.arb(abs(f.lc)).log()
            for z in root_balls(f, bits):
                acc += _log_plus_abs(z)
            if 2 * float(acc.rad()) <= float(precision) / 4:
                return acc
        bits *= 2
        if bits > 1 << 14:
            return acc


@dataclass(frozen=True)
class ProjPoint:
    """A point of P^1(Qbar) in canonical affine form [1:alpha] or [0:1]."""

    alpha: AlgebraicNumber | None  # None encodes the point at infinity [0:1]

    @classmethod
    def from_pair(cls, x0: AlgebraicNumber, x1: AlgebraicNumber) -> "ProjPoint":
        x0, x1 = _as_alg(x0), _as_alg(x1)
        if x0.is_zero() and x1.is_zero():
            raise ValueError("[0:0] is not a projective point")
        if x0.is_zero():
            return cls(None)
        return cls(alg_div(x1, x0))

    @classmethod
    def affine(cls, alpha) -> "ProjPoint":
        return cls(_as_alg(alpha))

    @classmethod
    def infinity(cls) -> "ProjPoint":
        return cls(None)

    @property
    def is_infinity(self) -> bool:
        return self.alpha is None

    @property
    def degree(self) -> int:
        return 1 if self.alpha is None else self.alpha.degree

    def is_rational(self) -> bool:
        return self.alpha is None or self.alpha.is_rational()

    def coords(self) -> tuple[AlgebraicNumber, AlgebraicNumber]:
        if self.alpha is None:
            return AlgebraicNumber.rational(0), AlgebraicNumber.rational(1)
        return AlgebraicNumber.rational(1), self.alpha

    def is_special(self) -> bool:
        """P in {0, 1, infinity}."""
        return self.alpha is None or self.alpha.is_zero() or self.alpha.is_one()

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        if self.alpha is None or other.alpha is None:
            return self.alpha is None and other.alpha is None
        return self.alpha == other.alpha

    def __hash__(self):
        return hash(None if self.alpha is None else self.alpha.minpoly)

    def __str__(self) -> str:
        if self.alpha is None:
            return "[0:1]"
        return f"[1:{self.alpha}]"

    def to_json(self):
        if self.alpha is None:
            return {"infinity": True}
        return {"alpha": self.alpha.to_json()}

    @classmethod
    def from_json(cls, d) -> "ProjPoint":
        if d.get("infinity"):
            return cls(None)
        return cls(AlgebraicNumber.from_json(d["alpha"]))

    def sort_key(self):
        return (0,) if self.alpha is None else (1,) + self.alpha.sort_key()


def _abs_p_minmax(a: AlgebraicNumber, p: int) -> tuple[Fraction, Fraction]:
    """(min, max) over conjugates of v_p, for a != 0."""
    prof = newton_polygon_slopes(a.minpoly, p)
    vals = [v for v, _ in prof]
    return min(vals), max(vals)


def _p_pow(p: int, e: Fraction) -> flint.arb:
    """p ** e as a ball (exact when e is an integer)."""
    e = Fraction(e)
    if e.denominator == 1:
        return arb_from_fraction(Fraction(p) ** int(e))
    return flint.arb(p) ** arb_from_fraction(e)


def chordal_distance(
    P1: ProjPoint, P2: ProjPoint, v: PlaceQ, precision=Fraction(1, 10**12)
) -> flint.arb:
    """delta_v(P1, P2) = |x0 y1 - x1 y0|_v / (max|x_i|_v max|y_i|_v).

    The value lies in [0, 1] at primes and in [0, 2] at the archimedean
    place (max-norm normalisation, e.g. 1 and -1 are at distance 2).

    At the archimedean place the boxes fix the embedding.  At a prime p no
    embedding is stored, so the result encloses the distance over every
    embedding of Qbar into C_p (exact when both points are rational).
    """
    bits = bits_for_width(precision)
    with working_precision(bits):
        if P1 == P2:
            return flint.arb(0)
        if v.is_infinite:
            return _chordal_inf(P1, P2, bits)
        return _chordal_p(P1, P2, v.p)


def _chordal_inf(P1: ProjPoint, P2: ProjPoint, bits: int) -> flint.arb:
    if P1.is_infinity or P2.is_infinity:
        other = P2 if P1.is_infinity else P1
        z = other.alpha.ball(bits)
        return 1 / abs(z).max(flint.arb(1))
    if P1.alpha.is_rational() and P2.alpha.is_rational():
        a, b = P1.alpha.rational_value(), P2.alpha.rational_value()
        val = abs(a - b) / (max(1, abs(a)) * max(1, abs(b)))
        return arb_from_fraction(val)
    diff = alg_sub(P1.alpha, P2.alpha)
    d = abs(diff.ball(bits))
    za, zb = P1.alpha.ball(bits), P2.alpha.ball(bits)
    return d / (abs(za).max(flint.arb(1)) * abs(zb).max(flint.arb(1)))


def _chordal_p(P1: ProjPoint, P2: ProjPoint, p: int) -> flint.arb:
    if P1.is_infinity or P2.is_infinity:
        other = P2 if P1.is_infinity else P1
        a = other.alpha
        if a.is_zero():
            return flint.arb(1)
        vmin, vmax = _abs_p_minmax(a, p)
        # 1 / max(1, |a|) with |a| = p^-v
        lo = _p_pow(p, min(Fraction(0), vmin))
        hi = _p_pow(p, min(Fraction(0), vmax))
        return lo.union(hi)
    a, b = P1.alpha, P2.alpha
    if a.is_rational() and b.is_rational():
        qa, qb = a.rational_value(), b.rational_value()
        num = _abs_q(qa - qb, p)
        val = num / (max(Fraction(1), _abs_q(qa, p)) * max(Fraction(1), _abs_q(qb, p)))
        return arb_from_fraction(val)
    diff = alg_sub(a, b)
    dmin, dmax = _abs_p_minmax(diff, p)
    amax = -_abs_p_minmax(a, p)[0] if not a.is_zero() else Fraction(-10**9)
    amin = -_abs_p_minmax(a, p)[1] if not a.is_zero() else Fraction(-10**9)
    bmax = -_abs_p_minmax(b, p)[0] if not b.is_zero() else Fraction(-10**9)
    bmin = -_abs_p_minmax(b, p)[1] if not b.is_zero() else Fraction(-10**9)
    # log_p of numerator / denominators, extremes over embeddings
    lo_exp = -dmax - max(Fraction(0), amax) - max(Fraction(0), bmax)
    hi_exp = -dmin - max(Fraction(0), amin) - max(Fraction(0), bmin)
    hi_exp = min(hi_exp, Fraction(0))
    lo = _p_pow(p, lo_exp)
    hi = _p_pow(p, hi_exp)
    return lo.union(hi)


def _abs_q(q: Fraction, p: int) -> Fraction:
    if q == 0:
        return Fraction(0)
    return Fraction(p) ** (-vp_fraction(q, p))
