"""Points of C_n, local expansions, evaluation, critical loci and degrees.

Local work happens in three charts.  At a finite point with y0 != 0 the
parameter is t = x - x0; where y0 = 0 it is t = y; at the n points at
infinity [1 : r0 : 0] (r0^n = -1) it is s = 1/x, with y/x = r(s) solving
r^n = s^n - 1.  Functions become Laurent series over the residue field
Q(point), which gives values and ramification indices exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import flint

from .algebraic import (
    AlgebraicNumber,
    ProjPoint,
    field_element_to_alg,
    primitive_element,
    roots_of,
)
from .fermat import FFElement, FunctionFieldError, RatFunc
from .numfield import NumberField
from .polys import IntPoly, factor_over_int


class _NeedPrecision(Exception):
    pass


# ---------------------------------------------------------------------------
# Laurent series over a number field


@dataclass
class _LS:
    K: NumberField
    val: int
    c: list  # known coefficients of t^val, t^(val+1), ...

    @property
    def end(self) -> int:
        return self.val + len(self.c)

    def normalized(self) -> "_LS":
        k = 0
        while k < len(self.c) and self.c[k].is_zero():
            k += 1
        return _LS(self.K, self.val + k, self.c[k:])

    def is_unknown(self) -> bool:
        return not self.c


def _ls_const(K, e, prec: int) -> _LS:
    return _LS(K, 0, [K.elem(e)] + [K.zero() for _ in range(prec - 1)])


def _ls_add(a: _LS, b: _LS) -> _LS:
    K = a.K
    v = min(a.val, b.val)
    end = min(a.end, b.end)
    out = [K.zero() for _ in range(max(0, end - v))]
    for s in (a, b):
        for i, x in enumerate(s.c):
            k = s.val + i - v
            if 0 <= k < len(out):
                out[k] = out[k] + x
    return _LS(K, v, out).normalized()


def _ls_neg(a: _LS) -> _LS:
    return _LS(a.K, a.val, [-x for x in a.c])


def _ls_mul(a: _LS, b: _LS) -> _LS:
    a, b = a.normalized(), b.normalized()
    prec = min(len(a.c), len(b.c))
    if prec == 0:
        return _LS(a.K, a.val + b.val, [])
    return _LS(a.K, a.val + b.val, a.K.series_mul(a.c, b.c, prec))


def _ls_inv(a: _LS) -> _LS:
    a = a.normalized()
    if a.is_unknown():
        raise _NeedPrecision()
    K = a.K
    n = len(a.c)
    i0 = K.inv(a.c[0])
    b = [i0]
    for k in range(1, n):
        acc = K.zero()
        for j in range(1, k + 1):
            if not a.c[j].is_zero():
                acc = acc + K.mul(a.c[j], b[k - j])
        b.append(-K.mul(acc, i0))
    return _LS(K, -a.val, b)


def _ls_pow(a: _LS, k: int) -> _LS:
    out = _ls_const(a.K, 1, len(a.c) or 1)
    base = a
    while k:
        if k & 1:
            out = _ls_mul(out, base)
        base = _ls_mul(base, base)
        k >>= 1
    return out


def _ls_poly(f: flint.fmpz_poly, x: _LS, prec: int) -> _LS:
    K = x.K
    coeffs = [int(c) for c in f.coeffs()]
    if not coeffs:
        return _LS(K, prec, [])
    pad = prec + max(0, -x.val) * len(coeffs)
    acc = _ls_const(K, coeffs[-1], pad)
    for c in reversed(coeffs[:-1]):
        acc = _ls_add(_ls_mul(acc, x), _ls_const(K, c, pad))
    return acc


def _ls_ratfunc(r: RatFunc, x: _LS, prec: int) -> _LS:
    if r.is_zero():
        return _LS(x.K, prec + 10**6, [])
    num = _ls_poly(r.num, x, prec)
    den = _ls_poly(r.den, x, prec)
    return _ls_mul(num, _ls_inv(den))


def _solve_root(K: NumberField, n: int, R: _LS, z0, prec: int) -> _LS:
    """Series z with z^n = R and z(0) = z0 (requires z0^n = R(0) != 0)."""
    z = _LS(K, 0, [K.elem(z0)] + [K.zero() for _ in range(prec - 1)])
    steps = 1
    while (1 << steps) < prec + 2:
        steps += 1
    for _ in range(steps + 1):
        zn1 = _ls_pow(z, n - 1)
        resid = _ls_add(_ls_mul(zn1, z), _ls_neg(R))
        if resid.is_unknown() or resid.val >= prec:
            break
        deriv = _ls_mul(_ls_const(K, n, prec), zn1)
        z = _ls_add(z, _ls_neg(_ls_mul(resid, _ls_inv(deriv))))
        z = _LS(K, z.val, z.c[: prec - z.val])
    return z


# ---------------------------------------------------------------------------
# points


@dataclass(frozen=True)
class LocalPoint:
    """A point of C_n over K = Q(theta), in one of the three charts."""

    n: int
    K: NumberField
    theta: AlgebraicNumber
    x0: object | None  # K-element, None at infinity
    y0: object | None
    r0: object | None = None  # y/x at a point at infinity

    @property
    def at_infinity(self) -> bool:
        return self.r0 is not None

    def series(self, prec: int) -> tuple[_LS, _LS]:
        K, n = self.K, self.n
        if self.at_infinity:
            R = _LS(K, 0, [K.elem(-1)] + [K.zero() for _ in range(prec - 1)])
            if n < prec:
                R.c[n] = K.one()
            r = _solve_root(K, n, R, self.r0, prec)
            x = _LS(K, -1, [K.one()] + [K.zero() for _ in range(prec - 1)])
            y = _LS(K, r.val - 1, r.c)
            return x, y
        if not self.y0.is_zero():
            x = _LS(K, 0, [self.x0, K.one()] + [K.zero() for _ in range(prec - 2)])
            R = _ls_add(_ls_const(K, 1, prec), _ls_neg(_ls_pow(x, n)))
            y = _solve_root(K, n, R, self.y0, prec)
            return x, y
        y = _LS(K, 1, [K.one()] + [K.zero() for _ in range(prec - 1)])
        R = _ls_add(_ls_const(K, 1, prec), _ls_neg(_ls_pow(y, n)))
        x = _solve_root(K, n, R, self.x0, prec)
        return x, y

    def field_value(self, e) -> ProjPoint:
        return ProjPoint.affine(field_element_to_alg(self.K, e, self.theta))


@dataclass(frozen=True)
class CurvePoint:
    """A point of C_n: affine (x0, y0), or the point at infinity with y/x = r0."""

    n: int
    x0: AlgebraicNumber | None = None
    y0: AlgebraicNumber | None = None
    r0: AlgebraicNumber | None = None

    def __post_init__(self):
        lp = self.local()
        K = lp.K
        if self.r0 is not None:
            ok = K.is_zero(K.pow(lp.r0, self.n) + 1)
        else:
            ok = K.is_zero(K.pow(lp.x0, self.n) + K.pow(lp.y0, self.n) - 1)
        if not ok:
            raise FunctionFieldError("point does not lie on the Fermat curve")

    @property
    def at_infinity(self) -> bool:
        return self.r0 is not None

    def local(self) -> LocalPoint:
        return _local_point(self)

    def __str__(self) -> str:
        if self.at_infinity:
            return f"[1:{self.r0}:0]"
        return f"({self.x0}, {self.y0})"

    def to_json(self) -> dict:
        if self.at_infinity:
            return {"n": self.n, "r0": self.r0.to_json()}
        return {"n": self.n, "x0": self.x0.to_json(), "y0": self.y0.to_json()}


def _local_point(P: CurvePoint) -> LocalPoint:
    lp = P.__dict__.get("_lp")
    if lp is not None:
        return lp
    if P.r0 is not None:
        K = NumberField(P.r0.minpoly)
        lp = LocalPoint(P.n, K, P.r0, None, None, K.gen())
    else:
        pe = primitive_element(P.x0, P.y0)
        lp = LocalPoint(P.n, pe.field, pe.gamma, pe.field.elem(pe.expr_a), pe.field.elem(pe.expr_b))
    object.__setattr__(P, "_lp", lp)
    return lp


# ---------------------------------------------------------------------------
# evaluation and ramification


def _expansion(f: FFElement, lp: LocalPoint, prec: int) -> _LS:
    x, y = lp.series(prec)
    acc = None
    ypow = _ls_const(lp.K, 1, prec)
    for i, c in enumerate(f.coeffs):
        if not c.is_zero():
            term = _ls_mul(_ls_ratfunc(c, x, prec), ypow)
            acc = term if acc is None else _ls_add(acc, term)
        if i + 1 < f.n:
            ypow = _ls_mul(ypow, y)
    if acc is None:
        raise FunctionFieldError("expansion of the zero function")
    return acc.normalized()


def local_behaviour(f: FFElement, lp: LocalPoint, max_prec: int = 1024):
    """(value, e): value is a K-element or None for a pole; e the ramification index."""
    if f.is_constant():
        raise FunctionFieldError("constant function has no ramification")
    prec = 12
    while prec <= max_prec:
        try:
            s = _expansion(f, lp, prec)
            if s.is_unknown():
                raise _NeedPrecision()
            if s.val < 0:
                return None, -s.val
            value = s.c[0] if s.val == 0 else lp.K.zero()
            g = _ls_add(s, _ls_neg(_ls_const(lp.K, value, prec)))
            if g.is_unknown():
                raise _NeedPrecision()
            return value, g.val
        except _NeedPrecision:
            prec *= 2
    raise ArithmeticError("local expansion did not stabilise")


def ff_evaluate(f: FFElement, Q: CurvePoint) -> ProjPoint:
    """f(Q) as a point of P^1(Qbar); poles map to [0:1]."""
    if f.n != Q.n:
        raise FunctionFieldError("point and function live on different curves")
    lp = Q.local()
    if f.is_constant():
        return ProjPoint.affine(f.constant_value())
    value, _ = local_behaviour(f, lp)
    if value is None:
        return ProjPoint.infinity()
    return lp.field_value(value)


def ff_evaluate_in_field(f: FFElement, lp: LocalPoint):
    """f at lp as a K-element, or None at a pole."""
    if f.is_constant():
        return lp.K.elem(f.constant_value())
    return local_behaviour(f, lp)[0]


# ---------------------------------------------------------------------------
# map degree


def _ctx(names):
    return flint.fmpz_mpoly_ctx.get(tuple(names), "lex")


def _numer_denom(f: FFElement):
    """A(x, y), B(x) integer polynomials with f = A / B."""
    B = flint.fmpz_poly([1])
    for c in f.coeffs:
        if not c.is_zero():
            g = B.gcd(c.den)
            B = (B * c.den) // g
    parts = []
    for i, c in enumerate(f.coeffs):
        if not c.is_zero():
            parts.append((i, c.num * (B // c.den)))
    return parts, B


def _to_mpoly(ctx, parts, B, xi=0, yi=1):
    nv = ctx.nvars()
    A = {}
    for j, poly in parts:
        for i, cf in enumerate(poly.coeffs()):
            if cf:
                e = [0] * nv
                e[xi], e[yi] = i, j
                A[tuple(e)] = A.get(tuple(e), 0) + int(cf)
    Bd = {}
    for i, cf in enumerate(B.coeffs()):
        if cf:
            e = [0] * nv
            e[xi] = i
            Bd[tuple(e)] = int(cf)
    return ctx.from_dict(A), ctx.from_dict(Bd)


def ff_map_degree(f: FFElement) -> int:
    """[Q(C_n) : Q(f)] = n * deg_x(Phi) / deg_t(Phi), Phi(x, f) = 0 minimal."""
    if f.is_constant():
        raise FunctionFieldError("constant function has no degree")
    n = f.n
    ctx = _ctx(("x", "y", "t"))
    x, y, t = ctx.gens()
    parts, B = _numer_denom(f)
    A, Bm = _to_mpoly(ctx, parts, B)
    G = x**n + y**n - 1
    res = G.resultant(A - t * Bm, "y")
    _, facs = res.factor()
    cands = [g for g, _ in facs if g.degrees()[2] > 0]
    if len(cands) != 1:
        raise ArithmeticError("norm form has several t-dependent factors")
    dx, _, dt = cands[0].degrees()
    num = n * dx
    if num % dt:
        raise ArithmeticError("inconsistent degree computation")
    return int(num // dt)


# ---------------------------------------------------------------------------
# critical locus


@dataclass
class CriticalOrbit:
    """A Galois orbit of points of C_n with common ramification index e."""

    size: int
    e: int
    point: LocalPoint
    value: ProjPoint
    x_minpoly: IntPoly | None  # None at infinity

    @property
    def at_infinity(self) -> bool:
        return self.point.at_infinity

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "ramification_index": self.e,
            "at_infinity": self.at_infinity,
            "x_minpoly": None if self.x_minpoly is None else str(self.x_minpoly),
            "value": str(self.value),
        }


@dataclass
class CriticalLocus:
    n: int
    degree: int
    orbits: list[CriticalOrbit]
    x_eliminant: IntPoly
    shear: int
    candidates_checked: int = 0

    @property
    def genus(self) -> int:
        return (self.n - 1) * (self.n - 2) // 2

    @property
    def total_ramification(self) -> int:
        return sum(o.size * (o.e - 1) for o in self.orbits)

    @property
    def riemann_hurwitz_target(self) -> int:
        return 2 * self.genus - 2 + 2 * self.degree

    @property
    def complete(self) -> bool:
        return self.total_ramification == self.riemann_hurwitz_target

    def critical_values(self) -> list[ProjPoint]:
        out: list[ProjPoint] = []
        for o in self.orbits:
            if o.value not in out:
                out.append(o.value)
        return out

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "degree": self.degree,
            "genus": self.genus,
            "total_ramification": self.total_ramification,
            "riemann_hurwitz_target": self.riemann_hurwitz_target,
            "complete": self.complete,
            "x_eliminant": str(self.x_eliminant),
            "orbits": [o.to_json() for o in self.orbits],
        }


def _coeffs_in_y(poly, K: NumberField, vbar, deg_y: int) -> list:
    """Coefficients (in y) of poly(v, y) at v = vbar."""
    out = [K.zero() for _ in range(deg_y + 1)]
    vp = {}
    for (i, j), c in poly.to_dict().items():
        if i not in vp:
            vp[i] = K.pow(vbar, i)
        out[j] = out[j] + K.mul(vp[i], K.elem(int(c)))
    return out


def _univariate(poly, idx: int) -> IntPoly:
    d = poly.to_dict()
    deg = max((k[idx] for k in d), default=0)
    c = [0] * (deg + 1)
    for k, v in d.items():
        c[k[idx]] += int(v)
    return IntPoly(c)


def _fermat_G(n: int):
    ctx = _ctx(("x", "y"))
    x, y = ctx.gens()
    return ctx, x**n + y**n - 1


def points_on(n: int, P, max_shear: int = 16):
    """Galois orbits of affine points of C_n on P(x, y) = 0.

    P is an fmpz_mpoly in (x, y) not divisible by the curve equation.
    Returns (list of (rho, K, x0, y0), shear c), where each orbit is cut
    out by rho(x + c y) = 0 and K = Q[v]/(rho).
    """
    ctx, G = _fermat_G(n)
    if P.is_zero():
        raise FunctionFieldError("the zero polynomial vanishes on the whole curve")
    vctx = _ctx(("v", "y"))
    v, yy = vctx.gens()
    for c in range(0, max_shear):
        if (-c) ** n + 1 == 0:
            continue
        Gs = G.compose(v - c * yy, yy, ctx=vctx)
        Ps = P.compose(v - c * yy, yy, ctx=vctx)
        Ru = _univariate(Gs.resultant(Ps, "y"), 0)
        if Ru.is_zero():
            raise FunctionFieldError("polynomial vanishes on the curve")
        points = []
        ok = True
        for rho, _ in factor_over_int(Ru):
            if rho.degree == 0:
                continue
            K = NumberField(rho)
            vbar = K.gen()
            gG = _coeffs_in_y(Gs, K, vbar, n)
            gP = _coeffs_in_y(Ps, K, vbar, max(k[1] for k in Ps.to_dict()))
            g = K.poly_gcd(gG, gP)
            if len(g) != 2:
                ok = False
                break
            y0 = K.elem(-g[0])
            x0 = K.elem(vbar - K.elem(c) * y0)
            points.append((rho, K, x0, y0))
        if ok:
            return points, c
    raise ArithmeticError("no separating shear found")


def infinity_orbits(n: int):
    """Galois orbits of the n points at infinity, as (rho, K) with r0 = gen."""
    out = []
    for rho, _ in factor_over_int(IntPoly([1] + [0] * (n - 1) + [1])):
        out.append((rho, NumberField(rho)))
    return out


def fraction_as_mpoly(f: FFElement):
    """(A, B) in Z[x, y] with f = A / B and B in Z[x]."""
    ctx = _ctx(("x", "y"))
    parts, B = _numer_denom(f)
    return _to_mpoly(ctx, parts, B)


def _finite_candidates(f: FFElement):
    n = f.n
    ctx, G = _fermat_G(n)
    A, Bm = fraction_as_mpoly(f)
    Ax, Ay, Bx = A.derivative("x"), A.derivative("y"), Bm.derivative("x")
    Gx, Gy = G.derivative("x"), G.derivative("y")
    J = ((Ax * Bm - A * Bx) * Gy - (Ay * Bm) * Gx) * Bm
    if J.is_zero():
        raise FunctionFieldError("constant function")
    return points_on(n, J)


def _theta(rho: IntPoly) -> AlgebraicNumber:
    return roots_of(rho, Fraction(1, 2**30))[0]


def ff_critical_locus(f: FFElement) -> CriticalLocus:
    """All points where f: C_n -> P^1 ramifies, with indices and values."""
    if f.is_constant():
        raise FunctionFieldError("constant function has no critical locus")
    n = f.n
    deg = ff_map_degree(f)
    finite, shear = _finite_candidates(f)
    orbits: list[CriticalOrbit] = []
    checked = 0
    for rho, K, x0, y0 in finite:
        lp = LocalPoint(n, K, _theta(rho), x0, y0)
        value, e = local_behaviour(f, lp)
        checked += 1
        if e >= 2:
            xm = K.minpoly(x0) if not K.is_rational(x0) else IntPoly(
                (-K.rational_value(x0).numerator, K.rational_value(x0).denominator)
            )
            val = ProjPoint.infinity() if value is None else lp.field_value(value)
            orbits.append(CriticalOrbit(rho.degree, e, lp, val, xm))
    for rho, K in infinity_orbits(n):
        lp = LocalPoint(n, K, _theta(rho), None, None, K.gen())
        value, e = local_behaviour(f, lp)
        checked += 1
        if e >= 2:
            val = ProjPoint.infinity() if value is None else lp.field_value(value)
            orbits.append(CriticalOrbit(rho.degree, e, lp, val, None))
    elim = IntPoly((1,))
    seen = set()
    for o in orbits:
        if o.x_minpoly is not None and o.x_minpoly.coeffs not in seen:
            seen.add(o.x_minpoly.coeffs)
            elim = elim * o.x_minpoly
    return CriticalLocus(n, deg, orbits, elim, shear, checked)
