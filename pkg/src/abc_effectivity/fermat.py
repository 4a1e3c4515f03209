"""Rational functions on the Fermat curve C_n : x^n + y^n = 1.

Every f in Q(C_n) is written uniquely as sum_{i<n} (a_i/q_i)(x) * y^i.
Each coefficient a_i/q_i is stored reduced: gcd(a_i, q_i) = 1 over Q, the
integer contents of a_i and q_i are coprime, and lc(q_i) > 0.  This keeps
rational constants like 1/2 representable (q_i = 2).
"""

from __future__ import annotations

import ast

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import flint

from .polys import IntPoly, PolynomialError, format_poly, parse_poly


class FunctionFieldError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Q(x)


def _fz(v) -> flint.fmpz_poly:
    if isinstance(v, flint.fmpz_poly):
        return v
    if isinstance(v, IntPoly):
        return v.to_flint()
    return flint.fmpz_poly([int(v)])


@dataclass(frozen=True)
class RatFunc:
    """num/den in Q(x), normalized as described in the module docstring."""

    num: flint.fmpz_poly
    den: flint.fmpz_poly

    @staticmethod
    def make(num, den=1) -> "RatFunc":
        num, den = _fz(num), _fz(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            return RatFunc(flint.fmpz_poly([]), flint.fmpz_poly([1]))
        g = num.gcd(den)
        if g.degree() > 0:
            num, den = num // g, den // g
        c = math.gcd(int(num.content()), int(den.content()))
        if c > 1:
            num, den = num // c, den // c
        if int(den.coeffs()[-1]) < 0:
            num, den = -num, -den
        return RatFunc(num, den)

    @staticmethod
    def const(q) -> "RatFunc":
        q = Fraction(q)
        return RatFunc.make(q.numerator, q.denominator)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.degree() == 0 and int(self.den.coeffs()[0]) == 1

    def __add__(self, o: "RatFunc") -> "RatFunc":
        if self.is_zero():
            return o
        if o.is_zero():
            return self
        if self.den == o.den:
            return RatFunc.make(self.num + o.num, self.den)
        return RatFunc.make(self.num * o.den + o.num * self.den, self.den * o.den)

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den)

    def __sub__(self, o: "RatFunc") -> "RatFunc":
        return self + (-o)

    def __mul__(self, o: "RatFunc") -> "RatFunc":
        if self.is_zero() or o.is_zero():
            return ZERO_RF
        return RatFunc.make(self.num * o.num, self.den * o.den)

    def inv(self) -> "RatFunc":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RatFunc.make(self.den, self.num)

    def __truediv__(self, o: "RatFunc") -> "RatFunc":
        return self * o.inv()

    @property
    def a(self) -> IntPoly:
        return IntPoly.from_flint(self.num)

    @property
    def q(self) -> IntPoly:
        return IntPoly.from_flint(self.den)


ZERO_RF = RatFunc(flint.fmpz_poly([]), flint.fmpz_poly([1]))
ONE_RF = RatFunc(flint.fmpz_poly([1]), flint.fmpz_poly([1]))


# ---------------------------------------------------------------------------
# Q(C_n)


@dataclass(frozen=True)
class FFElement:
    n: int
    coeffs: tuple[RatFunc, ...]

    def __post_init__(self):
        if self.n < 2:
            raise FunctionFieldError("the Fermat exponent must be at least 2")
        if len(self.coeffs) != self.n:
            raise FunctionFieldError("need exactly n coefficients")

    # constructors
    @classmethod
    def zero(cls, n: int) -> "FFElement":
        return cls(n, (ZERO_RF,) * n)

    @classmethod
    def const(cls, n: int, q) -> "FFElement":
        return cls(n, (RatFunc.const(q),) + (ZERO_RF,) * (n - 1))

    @classmethod
    def one(cls, n: int) -> "FFElement":
        return cls.const(n, 1)

    @classmethod
    def x(cls, n: int) -> "FFElement":
        return cls(n, (RatFunc.make(flint.fmpz_poly([0, 1])),) + (ZERO_RF,) * (n - 1))

    @classmethod
    def y(cls, n: int) -> "FFElement":
        return cls(n, (ZERO_RF, ONE_RF) + (ZERO_RF,) * (n - 2))

    @classmethod
    def from_xpoly(cls, n: int, num, den=1) -> "FFElement":
        return cls(n, (RatFunc.make(num, den),) + (ZERO_RF,) * (n - 1))

    @classmethod
    def from_xy(cls, n: int, terms: dict[tuple[int, int], int]) -> "FFElement":
        """sum c * x^i * y^j, with y^j reduced via y^n = 1 - x^n."""
        out = cls.zero(n)
        X, Y = cls.x(n), cls.y(n)
        for (i, j), c in terms.items():
            out = ff_add(out, ff_mul(cls.const(n, c), ff_mul(ff_pow(X, i), ff_pow(Y, j))))
        return out

    # views
    @property
    def terms(self) -> tuple[tuple[IntPoly, IntPoly], ...]:
        return tuple((c.a, c.q) for c in self.coeffs)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def is_constant(self) -> bool:
        return all(c.is_zero() for c in self.coeffs[1:]) and self.coeffs[0].num.degree() <= 0 and self.coeffs[0].den.degree() <= 0

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise FunctionFieldError("not a constant")
        c = self.coeffs[0]
        if c.is_zero():
            return Fraction(0)
        return Fraction(int(c.num.coeffs()[0]), int(c.den.coeffs()[0]))

    def __add__(self, o):
        return ff_add(self, _coerce(self.n, o))

    __radd__ = __add__

    def __sub__(self, o):
        return ff_add(self, ff_neg(_coerce(self.n, o)))

    def __rsub__(self, o):
        return ff_add(_coerce(self.n, o), ff_neg(self))

    def __neg__(self):
        return ff_neg(self)

    def __mul__(self, o):
        return ff_mul(self, _coerce(self.n, o))

    __rmul__ = __mul__

    def __truediv__(self, o):
        return ff_mul(self, ff_inverse(_coerce(self.n, o)))

    def __rtruediv__(self, o):
        return ff_mul(_coerce(self.n, o), ff_inverse(self))

    def __pow__(self, k: int):
        return ff_pow(self, k)

    def __str__(self) -> str:
        return format_ff(self)


def _coerce(n: int, v) -> FFElement:
    if isinstance(v, FFElement):
        if v.n != n:
            raise FunctionFieldError(f"mismatched curves C_{n} and C_{v.n}")
        return v
    if isinstance(v, (int, Fraction)):
        return FFElement.const(n, v)
    raise TypeError(f"cannot use {type(v).__name__} as a function on C_{n}")


def ff_normalize(n: int, raw_terms: Sequence) -> FFElement:
    """Canonical FFElement from raw (a_i, q_i) pairs, i = 0..n-1.

    Extra pairs beyond n - 1 are folded back with y^n = 1 - x^n.
    """
    coeffs = [ZERO_RF] * n
    xn = flint.fmpz_poly([0] * n + [1])
    for i, t in enumerate(raw_terms):
        if isinstance(t, RatFunc):
            rf = t
        else:
            a, q = t
            if _fz(q).is_zero():
                raise ZeroDivisionError(f"zero denominator in term {i}")
            rf = RatFunc.make(a, q)
        k, j = divmod(i, n)
        if k:
            rf = rf * RatFunc.make((1 - xn) ** k)
        coeffs[j] = coeffs[j] + rf
    return FFElement(n, tuple(coeffs))


def _check_same(f: FFElement, g: FFElement):
    if f.n != g.n:
        raise FunctionFieldError(f"mismatched curves C_{f.n} and C_{g.n}")


def ff_add(f: FFElement, g: FFElement) -> FFElement:
    _check_same(f, g)
    return FFElement(f.n, tuple(a + b for a, b in zip(f.coeffs, g.coeffs)))


def ff_neg(f: FFElement) -> FFElement:
    return FFElement(f.n, tuple(-a for a in f.coeffs))


def ff_sub(f: FFElement, g: FFElement) -> FFElement:
    return ff_add(f, ff_neg(g))


def ff_mul(f: FFElement, g: FFElement) -> FFElement:
    _check_same(f, g)
    n = f.n
    raw = [ZERO_RF] * (2 * n - 1)
    for i, a in enumerate(f.coeffs):
        if a.is_zero():
            continue
        for j, b in enumerate(g.coeffs):
            if not b.is_zero():
                raw[i + j] = raw[i + j] + a * b
    return ff_normalize(n, raw)


def ff_pow(f: FFElement, k: int) -> FFElement:
    if k < 0:
        return ff_pow(ff_inverse(f), -k)
    out = FFElement.one(f.n)
    base = f
    while k:
        if k & 1:
            out = ff_mul(out, base)
        base = ff_mul(base, base)
        k >>= 1
    return out


def mult_matrix(f: FFElement) -> list[list[RatFunc]]:
    """Matrix of g -> f g on the Q(x)-basis 1, y, ..., y^(n-1)."""
    n = f.n
    cols = []
    for j in range(n):
        basis = FFElement(n, tuple(ONE_RF if i == j else ZERO_RF for i in range(n)))
        cols.append(ff_mul(f, basis).coeffs)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def _solve(m: list[list[RatFunc]], rhs: list[RatFunc]) -> tuple[list[RatFunc], RatFunc]:
    """Gaussian elimination over Q(x); returns (solution, determinant)."""
    n = len(m)
    a = [row[:] + [rhs[i]] for i, row in enumerate(m)]
    det = ONE_RF
    for col in range(n):
        piv = next((r for r in range(col, n) if not a[r][col].is_zero()), None)
        if piv is None:
            raise ZeroDivisionError("singular multiplication matrix")
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det = det * a[col][col]
        inv = a[col][col].inv()
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and not a[r][col].is_zero():
                fac = a[r][col]
                a[r] = [v - fac * w for v, w in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)], det


def ff_norm(f: FFElement) -> RatFunc:
    """N_{Q(C_n)/Q(x)}(f): the product of the conjugates f(x, zeta^i y)."""
    if f.is_zero():
        return ZERO_RF
    _, det = _solve(mult_matrix(f), [ONE_RF] + [ZERO_RF] * (f.n - 1))
    return det


def ff_inverse(f: FFElement) -> FFElement:
    """1/f, as (product of the other conjugates) / norm.

    The conjugate product is obtained as the adjugate column of the
    multiplication-by-f matrix, whose determinant is the norm.
    """
    if f.is_zero():
        raise ZeroDivisionError("inverse of the zero function")
    sol, _ = _solve(mult_matrix(f), [ONE_RF] + [ZERO_RF] * (f.n - 1))
    g = FFElement(f.n, tuple(sol))
    if ff_mul(f, g) != FFElement.one(f.n):
        raise ArithmeticError("inverse verification failed")
    return g


# ---------------------------------------------------------------------------
# complexity


@dataclass(frozen=True)
class Complexity:
    """max(n, degrees, heights) of a presentation.

    A coefficient a_i/q_i has height log max|c| over the joint coefficient
    vector of (a_i, q_i), i.e. its height as a projective point (the joint
    content is 1 in canonical form).
    """

    n: int
    max_degree: int
    max_coeff: int

    @property
    def log_height(self) -> float:
        return math.log(self.max_coeff) if self.max_coeff > 1 else 0.0

    @property
    def H(self) -> float:
        return max(float(self.n), float(self.max_degree), self.log_height)

    @property
    def H_ceil(self) -> int:
        """Smallest integer >= H; formulas increasing in H use this."""
        return max(self.n, self.max_degree, math.ceil(self.log_height) if self.max_coeff > 1 else 0)

    def to_json(self) -> dict:
        return {"n": self.n, "max_degree": self.max_degree, "max_coeff": str(self.max_coeff), "H": self.H, "H_ceil": self.H_ceil}


def ff_complexity(f: FFElement) -> Complexity:
    deg = 0
    cmax = 1
    for c in f.coeffs:
        if c.is_zero():
            continue
        deg = max(deg, c.num.degree(), c.den.degree())
        cmax = max(cmax, *(abs(int(v)) for v in c.num.coeffs()), *(abs(int(v)) for v in c.den.coeffs()))
    return Complexity(f.n, deg, cmax)


# ---------------------------------------------------------------------------
# text format: "((a0)/(q0)) + ((a1)/(q1))*y + ((a2)/(q2))*y^2"


def format_ff(f: FFElement) -> str:
    parts = []
    for i, c in enumerate(f.coeffs):
        if c.is_zero():
            continue
        s = f"(({format_poly(c.a)})/({format_poly(c.q)}))"
        if i == 1:
            s += "*y"
        elif i > 1:
            s += f"*y^{i}"
        parts.append(s)
    return " + ".join(parts) if parts else "0"


_TERM = re.compile(r"\s*\(\s*\(([^()]*)\)\s*/\s*\(([^()]*)\)\s*\)\s*(?:\*\s*y(?:\s*\^\s*(\d+))?)?\s*")


def parse_ff(text: str, n: int) -> FFElement:
    """Read the canonical form printed by format_ff, or else an ordinary
    expression in x and y with + - * / ^ and integer constants."""
    text = text.strip()
    if text == "0":
        return FFElement.zero(n)
    try:
        return _parse_canonical(text, n)
    except PolynomialError as exc:
        try:
            return _parse_expression(text, n)
        except PolynomialError:
            raise exc from None


def _parse_expression(text: str, n: int) -> FFElement:
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise PolynomialError(f"cannot parse expression {text!r}") from exc

    def ev(node) -> FFElement:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Name) and node.id in ("x", "y"):
            return FFElement.x(n) if node.id == "x" else FFElement.y(n)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return FFElement.const(n, node.value)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return ff_sub(FFElement.zero(n), v) if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                e = node.right
                neg = isinstance(e, ast.UnaryOp) and isinstance(e.op, ast.USub)
                e = e.operand if neg else e
                if not (isinstance(e, ast.Constant) and isinstance(e.value, int)):
                    raise PolynomialError("exponents must be integer constants")
                base = ev(node.left)
                return ff_pow(ff_inverse(base) if neg else base, e.value)
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return ff_add(a, b)
            if isinstance(node.op, ast.Sub):
                return ff_sub(a, b)
            if isinstance(node.op, ast.Mult):
                return ff_mul(a, b)
            if isinstance(node.op, ast.Div):
                if b.is_zero():
                    raise PolynomialError("division by zero")
                return ff_mul(a, ff_inverse(b))
        raise PolynomialError(f"unsupported syntax in {text!r}")

    return ev(tree)


def _parse_canonical(text: str, n: int) -> FFElement:
    raw: dict[int, RatFunc] = {}
    pos = 0
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m:
            raise PolynomialError(f"cannot parse function-field element at column {pos}: {text[pos:pos + 20]!r}")
        a, q, e = m.group(1), m.group(2), m.group(3)
        k = 0 if m.group(0).find("y") < 0 else int(e or 1)
        rf = RatFunc.make(parse_poly(a), parse_poly(q))
        raw[k] = raw.get(k, ZERO_RF) + rf
        pos = m.end()
        if pos < len(text):
            if text[pos] != "+":
                raise PolynomialError(f"expected '+' at column {pos}")
            pos += 1
    size = max(raw) + 1 if raw else 1
    return ff_normalize(n, [raw.get(i, ZERO_RF) for i in range(size)])


# ---------------------------------------------------------------------------
# the local parameter identity


def local_parameter_identity_check(n: int, a: int) -> bool:
    """(ax - y)^(-1) == (sum_{k<n} (ax/y)^k) / (a^n / y^(n-1) - (a^n + 1) y), exactly."""
    if a < 2:
        raise ValueError("a must be at least 2")
    X, Y = FFElement.x(n), FFElement.y(n)
    yinv = ff_inverse(Y)
    r = ff_mul(FFElement.const(n, a), ff_mul(X, yinv))
    num = FFElement.zero(n)
    term = FFElement.one(n)
    for _ in range(n):
        num = ff_add(num, term)
        term = ff_mul(term, r)
    den = ff_sub(ff_mul(FFElement.const(n, a**n), ff_pow(yinv, n - 1)), ff_mul(FFElement.const(n, a**n + 1), Y))
    lhs = ff_inverse(ff_sub(ff_mul(FFElement.const(n, a), X), Y))
    rhs = ff_mul(num, ff_inverse(den))
    product = ff_mul(ff_sub(ff_mul(FFElement.const(n, a), X), Y), rhs)
    return lhs == rhs and product == FFElement.one(n)
