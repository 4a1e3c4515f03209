"""Exact univariate integer polynomials.

``IntPoly`` is the atom of every computation in the package: minimal
polynomials of algebraic numbers, the coefficients of function-field
elements, eliminants of critical loci.  Heavy kernels (factorization over
Z and F_p, resultants) are delegated to FLINT; everything else is plain
Python integers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Sequence

import flint


class PolynomialError(ValueError):
    pass


def _strip(coeffs: Iterable[int]) -> tuple[int, ...]:
    c = [int(a) for a in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class IntPoly:
    """Polynomial with integer coefficients, lowest degree first."""

    coeffs: tuple[int, ...] = ()

    def __init__(self, coeffs: Iterable[int] = ()):
        object.__setattr__(self, "coeffs", _strip(coeffs))

    # construction -------------------------------------------------------
    @classmethod
    def x(cls) -> "IntPoly":
        return cls((0, 1))

    @classmethod
    def const(cls, c: int) -> "IntPoly":
        return cls((c,))

    @classmethod
    def from_roots(cls, roots: Sequence[int]) -> "IntPoly":
        out = cls((1,))
        for r in roots:
            out = out * cls((-r, 1))
        return out

    @classmethod
    def from_flint(cls, f) -> "IntPoly":
        return cls(int(c) for c in f.coeffs())

    @classmethod
    def parse(cls, text: str) -> "IntPoly":
        return parse_poly(text)

    def to_flint(self) -> flint.fmpz_poly:
        return flint.fmpz_poly(list(self.coeffs))

    def to_fmpq(self) -> flint.fmpq_poly:
        return flint.fmpq_poly(list(self.coeffs))

    # basic properties ---------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def content(self) -> int:
        return reduce(gcd, self.coeffs, 0)

    def primitive(self) -> "IntPoly":
        """Content 1 and positive leading coefficient (zero stays zero)."""
        if not self.coeffs:
            return self
        c = self.content()
        if self.lc < 0:
            c = -c
        return IntPoly(a // c for a in self.coeffs)

    def is_primitive(self) -> bool:
        return self.is_zero() or (self.content() == 1 and self.lc > 0)

    def height(self) -> int:
        """Max absolute coefficient."""
        return max((abs(a) for a in self.coeffs), default=0)

    # arithmetic ---------------------------------------------------------
    def __add__(self, other: "IntPoly | int") -> "IntPoly":
        other = _coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPoly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self) -> "IntPoly":
        return IntPoly(-a for a in self.coeffs)

    def __sub__(self, other: "IntPoly | int") -> "IntPoly":
        return self + (-_coerce(other))

    def __rsub__(self, other: "IntPoly | int") -> "IntPoly":
        return _coerce(other) - self

    def __mul__(self, other: "IntPoly | int") -> "IntPoly":
        other = _coerce(other)
        if not self.coeffs or not other.coeffs:
            return IntPoly()
        if len(self.coeffs) * len(other.coeffs) > 400:
            return IntPoly.from_flint(self.to_flint() * other.to_flint())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "IntPoly":
        if k < 0:
            raise PolynomialError("negative power")
        return IntPoly.from_flint(self.to_flint() ** k)

    def scale(self, c: int) -> "IntPoly":
        return IntPoly(c * a for a in self.coeffs)

    def exact_div(self, other: "IntPoly") -> "IntPoly":
        """Quotient over Z; raises unless division is exact."""
        q, r = divmod(self.to_flint(), other.to_flint())
        if not r.is_zero():
            raise PolynomialError(f"{other} does not divide {self}")
        return IntPoly.from_flint(q)

    def divides(self, other: "IntPoly") -> bool:
        """True if self divides other over Q."""
        if self.is_zero():
            return other.is_zero()
        return (other.to_fmpq() % self.to_fmpq()).is_zero()

    def derivative(self) -> "IntPoly":
        return IntPoly(i * a for i, a in enumerate(self.coeffs) if i)

    def reverse(self, degree: int | None = None) -> "IntPoly":
        d = self.degree if degree is None else degree
        c = self.coeffs + (0,) * (d + 1 - len(self.coeffs))
        return IntPoly(reversed(c))

    def shift(self, a: int) -> "IntPoly":
        """f(x + a)."""
        return self.compose(IntPoly((a, 1)))

    def compose(self, g: "IntPoly") -> "IntPoly":
        out = IntPoly()
        for c in reversed(self.coeffs):
            out = out * g + c
        return out

    def __call__(self, v):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * v + c
        return acc

    def eval_fraction(self, v: Fraction) -> Fraction:
        return Fraction(self(Fraction(v)))

    def homogeneous_eval(self, num: int, den: int, degree: int | None = None) -> int:
        """den^d * f(num/den) for d = degree (defaults to deg f)."""
        d = self.degree if degree is None else degree
        return sum(c * num**i * den ** (d - i) for i, c in enumerate(self.coeffs))

    def mod_p(self, p: int) -> flint.nmod_poly:
        return flint.nmod_poly([c % p for c in self.coeffs], p)

    # misc ---------------------------------------------------------------
    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"IntPoly({format_poly(self)!r})"

    def sort_key(self):
        return (self.degree, self.coeffs)


def _coerce(v) -> IntPoly:
    if isinstance(v, IntPoly):
        return v
    if isinstance(v, int):
        return IntPoly((v,))
    raise TypeError(f"cannot coerce {type(v).__name__} to IntPoly")


# ---------------------------------------------------------------------------
# text format

_TERM = re.compile(
    r"""\s*(?P<sign>[+-])?\s*
        (?:(?P<coef>\d+)\s*\*?\s*)?
        (?:(?P<var>[a-zA-Z])(?:\s*(?:\^|\*\*)\s*(?P<exp>\d+))?)?\s*""",
    re.VERBOSE,
)


def parse_poly(text: str, var: str | None = None) -> IntPoly:
    """Parse sparse text like ``"x^4 - 10*x^2 + 1"``."""
    s = text.strip()
    if not s:
        raise PolynomialError("empty polynomial")
    pos = 0
    coeffs: dict[int, int] = {}
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None or m.end() == pos:
            raise PolynomialError(f"cannot parse polynomial at column {pos}: {text!r}")
        sign, coef, v, exp = m.group("sign", "coef", "var", "exp")
        if coef is None and v is None:
            raise PolynomialError(f"dangling sign at column {pos}: {text!r}")
        if sign is None and not first:
            raise PolynomialError(f"missing operator at column {pos}: {text!r}")
        if v is not None:
            if var is None:
                var = v
            elif v != var:
                raise PolynomialError(f"mixed variables {var!r} and {v!r}")
        c = int(coef) if coef is not None else 1
        if sign == "-":
            c = -c
        e = (int(exp) if exp is not None else 1) if v is not None else 0
        coeffs[e] = coeffs.get(e, 0) + c
        pos = m.end()
        first = False
    deg = max(coeffs) if coeffs else 0
    return IntPoly(coeffs.get(i, 0) for i in range(deg + 1))


def format_poly(f: IntPoly, var: str = "x") -> str:
    if f.is_zero():
        return "0"
    parts = []
    for e in range(f.degree, -1, -1):
        c = f.coeffs[e]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if e == 0:
            body = str(a)
        else:
            mono = var if e == 1 else f"{var}^{e}"
            body = mono if a == 1 else f"{a}*{mono}"
        parts.append((sign, body))
    head_sign, head = parts[0]
    out = ("-" if head_sign == "-" else "") + head
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------------
# operations


def poly_gcd(f: IntPoly, g: IntPoly) -> IntPoly:
    """Primitive gcd over Q (positive leading coefficient)."""
    if f.is_zero() and g.is_zero():
        return IntPoly()
    if f.is_zero():
        return g.primitive()
    if g.is_zero():
        return f.primitive()
    return IntPoly.from_flint(f.to_flint().gcd(g.to_flint())).primitive()


def resultant(f: IntPoly, g: IntPoly) -> int:
    """Sylvester resultant Res(f, g)."""
    if f.is_zero() or g.is_zero():
        raise PolynomialError("resultant of the zero polynomial")
    if f.degree == 0:
        return f.lc ** g.degree
    if g.degree == 0:
        return g.lc ** f.degree
    return int(f.to_flint().resultant(g.to_flint()))


def sylvester_matrix(f: IntPoly, g: IntPoly) -> list[list[int]]:
    m, n = f.degree, g.degree
    size = m + n
    rows = []
    fc = list(reversed(f.coeffs))
    gc = list(reversed(g.coeffs))
    for i in range(n):
        rows.append([0] * i + fc + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + gc + [0] * (size - n - 1 - i))
    return rows


def discriminant(f: IntPoly) -> int:
    """(-1)^(d(d-1)/2) Res(f, f') / lc(f)."""
    d = f.degree
    if d < 1:
        raise PolynomialError("discriminant of a constant polynomial")
    if d == 1:
        return 1
    r = resultant(f, f.derivative())
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    q, rem = divmod(sign * r, f.lc)
    assert rem == 0
    return q


def is_prime(p: int) -> bool:
    return p >= 2 and flint.fmpz(p).is_prime()


def factor_mod_p(f: IntPoly, p: int) -> list[tuple[IntPoly, int]]:
    """Monic irreducible factorization over F_p; coefficients in [0, p)."""
    if not is_prime(p):
        raise PolynomialError(f"{p} is not prime")
    if f.is_zero() or f.lc % p == 0:
        raise PolynomialError(f"p={p} divides the leading coefficient")
    if f.degree == 0:
        return []
    _, facs = f.mod_p(p).factor()
    out = [(IntPoly(int(c) for c in g.coeffs()), int(e)) for g, e in facs]
    out.sort(key=lambda t: (t[0].sort_key(), t[1]))
    return out


def factor_with_content(f: IntPoly) -> tuple[int, list[tuple[IntPoly, int]]]:
    """f = content * prod(g^e) with every g primitive, lc > 0, irreducible."""
    if f.is_zero():
        return 0, []
    c, facs = f.to_flint().factor()
    c = int(c)
    out = []
    for g, e in facs:
        gi = IntPoly.from_flint(g)
        if gi.lc < 0:
            gi = -gi
            if e % 2:
                c = -c
        out.append((gi, int(e)))
    out.sort(key=lambda t: (t[0].sort_key(), t[1]))
    return c, out


def factor_over_int(f: IntPoly) -> list[tuple[IntPoly, int]]:
    """Irreducible factors over Z, content stripped, deterministic order."""
    return factor_with_content(f)[1]


def squarefree_part(f: IntPoly) -> IntPoly:
    out = IntPoly((1,))
    for g, _ in factor_over_int(f):
        if g.degree > 0:
            out = out * g
    return out


def is_irreducible(f: IntPoly) -> bool:
    facs = factor_over_int(f)
    return len(facs) == 1 and facs[0][1] == 1 and facs[0][0].degree == f.degree


def nmod_to_intpoly(g: flint.nmod_poly) -> IntPoly:
    return IntPoly(int(c) for c in g.coeffs())


def fmpq_poly_to_parts(f: flint.fmpq_poly) -> tuple[IntPoly, int]:
    """Return (integer numerator, positive denominator)."""
    return IntPoly(int(c) for c in f.numer().coeffs()), int(f.denom())
