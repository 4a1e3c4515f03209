"""Helpers around FLINT ball arithmetic (arb/acb)."""

from __future__ import annotations

import math
from contextlib import contextmanager
from fractions import Fraction

import flint

DEFAULT_PREC = 64


@contextmanager
def working_precision(bits: int):
    with flint.ctx.workprec(int(bits)):
        yield


def bits_for_width(width) -> int:
    """Working precision that comfortably resolves intervals of ``width``."""
    w = float(width)
    if w <= 0:
        raise ValueError("precision width must be positive")
    return max(DEFAULT_PREC, int(math.ceil(-math.log2(w))) + 30)


def arb_to_fraction(x: flint.arb) -> Fraction:
    m, e = x.man_exp()
    m, e = int(m), int(e)
    return Fraction(m) * (Fraction(2) ** e)


def arb_bounds(x: flint.arb) -> tuple[Fraction, Fraction]:
    return arb_to_fraction(x.lower()), arb_to_fraction(x.upper())


def arb_from_fraction(q: Fraction) -> flint.arb:
    q = Fraction(q)
    return flint.arb(flint.fmpq(q.numerator, q.denominator))


def arb_interval(lo, hi) -> flint.arb:
    """Smallest ball containing [lo, hi] (exact rationals or arbs)."""
    a = lo if isinstance(lo, flint.arb) else arb_from_fraction(lo)
    b = hi if isinstance(hi, flint.arb) else arb_from_fraction(hi)
    return a.union(b)


def width(x: flint.arb) -> float:
    return 2 * float(x.rad())


def fmt_interval(x: flint.arb, digits: int = 12) -> list[str]:
    """[lo, hi] as decimal strings rounded outward."""
    lo, hi = arb_bounds(x)
    return [_fmt_dec(lo, digits, down=True), _fmt_dec(hi, digits, down=False)]


def _fmt_dec(q: Fraction, digits: int, down: bool) -> str:
    scale = 10**digits
    n = q * scale
    k = math.floor(n) if down else math.ceil(n)
    s = f"{abs(k) // scale}.{abs(k) % scale:0{digits}d}"
    s = s.rstrip("0").rstrip(".") if "." in s else s
    if s == "":
        s = "0"
    return ("-" if k < 0 else "") + s


def certainly_le(a: flint.arb, b: flint.arb) -> bool:
    return bool(a <= b)


def certainly_lt(a: flint.arb, b: flint.arb) -> bool:
    return bool(a < b)


def frac_str(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_fraction(s: str) -> Fraction:
    return Fraction(s.strip())


def log_arb(q) -> flint.arb:
    """Natural log of a positive rational or integer."""
    return arb_from_fraction(Fraction(q)).log()
