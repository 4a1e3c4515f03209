"""Height comparison between two functions on C_n via an integral dependency.

A relation sum c_ij f^i g^j = 0 with integer c_ij turns into

    h(f(Q)) <= a(H) h(g(Q)) + b(H),   a(H) = 4 H^3,

for every point Q.  The kernel search runs on the matrix obtained by
clearing denominators and collecting monomials x^k y^l (l < n), and every
dependency is re-checked with exact function-field arithmetic.

The smallest L' <= L = ceil(4 H^3) that yields a kernel is used; L itself is
only needed to guarantee that one exists, and the dimension count for L is
asserted before the search starts.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import flint

from .algebraic import AlgebraicNumber, weil_height
from .fermat import FFElement, ff_add, ff_complexity, ff_mul, ff_pow
from .fermat_local import CurvePoint, ff_evaluate
from .intervals import fmt_interval
from .intlinalg import IntMatrix, integer_kernel, siegel_bound
from .polys import IntPoly


class DependencyError(ArithmeticError):
    pass


@dataclass
class Dependency:
    L: int  # the guaranteed size ceil(4 H^3)
    L_used: int  # the size at which the kernel was found
    coeffs: list[list[int]]  # c[i][j], i indexes powers of f, j powers of g
    siegel_bound: float
    rows: int
    cols: int
    verified: bool = False

    def nonzero(self) -> dict[tuple[int, int], int]:
        return {(i, j): c for i, row in enumerate(self.coeffs) for j, c in enumerate(row) if c}

    def to_json(self) -> dict:
        return {
            "L": self.L,
            "L_used": self.L_used,
            "coeffs": [[str(c) for c in row] for row in self.coeffs],
            "siegel_bound": self.siegel_bound,
            "matrix": [self.rows, self.cols],
            "verified": self.verified,
        }


def _clear(f: FFElement) -> tuple[list[flint.fmpz_poly], flint.fmpz_poly]:
    """(P_0..P_{n-1}, D) with f = sum P_l y^l / D, all in Z[x]."""
    D = flint.fmpz_poly([1])
    for c in f.coeffs:
        if not c.is_zero():
            D = D * c.den // D.gcd(c.den)
    return [c.num * (D // c.den) if not c.is_zero() else flint.fmpz_poly([]) for c in f.coeffs], D


def _mul(n: int, a: list, b: list) -> list:
    """Product in Z[x][y]/(y^n + x^n - 1)."""
    out = [flint.fmpz_poly([]) for _ in range(2 * n - 1)]
    for i, p in enumerate(a):
        if p.is_zero():
            continue
        for j, q in enumerate(b):
            if not q.is_zero():
                out[i + j] += p * q
    fold = flint.fmpz_poly([1] + [0] * (n - 1) + [-1])  # y^n = 1 - x^n
    for k in range(2 * n - 2, n - 1, -1):
        if not out[k].is_zero():
            out[k - n] += out[k] * fold
            out[k] = flint.fmpz_poly([])
    return out[:n]


def _scale(a: list, p: flint.fmpz_poly) -> list:
    return [c * p for c in a]


def dependency_matrix(f: FFElement, g: FFElement, L: int) -> tuple[list[list[int]], list[tuple[int, int]]]:
    """Rows = monomials x^k y^l, columns = (i, j) for 0 <= i, j < L."""
    n = f.n
    Pf, Df = _clear(f)
    Pg, Dg = _clear(g)
    one = [flint.fmpz_poly([1])] + [flint.fmpz_poly([]) for _ in range(n - 1)]
    fp, gp = [one], [one]
    dfp, dgp = [flint.fmpz_poly([1])], [flint.fmpz_poly([1])]
    for _ in range(L - 1):
        fp.append(_mul(n, fp[-1], Pf))
        gp.append(_mul(n, gp[-1], Pg))
        dfp.append(dfp[-1] * Df)
        dgp.append(dgp[-1] * Dg)
    cols = [(i, j) for i in range(L) for j in range(L)]
    vectors = []
    for i, j in cols:
        t = _mul(n, _scale(fp[i], dfp[L - 1 - i]), _scale(gp[j], dgp[L - 1 - j]))
        vectors.append({(k, l): int(c) for l, p in enumerate(t) for k, c in enumerate(p.coeffs()) if c})
    monomials = sorted({m for v in vectors for m in v})
    rows = [[v.get(m, 0) for v in vectors] for m in monomials]
    return rows, cols


def evaluate_dependency(f: FFElement, g: FFElement, coeffs: Sequence[Sequence[int]]) -> FFElement:
    """sum c_ij f^i g^j, computed with function-field arithmetic."""
    n = f.n
    total = FFElement.zero(n)
    for i, row in enumerate(coeffs):
        if not any(row):
            continue
        inner = FFElement.zero(n)
        for j in range(len(row) - 1, -1, -1):  # Horner in g
            inner = ff_add(ff_mul(inner, g), FFElement.const(n, row[j]))
        total = ff_add(total, ff_mul(ff_pow(f, i), inner))
    return total


def required_L(H) -> int:
    return math.ceil(4 * Fraction(H) ** 3) if not isinstance(H, float) else math.ceil(4 * H**3)


def find_dependency(f: FFElement, g: FFElement, H=None, max_L: int | None = None) -> Dependency:
    if f.n != g.n:
        raise ValueError("f and g live on different curves")
    if f.is_constant() or g.is_constant():
        raise ValueError("f and g must be non-constant")
    if H is None:
        H = max(ff_complexity(f).H_ceil, ff_complexity(g).H_ceil)
    Hc = math.ceil(H)
    L = 4 * Hc**3
    # the guaranteed system: at most 2 H^3 L equations in L^2 unknowns
    assert L * L > 2 * Hc**3 * L, "dimension count failed"
    top = L if max_L is None else min(L, max_L)
    for Lp in range(2, top + 1):
        rows, cols = dependency_matrix(f, g, Lp)
        M = IntMatrix.from_rows(rows, len(cols))
        kernel = integer_kernel(M)
        if not kernel:
            continue
        v = min(kernel, key=lambda w: (max(abs(a) for a in w), sum(1 for a in w if a)))
        coeffs = [[0] * Lp for _ in range(Lp)]
        for (i, j), c in zip(cols, v):
            coeffs[i][j] = c
        if not evaluate_dependency(f, g, coeffs).is_zero():
            raise DependencyError("kernel vector does not vanish in the function field")
        sb = siegel_bound(M.rows, M.cols, M.max_entry()) if M.cols > M.rows else float("inf")
        return Dependency(L, Lp, coeffs, sb, M.rows, M.cols, verified=True)
    if top < L:
        raise DependencyError(f"no dependency with L' <= {top}")
    raise DependencyError("kernel unexpectedly trivial: matrix assembly bug")


# ---------------------------------------------------------------------------
# constants


@dataclass
class ComparisonConstants:
    a: float
    b: float
    m: int
    l: int
    q: float
    H: int
    reduced: list[list[int]] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "m": self.m, "deg_g": self.l, "q": self.q, "H": self.H}


def _remove_g_content(coeffs: list[list[int]]) -> list[list[int]]:
    """Divide out the gcd over i of the polynomials sum_j c_ij Y^j."""
    polys = [flint.fmpz_poly(row) for row in coeffs]
    g = flint.fmpz_poly([])
    for p in polys:
        if not p.is_zero():
            g = p if g.is_zero() else g.gcd(p)
    if g.degree() <= 0:
        c = abs(int(g.coeffs()[0])) if not g.is_zero() else 1
        return [[x // c for x in row] for row in coeffs]
    width = len(coeffs[0])
    out = []
    for p in polys:
        q = p // g if not p.is_zero() else flint.fmpz_poly([])
        cs = [int(c) for c in q.coeffs()]
        out.append(cs + [0] * (width - len(cs)))
    return out


def comparison_constants(dep: Dependency, H) -> ComparisonConstants:
    """a = 4 H^3 and b = q + 6 log H + 5 log 2.

    With P(X, Y) = sum c_ij X^i Y^j, the Y-content removed, m = deg_X P and
    l = deg_Y P < 4 H^3: at any Q the value f(Q) is a root of the nonzero
    polynomial P(X, g(Q)) (homogenised when g(Q) = inf), whose coefficient
    vector has height <= l h(g(Q)) + log max|c| + log(l + 1).  A root has
    height at most that plus m log 2, so q := log max|c| + log(l+1) + m log 2
    already bounds h(f(Q)) - l h(g(Q)).
    """
    red = _remove_g_content(dep.coeffs)
    rows = [i for i, row in enumerate(red) if any(row)]
    if not rows or max(rows) == 0:
        raise DependencyError("no c_ij with i > 0: f is constant")
    m = max(rows)
    l = max(j for row in red for j, c in enumerate(row) if c)
    cmax = max(abs(c) for row in red for c in row)
    q = math.log(cmax) + math.log(l + 1) + m * math.log(2)
    Hc = math.ceil(H)
    a = 4.0 * Hc**3
    assert m < a and l < a
    b = q + 6 * math.log(Hc) + 5 * math.log(2)
    return ComparisonConstants(a, b, m, l, q, Hc, red)


# ---------------------------------------------------------------------------
# sampling


def sample_points(n: int, count: int, seed: int = 0, height: int = 12) -> list[CurvePoint]:
    """Points (x0, y0) with x0 rational and y0 an n-th root of 1 - x0^n."""
    rng = random.Random(seed)
    out: list[CurvePoint] = []
    while len(out) < count:
        den = rng.randint(1, height)
        num = rng.randint(-height, height)
        x0 = Fraction(num, den)
        if x0 in (0, 1, -1):
            continue
        r = 1 - x0**n
        # y^n = r, cleared: den^n y^n - num' = 0
        poly = IntPoly([-(r.numerator)] + [0] * (n - 1) + [r.denominator])
        target = complex(abs(float(r)) ** (1.0 / n), 0.0)
        if r < 0 and n % 2 == 0:
            target = complex(0.0, abs(float(r)) ** (1.0 / n))
        elif r < 0:
            target = -target
        y0 = AlgebraicNumber.root_near(poly, target)
        out.append(CurvePoint(n, AlgebraicNumber.rational(x0), y0))
    return out


@dataclass
class ComparisonReport:
    rows: list[dict]
    holds: bool

    def to_json(self) -> dict:
        return {"holds": self.holds, "samples": self.rows}


def verify_comparison(
    f: FFElement, g: FFElement, constants: ComparisonConstants, samples: Sequence[CurvePoint]
) -> ComparisonReport:
    rows = []
    ok = True
    a = flint.arb(constants.a)
    b = flint.arb(constants.b)
    for Q in samples:
        fq = ff_evaluate(f, Q)
        gq = ff_evaluate(g, Q)
        hf = flint.arb(0) if fq.is_infinity else weil_height(fq.alpha)
        hg = flint.arb(0) if gq.is_infinity else weil_height(gq.alpha)
        rhs = a * hg + b
        slack = rhs - hf
        width = 2 * (hf.rad() + rhs.rad())
        holds = bool((slack + width).lower() >= 0)
        ok = ok and holds
        rows.append(
            {
                "point": str(Q),
                "h_f": fmt_interval(hf, 12),
                "h_g": fmt_interval(hg, 12),
                "rhs": fmt_interval(rhs, 12),
                "holds": holds,
            }
        )
    return ComparisonReport(rows, ok)
