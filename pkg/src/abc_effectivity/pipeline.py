"""The effectivity engine: parameters, the constants (eta, c, C) and per-point
reduction traces.

The restricted inequality constant A(d, eps) is an input (``A_oracle``): the
reduction assumes it, so every step that uses it is reported as conditional.
Z_1..Z_6 are closed forms chosen by this implementation and carried in the
report with a formula id; Z_7 is proved below; see ``Z_FORMULAS``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import flint

from .algebraic import AlgebraicNumber, PlaceQ, ProjPoint, chordal_distance, roots_of
from .belyi import BelyiFamily, disjoint_family, orbit_points
from .comparison import comparison_constants, find_dependency
from .fermat import FFElement, ff_complexity, ff_pow
from .fermat_local import CurvePoint, ff_evaluate
from .heights import (
    conductor,
    conductor_pullback,
    height_point,
    in_compact_set,
    log_root_disc,
    log_root_disc_field,
)
from .intervals import arb_bounds, arb_from_fraction, fmt_interval, frac_str
from .polys import IntPoly, factor_over_int


def _arb(x) -> flint.arb:
    return arb_from_fraction(x) if isinstance(x, Fraction) else flint.arb(x)


# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class PipelineParams:
    d: int
    eps: Fraction
    places: tuple[PlaceQ, ...]
    n: int
    m: int
    demo_mode: bool = False

    @property
    def dn2_within_150(self) -> bool:
        return self.d * self.n**2 <= 150 * self.d / self.eps**2

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "eps": frac_str(self.eps),
            "places": [str(v) for v in self.places],
            "n": self.n,
            "m": self.m,
            "demo_mode": self.demo_mode,
            "dn2_le_150d_over_eps2": self.dn2_within_150,
            "three_over_n_lt_half_eps": Fraction(3, self.n) < self.eps / 2,
        }


def parameters(d: int, eps, places: Sequence[PlaceQ], n_override: int | None = None, m_override: int | None = None) -> PipelineParams:
    eps = Fraction(eps)
    if not (0 < eps < 1):
        raise ValueError("eps must lie in (0, 1)")
    if d < 1:
        raise ValueError("d must be positive")
    places = tuple(dict.fromkeys(places))
    if not places:
        raise ValueError("the set of places must be nonempty")
    n = 6 * math.ceil(1 / eps)
    m = len(places) * d * n * n + 1
    demo = False
    if n_override is not None:
        if not 2 <= n_override <= 5:
            raise ValueError("demo n must lie in 2..5")
        n, demo = n_override, True
        m = m_override if m_override is not None else len(places) * d * n * n + 1
    elif m_override is not None:
        raise ValueError("m can only be overridden in demo mode")
    return PipelineParams(d, eps, places, n, m, demo)


# ---------------------------------------------------------------------------
# the small epsilon and its defining inequality


@dataclass(frozen=True)
class EpsilonCheck:
    eps_prime: Fraction
    lhs: Fraction | None  # None when 1 - 8 eps' M^3 <= 0
    rhs: Fraction
    holds: bool

    def to_json(self) -> dict:
        return {
            "eps_prime": frac_str(self.eps_prime),
            "lhs": None if self.lhs is None else frac_str(self.lhs),
            "lhs_approx": None if self.lhs is None else float(self.lhs),
            "rhs": frac_str(self.rhs),
            "rhs_approx": float(self.rhs),
            "holds": self.holds,
        }


def epsilon_condition(e: Fraction, eps: Fraction, M: Fraction, n: int) -> EpsilonCheck:
    """(1 + e)/(1 - 8 e M^3) < (1 - 3/n)(1 + eps), decided exactly."""
    rhs = (1 - Fraction(3, n)) * (1 + eps)
    den = 1 - 8 * e * M**3
    if den <= 0:
        return EpsilonCheck(e, None, rhs, False)
    lhs = (1 + e) / den
    return EpsilonCheck(e, lhs, rhs, lhs < rhs)


def epsilon_prime(eps, M, n: int | None = None) -> tuple[Fraction, EpsilonCheck]:
    """(eps - eps^2)/(2 + 8 M^3), with the inequality it is meant to satisfy."""
    eps, M = Fraction(eps), Fraction(M)
    if not (0 < eps < 1) or M < 1:
        raise ValueError("need eps in (0, 1) and M >= 1")
    if n is None:
        n = 6 * math.ceil(1 / eps)
    e = (eps - eps**2) / (2 + 8 * M**3)
    return e, epsilon_condition(e, eps, M, n)


def repaired_epsilon(eps, M, n: int) -> tuple[Fraction, EpsilonCheck]:
    """A value that does satisfy the inequality whenever (1-3/n)(1+eps) > 1.

    With R = (1-3/n)(1+eps), the inequality is e (1 + 8 R M^3) < R - 1;
    half of the right-hand ratio is used.
    """
    eps, M = Fraction(eps), Fraction(M)
    R = (1 - Fraction(3, n)) * (1 + eps)
    if R <= 1:
        raise ValueError("(1 - 3/n)(1 + eps) <= 1: no positive value works")
    e = (R - 1) / (2 * (1 + 8 * R * M**3))
    return e, epsilon_condition(e, eps, M, n)


# ---------------------------------------------------------------------------
# the Z functions


Z_FORMULAS = {
    "Z(H)": "Z-generic-v1: Z(H) = 4 H^2 log(4H)  (pluggable; not derived in closed form)",
    "Z1": "Z1 = Z(M)",
    "Z2": "Z2 = (1 + c) Z(M)",
    "Z3": "Z3 = Z2 + (1 + c) Z1",
    "Z4": "Z4 = Z3 + c b(M)",
    "Z5": "Z5 = Z4 / (1 - 8 c M^3)",
    "Z6": "Z6 = Z5 / (1 - 3/n)",
    "Z7": "Z7(n) = sum_{p | n} (1 + floor(log_p n^2)) log p  (different bound for Kummer layers)",
    "C": "C = Z6 + 2 Z7(n)",
    "b(M)": "b(M) = log(L M) + M log 2 + 6 log M + 5 log 2 with L = 4 M^3 (worst case of the comparison constant)",
}


def Z_generic(H) -> float:
    H = float(H)
    return 4 * H * H * math.log(4 * H)


def Z7(n: int) -> flint.arb:
    """Wild part of d(Q) + cond(Q) - d(P) - cond(P) for Q over P on C_n.

    For p | n and a place w of Q(Q) over p, the relative different exponent
    is at most e_w - 1 + e_w^abs v_p(e_w), and e_w <= n^2.
    """
    total = flint.arb(0)
    m = n
    p = 2
    while m > 1:
        if m % p == 0:
            while m % p == 0:
                m //= p
            k = 0
            while p ** (k + 1) <= n * n:
                k += 1
            total += (1 + k) * flint.arb(p).log()
        p += 1
    return total


def b_worst(M) -> float:
    M = math.ceil(M)
    L = 4 * M**3
    return math.log(L * M) + M * math.log(2) + 6 * math.log(M) + 5 * math.log(2)


# ---------------------------------------------------------------------------
# kappa from the family


@dataclass
class KappaResult:
    kappa: Fraction
    liouville_floor: flint.arb
    min_direct: flint.arb | None
    worst_pair: tuple

    def to_json(self) -> dict:
        return {
            "kappa": frac_str(self.kappa),
            "kappa_approx": float(self.kappa),
            "liouville_floor": fmt_interval(self.liouville_floor, 12),
            "min_direct_distance": None if self.min_direct is None else fmt_interval(self.min_direct, 12),
            "worst_pair": [str(x) for x in self.worst_pair],
        }


def _floor_fraction(x: flint.arb, digits: int = 30) -> Fraction:
    scale = 10**digits
    lo, _ = arb_bounds(x)
    return Fraction(math.floor(lo * scale), scale)


def kappa_from_family(family: BelyiFamily, places: Sequence[PlaceQ], direct: bool = True) -> KappaResult:
    """Half the Liouville floor over cross-family branch-point pairs, capped at 1.

    A singleton family has an empty infimum; the convention is kappa = 1.
    """
    images = family.branch_images
    if len(images) < 2:
        return KappaResult(Fraction(1), flint.arb(1), None, ())
    pts = [[P for o in img for P in orbit_points(o)] for img in images]
    floor = None
    worst = ()
    min_direct = None
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            for a in pts[i]:
                for b in pts[j]:
                    if a == b:
                        raise ValueError("family branch images overlap")
                    bound = -(a.degree * b.degree * (height_point(a) + height_point(b) + flint.arb(2).log()))
                    val = bound.exp()
                    if floor is None or val.upper() < floor.upper():
                        floor, worst = val, (a, b)
                    if direct:
                        for v in places:
                            dlt = chordal_distance(a, b, v)
                            if min_direct is None or dlt.lower() < min_direct.lower():
                                min_direct = dlt
    kappa = min(Fraction(1), _floor_fraction(floor / 2))
    # strict: delta > 2 kappa
    kappa = kappa * Fraction(999, 1000)
    if kappa <= 0:
        raise ArithmeticError("kappa underflowed; raise the digit budget")
    return KappaResult(kappa, floor, min_direct, worst)


# ---------------------------------------------------------------------------
# choosing Q over P and the index i


def _compose_power(f: IntPoly, n: int) -> IntPoly:
    """f(X^n)."""
    return IntPoly([f.coeffs[k // n] if k % n == 0 else 0 for k in range(f.degree * n + 1)])


def preimage(n: int, P: ProjPoint) -> CurvePoint:
    """The point Q in pi^{-1}(P) whose coordinate boxes sort first."""
    if P.is_special():
        raise ValueError("P must avoid {0, 1, inf}")
    alpha = P.alpha
    rho = alpha.minpoly
    cand = []
    xpoly = _compose_power(rho, n)
    a_c = alpha.to_complex()
    for g, _ in factor_over_int(xpoly):
        if g.degree == 0:
            continue
        for x0 in roots_of(g):
            if abs(x0.to_complex() ** n - a_c) < 1e-8 * max(1.0, abs(a_c)):
                cand.append(x0)
    cand.sort(key=lambda z: (round(z.to_complex().real, 12), round(z.to_complex().imag, 12)))
    x0 = cand[0]
    one_minus = AlgebraicNumber.rational(1) - alpha
    sigma = one_minus.minpoly
    ypoly = _compose_power(sigma, n)
    target = complex(one_minus.to_complex()) ** (1.0 / n)
    y0 = AlgebraicNumber.root_near(ypoly, target)
    return CurvePoint(n, x0, y0)


@dataclass
class Selection:
    index: int
    tried: list[dict]
    blocked_bound: int
    m: int

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "tried": self.tried,
            "pigeonhole": {"places_d_n2": self.blocked_bound, "m": self.m, "guaranteed": self.blocked_bound < self.m},
        }


def select_index(P: ProjPoint, family: BelyiFamily, kappa, places: Sequence[PlaceQ], d: int = 1, Q: CurvePoint | None = None) -> Selection:
    """First i with every conjugate of f_i(Q) kappa-away from {0, 1, inf} at all v."""
    n = family.n
    Q = Q or preimage(n, P)
    tried = []
    for i, f in enumerate(family.maps, start=1):
        val = ff_evaluate(f, Q)
        ok = (not val.is_special()) and in_compact_set(val, places, kappa)
        tried.append({"i": i, "value": str(val), "in_compact_set": ok})
        if ok:
            return Selection(i, tried, len(places) * d * n * n, family.count)
    raise ArithmeticError("no index selected: pigeonhole invariant broken")


# ---------------------------------------------------------------------------
# Riemann-Hurwitz heights


def rh_heights(n: int, Q: CurvePoint) -> tuple[flint.arb, flint.arb, flint.arb]:
    """(h_R, h_K, h(pi(Q))) with h_R = 3(1-1/n) h and h_K = (1-3/n) h."""
    piQ = ff_evaluate(ff_pow(FFElement.x(n), n), Q)
    if piQ.is_special():
        raise ValueError("Q lies over {0, 1, inf}")
    h = height_point(piQ)
    hR = 3 * (1 - flint.arb(1) / n) * h
    hK = (1 - flint.arb(3) / n) * h
    diff = hR - hK - 2 * h
    assert diff.contains(0), "Riemann-Hurwitz identity failed"
    return hR, hK, h


# ---------------------------------------------------------------------------
# report


@dataclass
class EffectivityReport:
    params: PipelineParams
    eta: Fraction
    kappa: KappaResult
    M: Fraction
    c: Fraction
    eps_check: EpsilonCheck
    repaired: tuple[Fraction, EpsilonCheck] | None
    Z_ledger: list[tuple[str, str, flint.arb]]
    C: flint.arb
    family: BelyiFamily | None

    @property
    def demo_mode(self) -> bool:
        return self.params.demo_mode

    def to_json(self, ledger: bool = True) -> dict:
        out = {
            "params": self.params.to_json(),
            "demo_mode": self.demo_mode,
            "eta": frac_str(self.eta),
            "eta_approx": float(self.eta),
            "kappa": self.kappa.to_json(),
            "M": frac_str(self.M),
            "c": frac_str(self.c),
            "eps_prime": frac_str(self.c),
            "epsilon_check": self.eps_check.to_json(),
            "epsilon_check_repaired": None if self.repaired is None else self.repaired[1].to_json(),
            "C": fmt_interval(self.C, 12),
        }
        if ledger:
            out["Z_ledger"] = [
                {"name": name, "formula": formula, "value": fmt_interval(val, 12)} for name, formula, val in self.Z_ledger
            ]
        return out


def z_chain(M: Fraction, c: Fraction, n: int) -> tuple[list, flint.arb]:
    Mf = float(M)
    Zm = flint.arb(Z_generic(Mf))
    cc = _arb(c)
    Z1 = Zm
    Z2 = (1 + cc) * Zm
    Z3 = Z2 + (1 + cc) * Z1
    Z4 = Z3 + cc * flint.arb(b_worst(Mf))
    Z5 = Z4 / (1 - 8 * cc * _arb(M) ** 3)
    Z6 = Z5 / (1 - flint.arb(3) / n)
    z7 = Z7(n)
    C = Z6 + 2 * z7
    ledger = [
        ("Z(M)", Z_FORMULAS["Z(H)"], Zm),
        ("b(M)", Z_FORMULAS["b(M)"], flint.arb(b_worst(Mf))),
        ("Z1", Z_FORMULAS["Z1"], Z1),
        ("Z2", Z_FORMULAS["Z2"], Z2),
        ("Z3", Z_FORMULAS["Z3"], Z3),
        ("Z4", Z_FORMULAS["Z4"], Z4),
        ("Z5", Z_FORMULAS["Z5"], Z5),
        ("Z6", Z_FORMULAS["Z6"], Z6),
        ("Z7", Z_FORMULAS["Z7"], z7),
        ("C", Z_FORMULAS["C"], C),
    ]
    return ledger, C


def compute_constants(
    d: int,
    eps,
    places: Sequence[PlaceQ],
    n_override: int | None = None,
    m_override: int | None = None,
    family: BelyiFamily | None = None,
    degree_ceiling: int = 2000,
) -> EffectivityReport:
    params = parameters(d, eps, places, n_override, m_override)
    if family is None:
        family = disjoint_family(params.n, params.m, d=d, degree_ceiling=degree_ceiling)
    M = Fraction(math.ceil(family.M))
    kap = kappa_from_family(family, params.places)
    c, chk = epsilon_prime(params.eps, M, params.n)
    try:
        rep = repaired_epsilon(params.eps, M, params.n)
    except ValueError:
        rep = None  # demo n: (1 - 3/n)(1 + eps) <= 1
    ledger, C = z_chain(M, c, params.n)
    return EffectivityReport(params, kap.kappa, kap, M, c, chk, rep, ledger, C, family)


# ---------------------------------------------------------------------------
# reduction trace


@dataclass
class Step:
    name: str
    lhs: flint.arb
    rhs: flint.arb
    kind: str  # identity | unconditional | formula | conditional
    relation: str = "<="

    @property
    def holds(self) -> bool:
        if self.relation == "=":
            return bool((self.lhs - self.rhs).contains(0))
        return bool(self.lhs.upper() <= self.rhs.lower())

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "relation": self.relation,
            "lhs": fmt_interval(self.lhs, 12),
            "rhs": fmt_interval(self.rhs, 12),
            "holds": self.holds,
        }


@dataclass
class ReductionTrace:
    P: ProjPoint
    Q: CurvePoint
    index: int
    selection: Selection
    quantities: dict
    steps: list[Step]

    @property
    def unconditional_ok(self) -> bool:
        return all(s.holds for s in self.steps if s.kind in ("identity", "unconditional"))

    def step(self, name: str) -> Step:
        return next(s for s in self.steps if s.name == name)

    def to_json(self) -> dict:
        return {
            "P": str(self.P),
            "Q": str(self.Q),
            "index": self.index,
            "selection": self.selection.to_json(),
            "quantities": {k: fmt_interval(v, 12) if isinstance(v, flint.arb) else v for k, v in self.quantities.items()},
            "steps": [s.to_json() for s in self.steps],
            "unconditional_ok": self.unconditional_ok,
        }


def A_zero(d, eps) -> float:
    """Counterfactual A = 0, for exercising the plumbing only."""
    return 0.0


def reduce_point(
    P: ProjPoint,
    params: PipelineParams,
    family: BelyiFamily,
    A_oracle: Callable = A_zero,
    kappa=None,
    M=None,
) -> ReductionTrace:
    if P.is_special():
        raise ValueError("P must avoid {0, 1, inf}")
    if P.degree > params.d:
        raise ValueError("P has degree above d")
    n = params.n
    Q = preimage(n, P)
    lp = Q.local()
    theta = lp.theta
    if kappa is None:
        kappa = kappa_from_family(family, params.places, direct=False).kappa
    M = Fraction(math.ceil(family.M)) if M is None else Fraction(M)
    c, _ = epsilon_prime(params.eps, M, n)
    sel = select_index(P, family, kappa, params.places, params.d, Q)
    i = sel.index
    f = family.maps[i - 1]
    fQ = ff_evaluate(f, Q)
    log2 = flint.arb(2).log()

    hR, hK, hP = rh_heights(n, Q)
    hf = height_point(fQ)
    hE = hf - hK  # definition through the canonical-class identity
    dP = log_root_disc(P).value
    dQ_res = log_root_disc_field(theta)
    dQ = dQ_res.value
    dF = log_root_disc(fQ).value
    condP = conductor(P).value
    condF = conductor(fQ).value
    x0, y0 = Q.x0, Q.y0
    condQ_pi = conductor_pullback((x0, y0), P.alpha).value
    condQ_f = conductor_pullback((x0, y0), fQ.alpha).value
    z7 = Z7(n)
    Zm = flint.arb(Z_generic(float(M)))
    A1 = flint.arb(A_oracle(params.d * n * n, c))
    A2 = flint.arb(A_oracle(150 * params.d / params.eps**2, c))
    ledger, _ = z_chain(M, c, n)
    Z6 = dict((name, v) for name, _, v in ledger)["Z6"]
    cc = _arb(c)

    H = max(ff_complexity(f).H_ceil, n)
    dep = find_dependency(f, ff_pow(FFElement.x(n), n), H)
    cons = comparison_constants(dep, H)

    steps = [
        Step("ramification: h_R = 3(1 - 1/n) h(pi(Q))", hR, 3 * (1 - flint.arb(1) / n) * hP, "identity", "="),
        Step("canonical: h_K = (1 - 3/n) h(P)", hK, (1 - flint.arb(3) / n) * height_point(P), "identity", "="),
        Step("Riemann-Hurwitz: h_R - h_K = 2 h(P)", hR - hK, 2 * hP, "identity", "="),
        Step("pullback: h(f_i(Q)) - h_E = h_K", hf - hE, hK, "identity", "="),
        Step("disc + cond lower, f_i", dF + condF, dQ + condQ_f, "unconditional"),
        Step("disc + cond lower, pi", dP + condP, dQ + condQ_pi, "unconditional"),
        Step("cond(P) <= 3 h(P) + log 2 + Z_cond", condP, 3 * hP + log2, "unconditional"),
        Step("cond(f_i(Q)) <= 3 h(f_i(Q)) + log 2 + Z_cond", condF, 3 * hf + log2, "unconditional"),
        Step("cond_{f_i^*D}(Q) <= 3 h(f_i(Q)) + log 2 + Z_cond", condQ_f, 3 * hf + log2, "unconditional"),
        Step(
            "comparison: h(f_i(Q)) <= a h(pi(Q)) + b",
            hf,
            flint.arb(cons.a) * hP + flint.arb(cons.b),
            "unconditional",
        ),
        Step("Kummer: d(Q) + cond_{pi^*D}(Q) <= d(P) + cond(P) + Z7(n)", dQ + condQ_pi, dP + condP + z7, "unconditional"),
        Step("pullback conductor: cond_{f_i^*D}(Q) <= h_E + Z1", condQ_f, hE + Zm, "formula"),
        Step("disc + cond upper, f_i", dQ + condQ_f, dF + condF + Zm, "formula"),
        Step("working: h(f_i(Q)) <= (1 + c)(cond + d)(f_i(Q)) + A(dn^2, c)", hf, (1 + cc) * (condF + dF) + A1, "conditional"),
        Step("final: h(P) <= (1 + eps) d(Q) + 2 A(150 d/eps^2, c) + Z6", hP, (1 + _arb(params.eps)) * dQ + 2 * A2 + Z6, "conditional"),
    ]
    quantities = {
        "h(P)": hP,
        "h(f_i(Q))": hf,
        "h_R": hR,
        "h_K": hK,
        "h_E": hE,
        "d(P)": dP,
        "d(Q)": dQ,
        "d(Q)_exact": dQ_res.exact,
        "d(f_i(Q))": dF,
        "cond(P)": condP,
        "cond(f_i(Q))": condF,
        "cond_pi*D(Q)": condQ_pi,
        "cond_fi*D(Q)": condQ_f,
        "Z7(n)": z7,
        "f_i(Q)": str(fQ),
        "comparison": cons.to_json(),
        "c": frac_str(c),
        "kappa": frac_str(Fraction(kappa)),
    }
    return ReductionTrace(P, Q, i, sel, quantities, steps)
