"""Command-line front end: ``abc-effectivity <command> ...``.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import re
import sys
from fractions import Fraction
from typing import Sequence

import flint

from . import __version__
from .algebraic import AlgebraicNumber, PlaceQ, ProjPoint
from .belyi import (
    BelyiCertificate,
    RationalMapP1,
    ResourceLimitExceeded,
    disjoint_family,
    noncritical_belyi,
    verify_certificate,
)
from .comparison import comparison_constants, find_dependency, sample_points, verify_comparison
from .fermat import ff_complexity, format_ff, parse_ff
from .heights import conductor, height_point, in_compact_set, log_root_disc
from .intervals import bits_for_width, fmt_interval, frac_str, working_precision
from .pipeline import A_zero, Z_FORMULAS, compute_constants, parameters, reduce_point
from .polys import PolynomialError, format_poly, parse_poly

SCHEMA = "1"
EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(ValueError):
    pass


class PointSyntaxError(UsageError):
    def __init__(self, text: str, pos: int, msg: str):
        super().__init__(f"{msg} at column {pos + 1}\n  {text}\n  {' ' * pos}^")
        self.pos = pos


# ---------------------------------------------------------------------------
# point syntax


_ROOT = re.compile(r"root\(\s*(?P<poly>[^,]+?)\s*,\s*near\s+(?P<near>[^)]+?)\s*\)")


def _parse_near(s: str) -> complex:
    t = s.replace(" ", "").replace("i", "j")
    if t.endswith("j") and not re.search(r"\dj$", t):
        t = t[:-1] + "1j"
    return complex(t)


def parse_entry(text: str, offset: int, full: str) -> AlgebraicNumber:
    s = text.strip()
    lead = len(text) - len(text.lstrip())
    if not s:
        raise PointSyntaxError(full, offset, "empty coordinate")
    m = _ROOT.fullmatch(s)
    if m:
        try:
            f = parse_poly(m.group("poly"))
        except (PolynomialError, ValueError) as exc:
            raise PointSyntaxError(full, offset + lead + m.start("poly"), f"bad polynomial ({exc})") from None
        try:
            near = _parse_near(m.group("near"))
        except ValueError:
            raise PointSyntaxError(full, offset + lead + m.start("near"), "bad approximation") from None
        if f.degree < 1:
            raise PointSyntaxError(full, offset + lead + m.start("poly"), "constant polynomial")
        return AlgebraicNumber.root_near(f, near)
    if s.startswith("root"):
        raise PointSyntaxError(full, offset + lead, "expected root(<poly>, near <value>)")
    try:
        return AlgebraicNumber.rational(Fraction(s))
    except (ValueError, ZeroDivisionError):
        raise PointSyntaxError(full, offset + lead, f"cannot read {s!r} as a rational or root expression") from None


def parse_point(text: str) -> ProjPoint:
    """"[a:b]" with rational or root(...) entries, or a bare entry / "inf"."""
    t = text.strip()
    if t.lower() in ("inf", "infinity", "oo"):
        return ProjPoint.infinity()
    if not t.startswith("["):
        return ProjPoint.affine(parse_entry(text, 0, text))
    start = text.index("[")
    if not t.endswith("]"):
        raise PointSyntaxError(text, len(text.rstrip()), "missing ']'")
    end = text.rindex("]")
    body = text[start + 1 : end]
    depth = 0
    split = None
    for k, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == ":" and depth == 0:
            if split is not None:
                raise PointSyntaxError(text, start + 1 + k, "more than two coordinates")
            split = k
    if split is None:
        raise PointSyntaxError(text, end, "expected ':' between coordinates")
    a = parse_entry(body[:split], start + 1, text)
    b = parse_entry(body[split + 1 :], start + 2 + split, text)
    if a.is_zero() and b.is_zero():
        raise PointSyntaxError(text, start + 1, "[0:0] is not a point")
    if a.is_zero():
        return ProjPoint.infinity()
    return ProjPoint.affine(b / a)


def parse_places(text: str) -> list[PlaceQ]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            v = PlaceQ.parse(part)
        except ValueError:
            raise UsageError(f"bad place {part!r}") from None
        if v.p is not None and not flint.fmpz(v.p).is_prime():
            raise UsageError(f"{v.p} is not prime")
        out.append(v)
    if not out:
        raise UsageError("no places given")
    return out


def parse_eps(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad rational {text!r}") from None


# ---------------------------------------------------------------------------
# commands


def _exact_height_form(P: ProjPoint) -> str | None:
    if P.is_infinity:
        return "0"
    a = P.alpha
    if a.is_rational():
        q = a.rational_value()
        m = max(abs(q.numerator), abs(q.denominator))
        return "0" if m == 1 else f"log {m}"
    return f"(1/{a.degree}) log M({format_poly(a.minpoly)})"


def cmd_height(args) -> tuple[dict, int]:
    P = parse_point(args.point)
    h = height_point(P, Fraction(1, 10 ** (args.precision + 4)))
    return {"point": str(P), "value": fmt_interval(h, args.precision), "exact_form": _exact_height_form(P)}, EXIT_OK


def cmd_conductor(args) -> tuple[dict, int]:
    P = parse_point(args.point)
    res = conductor(P)
    out = {"point": str(P)}
    out.update(res.to_json())
    out["value"] = fmt_interval(res.value, args.precision)
    return out, EXIT_OK


def cmd_rootdisc(args) -> tuple[dict, int]:
    P = parse_point(args.point)
    res = log_root_disc(P)
    out = {"point": str(P)}
    out.update(res.to_json())
    out["value"] = fmt_interval(res.value, args.precision)
    return out, EXIT_OK


def cmd_compactset(args) -> tuple[dict, int]:
    P = parse_point(args.point)
    places = parse_places(args.places)
    eta = parse_eps(args.eta)
    if not (0 < eta <= 1):
        raise UsageError("eta must lie in (0, 1]")
    return {
        "point": str(P),
        "places": [str(v) for v in places],
        "eta": frac_str(eta),
        "member": in_compact_set(P, places, eta),
    }, EXIT_OK


def _cert_json(cert: BelyiCertificate) -> dict:
    out = cert.to_json()
    out["F"] = format_ff(cert.F)
    out["S_minpolys"] = ["inf" if o is None else format_poly(o) for o in cert.S_orbits]
    return out


def cmd_belyi(args) -> tuple[dict, int]:
    pts = [parse_point(p) for p in _split_points(args.points)] if args.points else []
    cert = noncritical_belyi(args.n, pts, route=args.route, degree_ceiling=args.degree_ceiling)
    return {"certificate": _cert_json(cert)}, EXIT_OK if cert.valid else EXIT_VERIFY


def _split_points(text: str) -> list[str]:
    """Split on ';' (commas may occur inside points)."""
    return [p for p in (s.strip() for s in text.split(";")) if p]


def cmd_family(args) -> tuple[dict, int]:
    fam = disjoint_family(args.n, args.m, degree_ceiling=args.degree_ceiling)
    out = fam.to_json()
    return {"family": out}, EXIT_OK if fam.disjoint else EXIT_VERIFY


def cmd_dependency(args) -> tuple[dict, int]:
    try:
        f = parse_ff(args.f, args.n)
        g = parse_ff(args.g, args.n)
    except Exception as exc:  # parse errors from the function-field grammar
        raise UsageError(f"cannot parse function: {exc}") from None
    H = args.H if args.H is not None else max(ff_complexity(f).H_ceil, ff_complexity(g).H_ceil)
    dep = find_dependency(f, g, H)
    cons = comparison_constants(dep, H)
    out = {"dependency": dep.to_json(), "constants": cons.to_json()}
    code = EXIT_OK
    if args.samples:
        rep = verify_comparison(f, g, cons, sample_points(args.n, args.samples, seed=args.seed))
        out["comparison"] = rep.to_json()
        code = EXIT_OK if rep.holds else EXIT_VERIFY
    return out, code


def cmd_constants(args) -> tuple[dict, int]:
    places = parse_places(args.places)
    eps = parse_eps(args.eps)
    rep = compute_constants(args.d, eps, places, n_override=args.demo_n, m_override=args.demo_m, degree_ceiling=args.degree_ceiling)
    return {"report": rep.to_json(ledger=args.ledger)}, EXIT_OK


def cmd_reduce(args) -> tuple[dict, int]:
    P = parse_point(args.point)
    places = parse_places(args.places)
    eps = parse_eps(args.eps)
    params = parameters(args.d, eps, places, args.demo_n, args.demo_m)
    fam = disjoint_family(params.n, params.m, degree_ceiling=args.degree_ceiling)
    trace = reduce_point(P, params, fam, A_zero)
    out = {"trace": trace.to_json(), "A_oracle": "A = 0 (counterfactual plumbing value)"}
    return out, EXIT_OK if trace.unconditional_ok else EXIT_VERIFY


def cmd_verify_cert(args) -> tuple[dict, int]:
    try:
        with open(args.file) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read certificate: {exc}") from None
    data = data.get("certificate", data)
    n = int(data["n"])
    f = parse_ff(data["map"], n)
    F = parse_ff(data["F"], n)
    g = RationalMapP1.make(parse_poly(data["g"]["num"], "z"), parse_poly(data["g"]["den"], "z"))
    S = [None if s == "inf" else parse_poly(s) for s in data["S_minpolys"]]
    cert = BelyiCertificate(n, f, 0, data["route"], list(data.get("chain", [])), S, g, F, bound_B=float(data["bound_B"]))
    verify_certificate(cert)
    claimed = data.get("clause_flags", {})
    agree = claimed == cert.clause_flags
    out = {
        "recomputed_clause_flags": cert.clause_flags,
        "claimed_clause_flags": claimed,
        "critical_values": [str(P) for P in cert.critical_values],
        "agree": agree,
        "valid": cert.valid,
    }
    return out, EXIT_OK if (agree and cert.valid) else EXIT_VERIFY


def _radical(n: int) -> int:
    r = 1
    for p, _ in flint.fmpz(n).factor():
        r *= int(p)
    return r


def cmd_abc_scan(args) -> tuple[dict, int]:
    rows = []
    ok = True
    for c in range(2, args.cmax + 1):
        for a in range(1, c // 2 + 1):
            b = c - a
            if math.gcd(a, b) != 1:
                continue
            res = conductor(ProjPoint.affine(AlgebraicNumber.rational(Fraction(a, c))))
            rad = _radical(a * b * c)
            expected = {int(p): (Fraction(1), Fraction(1)) for p, _ in flint.fmpz(rad).factor()} if rad > 1 else {}
            match = res.terms == expected
            ok = ok and match
            q = math.log(c) / math.log(rad) if rad > 1 else None
            rows.append({"a": a, "b": b, "c": c, "rad": rad, "conductor": f"log {rad}", "matches": match, "quality": None if q is None else round(q, 6)})
    return {"cmax": args.cmax, "triples": len(rows), "all_match": ok, "table": rows}, EXIT_OK if ok else EXIT_VERIFY


# ---------------------------------------------------------------------------
# driver


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # subcommands repeat the global flags; SUPPRESS keeps them from
    # overwriting values given before the subcommand name
    dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    g = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    g.add_argument("--precision", type=int, default=dflt(12), help="decimal digits in printed intervals")
    g.add_argument("--json", action="store_true", default=dflt(False), help="emit JSON")
    g.add_argument("--ledger", action="store_true", default=dflt(False), help="include the Z-formula ledger")
    g.add_argument("--seed", type=int, default=dflt(0), help="seed for sampling harnesses")
    g.add_argument("--demo", action="store_true", default=dflt(False), help="use n = 2, m = 3 where relevant")
    g.add_argument("--degree-ceiling", type=int, default=dflt(2000), help="degree ceiling for Belyi constructions")
    return g


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags(suppress=True)
    p = argparse.ArgumentParser(
        prog="abc-effectivity", description=__doc__, parents=[_global_flags(suppress=False)], allow_abbrev=False
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("height", parents=[common], help="Weil height of a point", allow_abbrev=False)
    s.add_argument("point")
    s.set_defaults(func=cmd_height)

    s = sub.add_parser("conductor", parents=[common], help="conductor of a point w.r.t. [0]+[1]+[inf]", allow_abbrev=False)
    s.add_argument("point")
    s.set_defaults(func=cmd_conductor)

    s = sub.add_parser("rootdisc", parents=[common], help="log root discriminant of Q(P)", allow_abbrev=False)
    s.add_argument("point")
    s.set_defaults(func=cmd_rootdisc)

    s = sub.add_parser("compactset", parents=[common], help="membership in the compactly bounded set", allow_abbrev=False)
    s.add_argument("point")
    s.add_argument("--places", required=True, help="comma list, e.g. 2,inf")
    s.add_argument("--eta", required=True, help="rational in (0, 1]")
    s.set_defaults(func=cmd_compactset)

    s = sub.add_parser("belyi", parents=[common], help="certified non-critical Belyi map on C_n", allow_abbrev=False)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--points", default="", help="';'-separated points of S")
    s.add_argument("--route", choices=["auto", "genus-0", "general"], default="auto")
    s.set_defaults(func=cmd_belyi)

    s = sub.add_parser("family", parents=[common], help="maps with pairwise disjoint branch images", allow_abbrev=False)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.set_defaults(func=cmd_family)

    s = sub.add_parser("dependency", parents=[common], help="integral dependency and comparison constants", allow_abbrev=False)
    s.add_argument("--f", required=True)
    s.add_argument("--g", required=True)
    s.add_argument("--n", type=int, default=2)
    s.add_argument("--H", type=int, default=None)
    s.add_argument("--samples", type=int, default=0, help="verify on this many sampled points")
    s.set_defaults(func=cmd_dependency)

    for name, helptext, fn in (
        ("constants", "eta, c, C and the Z ledger", cmd_constants),
        ("reduce", "reduction trace for one point", cmd_reduce),
    ):
        s = sub.add_parser(name, parents=[common], help=helptext, allow_abbrev=False)
        if name == "reduce":
            s.add_argument("--point", required=True)
        s.add_argument("--d", type=int, required=True)
        s.add_argument("--eps", required=True)
        s.add_argument("--places", required=True)
        s.add_argument("--demo-n", type=int, default=None)
        s.add_argument("--demo-m", type=int, default=None)
        s.set_defaults(func=fn)

    s = sub.add_parser("verify-cert", parents=[common], help="re-derive a Belyi certificate", allow_abbrev=False)
    s.add_argument("file")
    s.set_defaults(func=cmd_verify_cert)

    s = sub.add_parser("abc-scan", parents=[common], help="conductor vs radical for abc triples", allow_abbrev=False)
    s.add_argument("--cmax", type=int, required=True)
    s.set_defaults(func=cmd_abc_scan)
    return p


def _render(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat_list(v):
                lines.append(f"{pad}{k}:")
                lines.extend(_render(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _flat_list(v):
                lines.append(f"{pad}-")
                lines.extend(_render(v, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(pad + _scalar(obj))
    return lines


def _flat_list(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _scalar(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    if v is None:
        return "-"
    return str(v).lower() if isinstance(v, bool) else str(v)


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.demo:
        if getattr(args, "demo_n", "absent") is None:
            args.demo_n = 2
        if getattr(args, "demo_m", "absent") is None:
            args.demo_m = 3
    random.seed(args.seed)
    try:
        with working_precision(bits_for_width(Fraction(1, 10 ** (args.precision + 6)))):
            payload, code = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitExceeded as exc:
        payload = {"error": "resource limit", "message": str(exc), "trace": exc.trace}
        code = EXIT_RESOURCE
    except (ValueError, PolynomialError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    doc = {"schema": SCHEMA, "command": args.command}
    doc.update(payload)
    if args.command in ("constants",) and args.ledger:
        doc["Z_formulas"] = Z_FORMULAS
    if args.json:
        out.write(json.dumps(doc, indent=2, sort_keys=False, default=str) + "\n")
    else:
        out.write("\n".join(_render(doc)) + "\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
