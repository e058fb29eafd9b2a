"""Command-line interface.

Every command writes either plain text or (``--format json``) an envelope
``{"status", "payload", "provenance"}``. Exit status is 0 whenever the input
was well formed, including mathematical outcomes such as "unbounded", and 2
for malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from . import catalog, constructions
from .cohomology import BottQuery, IndexedFano, bott_dimension, check_b2_one_stability
from .constructions import BlowUpSpec, Surface, blow_up
from .formats import dumps, load_variety, variety_from_dict, variety_to_dict
from .lattice import CurveClass, DivisorClass, LatticeError, Variety3Fold, format_rational
from .stability import (
    ConstraintSystem,
    SheafDescriptor,
    cotangent,
    maximize_slope,
    pullback_forms,
    relative_tangent,
    slope,
    tangent,
    theorem1_check,
)


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _envelope(payload: Any, provenance: Sequence[str] = (), status: str = "ok") -> dict:
    return {"status": status, "payload": payload, "provenance": list(provenance)}


def _add_source(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--preset", help="preset identifier (see README)")
    g.add_argument("--file", help="variety JSON file, '-' for stdin (default when no preset is given)")


def _add_format(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "json"), default="text")


def _read_variety(args) -> Variety3Fold:
    if args.preset:
        X = constructions.preset(args.preset)
        if isinstance(X, Surface):
            raise InputError(f"preset {args.preset!r} is a surface, a 3-fold is required")
        return X
    if args.file and args.file != "-":
        path = Path(args.file)
        if not path.exists():
            raise InputError(f"no such file: {args.file}")
        return load_variety(path)
    text = sys.stdin.read()
    if not text.strip():
        raise InputError("no variety given: use --preset, --file, or pipe a variety document")
    try:
        return variety_from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise InputError(f"stdin is not valid JSON ({exc})") from exc


def _vector(text: str, X: Variety3Fold) -> DivisorClass:
    try:
        coeffs = tuple(int(x) for x in text.split(","))
    except ValueError:
        return X.cls(text)
    if len(coeffs) != X.rank:
        raise InputError(f"class vector has length {len(coeffs)}, variety has rank {X.rank}")
    return DivisorClass(coeffs)


def _sheaf(spec: str, X: Variety3Fold) -> SheafDescriptor:
    kind, _, rest = spec.partition(":")
    if kind == "tangent" and not rest:
        return tangent(X)
    if kind == "cotangent" and not rest:
        return cotangent(X)
    if kind == "relative" and rest:
        return relative_tangent(X, rest)
    if kind == "pullback" and rest:
        return pullback_forms(X, rest)
    if kind == "custom" and rest:
        c1, _, rank = rest.rpartition(":")
        if not c1:
            raise InputError("custom sheaf needs custom:<c1>:<rank>")
        try:
            r = int(rank)
        except ValueError as exc:
            raise InputError(f"bad rank {rank!r}") from exc
        return SheafDescriptor("custom", r, _vector(c1, X))
    raise InputError(f"unknown sheaf spec {spec!r}")


# -- commands -----------------------------------------------------------------

def _emit_variety(X: Variety3Fold, fmt: str) -> str:
    if fmt == "json":
        return dumps(_envelope(variety_to_dict(X), X.provenance))
    return dumps(variety_to_dict(X))


def cmd_construct(args) -> str:
    return _emit_variety(_read_variety(args), args.format)


def cmd_blowup(args) -> str:
    X = _read_variety(args)
    transforms = {}
    for item in args.transform or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"--transform expects NAME=VALUE, got {item!r}")
        try:
            transforms[name] = int(value)
        except ValueError as exc:
            raise InputError(f"--transform value must be an integer: {item!r}") from exc
    common = dict(label=args.label, transforms=transforms, disjoint=tuple(args.disjoint or ()),
                  keep_fibrations=tuple(args.keep or ()))
    if args.point:
        spec = BlowUpSpec.point(**common)
    elif args.curve:
        spec = BlowUpSpec.along(X.curve(args.curve), **common)
    elif args.center_meets is not None:
        meets = _vector(args.center_meets, X)
        spec = BlowUpSpec.along(CurveClass(args.center_name, args.genus, meets.coeffs), **common)
    else:
        raise InputError("choose a center: --point, --curve NAME or --center-meets v1,v2,...")
    return _emit_variety(blow_up(X, spec, name=args.name), args.format)


def cmd_slope(args) -> str:
    X = _read_variety(args)
    F = _sheaf(args.sheaf, X)
    pol = _vector(args.polarization, X) if args.polarization else None
    mu = slope(X, F, pol)
    if args.format == "json":
        payload = {"sheaf": F.name, "rank": F.rank, "c1": list(F.c1.coeffs), "slope": format_rational(mu)}
        return dumps(_envelope(payload, X.provenance))
    return format_rational(mu) + "\n"


def cmd_check(args) -> str:
    X = _read_variety(args)
    pol = _vector(args.polarization, X) if args.polarization else None
    v = theorem1_check(X, side=args.side, polarization=pol)
    payload = {"variety": X.name, "degree": X.anticanonical_degree(), **v.to_dict()}
    entry = catalog.entry_for_preset(X.name) if pol is None else None
    if entry is not None and variety_from_dict(entry.variety) != X:
        entry = None
    if entry is not None:
        payload["catalog"] = {"id": entry.id, "catalog_verdict": entry.verdict,
                              "agrees": catalog.agrees(entry.verdict, v.status)}
    if args.format == "json":
        return dumps(_envelope(payload, X.provenance))
    lines = [f"variety: {X.name}", f"(-K)^3: {payload['degree']}", f"status: {v.status}",
             f"mu(T_X): {format_rational(v.mu_tx)}"]
    if v.witness is not None:
        w = v.witness
        lines += [f"witness: {w.sheaf.name} (rank {w.sheaf.rank}, {w.sheaf.side} side)",
                  f"witness slope: {format_rational(w.slope)}",
                  f"compared with: {format_rational(w.compared)}"]
    for w in v.tested:
        lines.append(f"  tested {w.sheaf.name}: {format_rational(w.slope)} vs {format_rational(w.compared)}")
    if entry is not None:
        lines.append(f"catalog: {entry.id} catalog verdict {entry.verdict}, "
                     f"{'agrees' if payload['catalog']['agrees'] else 'CONTRADICTS'}")
    return "\n".join(lines) + "\n"


def cmd_maximize(args) -> str:
    path = Path(args.file)
    if not path.exists():
        raise InputError(f"no such file: {args.file}")
    try:
        cs = ConstraintSystem.load(path)
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.file}: not valid JSON ({exc})") from exc
    r = maximize_slope(cs)
    payload = r.to_dict(cs.variables)
    if args.format == "json":
        return dumps(_envelope(payload))
    lines = [f"status: {r.status}"]
    if r.status == "optimal":
        lines.append(f"max: {payload['max']}")
        lines.append("point: " + " ".join(f"{k}={v}" for k, v in payload["point"].items()))
    return "\n".join(lines) + "\n"


def cmd_bott(args) -> str:
    h = bott_dimension(BottQuery(args.n, args.p, args.q, args.k))
    if args.format == "json":
        return dumps(_envelope({"n": args.n, "p": args.p, "q": args.q, "k": args.k, "dimension": h}))
    return f"{h}\n"


def cmd_check_b2one(args) -> str:
    X = IndexedFano.of_index(args.index, args.dim)
    v = check_b2_one_stability(X)
    if args.format == "json":
        return dumps(_envelope(v.to_dict()))
    lines = [f"status: {v.status}", f"dim: {X.n}  index: {X.r}"]
    for f in v.trace:
        extra = f"  (Bott h^0 = 0 for m in {f.checked[0][0]}..{f.checked[-1][0]})" if f.checked else ""
        lines.append(f"  {f.condition}_{f.i} for m >= {f.threshold}: {f.rule} [{f.hypothesis}; {f.citation}]{extra}")
    for i in v.missing:
        lines.append(f"  A_{i}: inconclusive")
    return "\n".join(lines) + "\n"


def _entry_line(e: catalog.CatalogEntry) -> str:
    b2 = ">=2" if e.b2 is None else str(e.b2)
    mech = "mechanized" if e.mechanized else "published claim"
    return f"{e.id:12s} b2={b2:4s} {e.verdict:10s} {mech:11s} {e.description}"


def cmd_catalog(args) -> str:
    if args.counts:
        c = catalog.counts()
        if args.format == "json":
            return dumps(_envelope(c))
        return "".join(f"{k}: {v}\n" for k, v in c.items())
    if args.verify:
        report = catalog.verify_entry(args.verify)
        if args.format == "json":
            return dumps(_envelope(report))
        return _report_text(report)
    if args.verify_all:
        reports = catalog.verify_all()
        if args.format == "json":
            return dumps(_envelope(reports))
        return "".join(_report_text(r, short=True) for r in reports)
    entries = catalog.list_entries(args.verdict, args.b2)
    if args.format == "json":
        return dumps(_envelope([{k: v for k, v in e.to_dict().items() if k != "variety"} for e in entries]))
    return "".join(_entry_line(e) + "\n" for e in entries)


def _report_text(r: dict, short: bool = False) -> str:
    if not r["mechanized"]:
        return f"{r['id']}: {r['verdict']} (published claim, not mechanized)\n"
    agree = "agrees" if r["agrees"] else "CONTRADICTS"
    head = f"{r['id']}: catalog {r['verdict']}, computed {r['computed']}, {agree}\n"
    if short:
        return head
    d = r["details"]
    lines = [head.rstrip()]
    if "degree" in r:
        lines.append(f"(-K)^3: {r['degree']}  mu(T_X): {d['mu_tx']}")
        if d["witness"]:
            w = d["witness"]
            lines.append(f"witness: {w['sheaf']} slope {w['slope']} vs {w['compared']}")
    if "certificate" in r:
        c = r["certificate"]
        lines.append(f"line subsheaves of T_X: mu <= {c['tangent_line_bound']} < {c['mu_tx']}")
        lines.append(f"line subsheaves of Omega^1_X: mu <= {c['cotangent_line_bound']} < -{c['mu_tx']}")
    if d.get("trace"):
        lines += [f"  {f['condition']}: {f['rule']}" for f in d["trace"]]
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fano-stability", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("construct", help="emit a variety document")
    _add_source(p)
    _add_format(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("blowup", help="blow up a point or a tracked curve")
    _add_source(p)
    _add_format(p)
    c = p.add_mutually_exclusive_group()
    c.add_argument("--point", action="store_true")
    c.add_argument("--curve", help="name of a tracked curve to use as center")
    c.add_argument("--center-meets", help="intersection vector of an untracked center curve")
    p.add_argument("--center-name", default="C")
    p.add_argument("--genus", type=int, default=0)
    p.add_argument("--label", default="E", help="label of the new exceptional class")
    p.add_argument("--transform", action="append", metavar="CURVE=E.C", help="E-intersection of a strict transform")
    p.add_argument("--disjoint", action="append", metavar="CURVE")
    p.add_argument("--keep", action="append", metavar="FIBRATION")
    p.add_argument("--name")
    p.set_defaults(func=cmd_blowup)

    p = sub.add_parser("slope", help="slope of a sheaf")
    _add_source(p)
    _add_format(p)
    p.add_argument("--sheaf", default="tangent",
                   help="tangent | cotangent | relative:<fib> | pullback:<fib> | custom:<c1>:<rank>")
    p.add_argument("--polarization")
    p.set_defaults(func=cmd_slope)

    p = sub.add_parser("check", help="test contraction-derived destabilizers")
    _add_source(p)
    _add_format(p)
    p.add_argument("--side", choices=("both", "tangent", "cotangent"), default="both")
    p.add_argument("--polarization")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("maximize", help="exact maximum of a linear objective")
    _add_format(p)
    p.add_argument("--file", required=True)
    p.set_defaults(func=cmd_maximize)

    p = sub.add_parser("bott", help="h^q(P^n, Omega^p(k))")
    _add_format(p)
    for name in ("n", "p", "q", "k"):
        p.add_argument(name, type=int)
    p.set_defaults(func=cmd_bott)

    p = sub.add_parser("check-b2one", help="stability for Picard rank one")
    _add_format(p)
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--dim", type=int, default=3)
    p.set_defaults(func=cmd_check_b2one)

    p = sub.add_parser("catalog", help="classification lists")
    _add_format(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--list", action="store_true")
    g.add_argument("--verify", metavar="ID")
    g.add_argument("--verify-all", action="store_true")
    g.add_argument("--counts", action="store_true")
    p.add_argument("--verdict", choices=catalog.VERDICTS)
    p.add_argument("--b2", type=int)
    p.set_defaults(func=cmd_catalog)
    return parser


def _wants_json(argv: Sequence[str]) -> bool:
    # known before parsing, so that parse errors can be reported in the right format
    for i, a in enumerate(argv):
        if a == "--format=json" or (a == "--format" and list(argv[i + 1:i + 2]) == ["json"]):
            return True
    return False


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    fmt = "json" if _wants_json(argv) else "text"
    try:
        args = build_parser().parse_args(argv)
        if not getattr(args, "func", None):
            raise InputError("missing command")
        sys.stdout.write(args.func(args))
        return 0
    except (InputError, LatticeError) as exc:
        if fmt == "json":
            sys.stdout.write(dumps(_envelope({"message": str(exc)}, status="input-error")))
        else:
            sys.stderr.write(f"input-error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
