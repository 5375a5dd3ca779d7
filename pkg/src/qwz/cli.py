"""Command-line front end: ``qwz derive|certify|verify|limit|catalog|export|constants``."""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import mpmath

from .catalog import catalog, lookup
from .constants import CATALOG, ConstantMismatch
from .identity import (
    ConditionUnsatisfiable,
    Family,
    SchemaError,
    build_identity,
    certify_identity,
    dumps_identity,
    latex_identity,
    loads_identity,
)
from .special import Divergent, PrecisionContext
from .telescoper import CertificationFailed, DegenerateParameters, NoFirstOrder
from .verify import ConditionViolated, classical_limit_check, parse_q, verify_identity

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_DEGENERATE = 2
EXIT_NO_RECURRENCE = 3
EXIT_CERTIFICATION = 4
EXIT_SCHEMA = 5

DEFAULT_QS = ("2", "5/4")


class UsageError(Exception):
    pass


def default_digits() -> int:
    raw = os.environ.get("QWZ_PRECISION")
    if not raw:
        return 60
    try:
        d = int(raw)
    except ValueError:
        raise UsageError(f"QWZ_PRECISION must be an integer, got {raw!r}") from None
    if d < 10:
        raise UsageError("QWZ_PRECISION must be at least 10")
    return d


def parse_params(text: str) -> tuple[Fraction, ...]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise UsageError("--params needs four comma-separated rationals a,b,c,d")
    try:
        return tuple(Fraction(p) for p in parts)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse parameters {text!r}; use p/q rationals") from None


def parse_exact_q(text: str) -> Fraction:
    try:
        return parse_q(text)
    except (ValueError, ArithmeticError):
        raise UsageError(f"cannot parse q = {text!r}") from None


def _read_identity(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    return loads_identity(text)


def _render(idt, fmt: str) -> str:
    if fmt == "json":
        return dumps_identity(idt)
    if fmt == "latex":
        return latex_identity(idt)
    pair = idt.pair
    lines = [
        f"family     {idt.family.value}",
        f"params     {', '.join(str(p) for p in idt.params)}",
        f"L          {idt.L}",
        f"condition  {idt.condition}",
        f"prefactor  {idt.prefactor}",
        f"rhs term   {pair.fbar.text()}",
        f"multiplier {idt.multiplier}",
        f"p1         {pair.origin.p1}",
        f"p2         {pair.origin.p2}",
        f"Rbar       {pair.rbar}",
    ]
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _table(rows: list[dict], cols: list[str]) -> str:
    widths = [max(len(c), *(len(str(r.get(c, ""))) for r in rows)) if rows else len(c) for c in cols]
    out = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    for r in rows:
        out.append("  ".join(str(r.get(c, "")).ljust(w) for c, w in zip(cols, widths)))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_derive(args) -> int:
    family = Family.parse(args.family)
    params = parse_params(args.params)
    idt = build_identity(family, *params, tag=args.tag or "")
    text = dumps_identity(idt)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        if args.format != "json":
            sys.stdout.write(_render(idt, args.format))
        else:
            print(f"wrote {args.out}")
    else:
        sys.stdout.write(_render(idt, args.format))
    return EXIT_OK


def cmd_certify(args) -> int:
    idt = _read_identity(args.file)
    residual = certify_identity(idt)
    print(f"residual: {'0' if residual.is_zero() else residual}")
    if not residual.is_zero():
        return EXIT_CERTIFICATION
    return EXIT_OK


def _verify_rows(idt, qs, digits, terms):
    ctx = PrecisionContext(digits)
    rows = []
    for q in qs:
        try:
            rep = verify_identity(idt, q, ctx, terms)
            rows.append(rep.to_dict() | {"verdict": rep.verdict})
        except ConditionViolated as exc:
            rows.append({"tag": idt.tag, "q": str(q), "verdict": "fail", "error": str(exc)})
        except Divergent as exc:
            rows.append({"tag": idt.tag, "q": str(q), "verdict": "fail", "error": f"divergent: {exc}"})
    return rows


VERIFY_COLS = ["tag", "q", "verdict", "difference", "lhs_terms", "rhs_terms", "lhs_tail", "rhs_tail", "seconds"]


def cmd_verify(args) -> int:
    idt = _read_identity(args.file)
    qs = args.q or list(DEFAULT_QS)
    for q in qs:
        parse_q(q)
    rows = _verify_rows(idt, qs, args.digits, args.terms)
    if args.format == "json":
        print(json.dumps(rows, indent=2, sort_keys=True))
    else:
        sys.stdout.write(_table(rows, VERIFY_COLS + (["error"] if any("error" in r for r in rows) else [])))
    failed = any(r["verdict"] != "pass" for r in rows)
    return EXIT_FAIL if failed and args.strict else EXIT_OK


def cmd_limit(args) -> int:
    try:
        entry = lookup(args.tag)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    rep = classical_limit_check(entry, PrecisionContext(args.digits))
    if args.format == "json":
        print(json.dumps(rep.to_dict() | {"verdict": rep.verdict}, indent=2, sort_keys=True))
    else:
        for k, v in rep.to_dict().items():
            print(f"{k:13s} {v}")
    return EXIT_FAIL if not rep.passed and args.strict else EXIT_OK


def _run_entry(entry, qs, digits, terms, with_limit: bool) -> dict:
    out = {"tag": entry.tag, "family": entry.family.value,
           "params": [str(p) for p in entry.params]}
    try:
        idt = entry.identity()
        res = certify_identity(idt)
        out["certified"] = res.is_zero()
        out["verify"] = _verify_rows(idt, qs, digits, terms)
        if with_limit:
            lim = classical_limit_check(entry, PrecisionContext(min(digits, 40)))
            out["limit"] = lim.to_dict() | {"verdict": lim.verdict}
        ok = out["certified"] and all(r["verdict"] == "pass" for r in out["verify"])
        if with_limit:
            ok = ok and out["limit"]["passed"]
    except Exception as exc:  # one bad entry must not sink the batch report
        out["error"] = f"{type(exc).__name__}: {exc}"
        ok = False
    out["verdict"] = "pass" if ok else "fail"
    return out


def _run_tag(tag, qs, digits, terms, with_limit) -> dict:
    return _run_entry(lookup(tag), qs, digits, terms, with_limit)


def cmd_catalog(args) -> int:
    entries = catalog()
    if args.action == "list":
        rows = [{"tag": e.tag, "family": e.family.value,
                 "params": ",".join(str(p) for p in e.params), "target": str(e.target),
                 "description": e.description} for e in entries]
        if args.format == "json":
            print(json.dumps(rows, indent=2, sort_keys=True))
        else:
            sys.stdout.write(_table(rows, ["tag", "family", "params", "target"]))
        return EXIT_OK
    if args.tags:
        wanted = set(args.tags.split(","))
        unknown = wanted - {e.tag for e in entries}
        if unknown:
            raise UsageError(f"unknown tags: {', '.join(sorted(unknown))}")
        entries = [e for e in entries if e.tag in wanted]
    qs = args.q or list(DEFAULT_QS)
    for q in qs:
        parse_q(q)
    jobs = max(1, args.parallel)
    tags = [e.tag for e in entries]
    n = len(tags)
    rest = ([qs] * n, [args.digits] * n, [args.terms] * n, [not args.no_limit] * n)
    if jobs == 1:
        results = list(map(_run_tag, tags, *rest))
    else:
        # mpmath precision is process-global, so workers are processes
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_tag, tags, *rest))
    if args.format == "json":
        print(json.dumps(results, indent=2, sort_keys=True))
    else:
        rows = []
        for r in results:
            row = {"tag": r["tag"], "verdict": r["verdict"], "certified": r.get("certified", "")}
            for v in r.get("verify", []):
                row[f"q={v['q']}"] = v["verdict"]
            if "limit" in r:
                row["limit"] = r["limit"]["verdict"]
            if "error" in r:
                row["error"] = r["error"]
            rows.append(row)
        cols = ["tag", "verdict", "certified"] + [f"q={parse_q(q)}" for q in qs]
        if not args.no_limit:
            cols.append("limit")
        if any("error" in r for r in rows):
            cols.append("error")
        sys.stdout.write(_table(rows, cols))
        n_pass = sum(r["verdict"] == "pass" for r in results)
        print(f"{n_pass}/{len(results)} entries pass")
    failed = any(r["verdict"] != "pass" for r in results)
    return EXIT_FAIL if failed and args.strict else EXIT_OK


def cmd_export(args) -> int:
    if args.file:
        idt = _read_identity(args.file)
    elif args.tag:
        try:
            idt = lookup(args.tag).identity()
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from None
    else:
        raise UsageError("export needs an identity file or --tag")
    _emit(_render(idt, args.format), args.out)
    return EXIT_OK


def cmd_constants(args) -> int:
    rows = CATALOG.audit(args.digits)
    data = []
    with mpmath.workdps(args.digits + 5):
        for r in rows:
            value = mpmath.nstr(CATALOG.get(r.name), args.digits) if r.ok else ""
            data.append({"name": r.name, "provenance": r.provenance, "ok": r.ok,
                         "agree_a": round(min(r.agree_a, 999.0), 1),
                         "agree_b": round(min(r.agree_b, 999.0), 1), "value": value})
    if args.format == "json":
        print(json.dumps(data, indent=2, sort_keys=True))
    else:
        sys.stdout.write(_table(data, ["name", "ok", "agree_a", "agree_b", "value"]))
    if any(not r.ok for r in rows):
        return EXIT_FAIL
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qwz", description="Accelerated 3phi2 identities via q-WZ pairs.")
    sub = p.add_subparsers(dest="command", required=True)
    digits = default_digits()

    def fmt(sp, choices=("json", "latex", "text"), default="text"):
        sp.add_argument("--format", choices=choices, default=default)

    d = sub.add_parser("derive", help="derive and certify an identity for a family and parameters")
    d.add_argument("--family", required=True, choices=[f.value for f in Family])
    d.add_argument("--params", required=True, help="a,b,c,d as p/q rationals")
    d.add_argument("--tag", default="")
    d.add_argument("--out", "-o")
    fmt(d)
    d.set_defaults(func=cmd_derive)

    c = sub.add_parser("certify", help="recheck the certificate stored in an identity file")
    c.add_argument("file")
    c.set_defaults(func=cmd_certify)

    v = sub.add_parser("verify", help="two-sided numeric verification at sample q")
    v.add_argument("file")
    v.add_argument("--q", action="append", help="sample point (repeatable); decimals allowed")
    v.add_argument("--digits", type=int, default=digits)
    v.add_argument("--terms", type=int, default=1000)
    v.add_argument("--strict", action="store_true")
    fmt(v, ("json", "text"))
    v.set_defaults(func=cmd_verify)

    lim = sub.add_parser("limit", help="check the q -> 1 classical formula of a catalog entry")
    lim.add_argument("tag")
    lim.add_argument("--digits", type=int, default=40)
    lim.add_argument("--strict", action="store_true")
    fmt(lim, ("json", "text"))
    lim.set_defaults(func=cmd_limit)

    cat = sub.add_parser("catalog", help="list or run the catalog of known identities")
    cat.add_argument("action", choices=["list", "run"])
    cat.add_argument("--q", action="append")
    cat.add_argument("--digits", type=int, default=digits)
    cat.add_argument("--terms", type=int, default=1000)
    cat.add_argument("--tags", help="comma-separated subset of tags")
    cat.add_argument("--no-limit", action="store_true", help="skip the classical limit checks")
    cat.add_argument("--parallel", type=int, default=1)
    cat.add_argument("--strict", action="store_true")
    fmt(cat, ("json", "text"))
    cat.set_defaults(func=cmd_catalog)

    e = sub.add_parser("export", help="render an identity as json, latex or text")
    e.add_argument("file", nargs="?")
    e.add_argument("--tag")
    e.add_argument("--out", "-o")
    fmt(e, default="latex")
    e.set_defaults(func=cmd_export)

    k = sub.add_parser("constants", help="audit and print the constants catalog")
    k.add_argument("--digits", type=int, default=100)
    fmt(k, ("json", "text"))
    k.set_defaults(func=cmd_constants)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        parser = build_parser()
    except UsageError as exc:
        print(f"qwz: {exc}", file=sys.stderr)
        return EXIT_FAIL
    args = parser.parse_args(argv)
    if getattr(args, "digits", 60) < 10:
        parser.error("--digits must be at least 10")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qwz: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except DegenerateParameters as exc:
        print(f"qwz: degenerate parameters: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ConditionUnsatisfiable as exc:
        print(f"qwz: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except NoFirstOrder as exc:
        print(f"qwz: no first-order recurrence: {exc}", file=sys.stderr)
        return EXIT_NO_RECURRENCE
    except CertificationFailed as exc:
        print(f"qwz: certification failed: {exc}", file=sys.stderr)
        return EXIT_CERTIFICATION
    except SchemaError as exc:
        print(f"qwz: schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except ConstantMismatch as exc:
        print(f"qwz: constants audit failed: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
