"""Batch front end over script files.

Five subcommands: ``check`` replays every definition in a file,
``extract`` prints a proof's program, ``eal`` prints and verifies its
exponential typing, ``run`` executes it on numerals, and ``conform``
compares it against a reference function on an input grid.

Reports come in two shapes, selected by ``--report``: ``text`` for
reading and ``json-like`` for tooling.  The machine-readable form is
JSON with sorted keys and no volatile fields, so identical inputs and
flags produce byte-identical output (schema tag ``ellkit-report/1``).

Exit status is 0 only when everything requested succeeded; 1 signals a
failed check, conformance mismatch, fuel exhaustion, or a non-numeral
result from ``run``; 2 signals bad usage, unreadable files, or syntax
errors.  The step budget defaults to 10**7, overridable by the
``ELLKIT_FUEL`` environment variable and the ``--fuel`` flag, in that
order of precedence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, Callable, Sequence

from .eal import (
    BApp,
    box_depth,
    check_eal,
    church_encode_box,
    stratified_normalize,
    to_box_term,
    translate_to_eal,
)
from .errors import EllError, FuelExhausted, ScriptSyntaxError
from .kernel import CheckedProof, check_proof
from .projections import (
    PApp,
    StepCounter,
    church_decode,
    church_encode,
    erase,
    normal_order_normalize,
    show_ealtype,
    show_pure,
)
from .realizability import (
    REFERENCE_FUNCTIONS,
    UNARY_LIBRARY,
    conformance_test,
    nat_spec,
    ref_prod,
    ref_sum,
)
from .script import ParsedScript, parse_script
from .syntax import DEFAULT_FUEL, show_formula
from .wellformed import check_formula

SCHEMA = "ellkit-report/1"


def _default_fuel() -> int:
    raw = os.environ.get("ELLKIT_FUEL")
    if raw is None:
        return DEFAULT_FUEL
    try:
        value = int(raw)
    except ValueError as exc:
        raise SystemExit(f"ELLKIT_FUEL must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise SystemExit("ELLKIT_FUEL must be positive")
    return value


def _load(path: str) -> ParsedScript:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SystemExit(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return parse_script(text)
    except ScriptSyntaxError as exc:
        raise SystemExit(f"{path}:{exc}") from exc


def _checked(parsed: ParsedScript, name: str, fuel: int) -> CheckedProof:
    try:
        script = parsed.proof(name)
    except KeyError:
        known = ", ".join(n for n, _ in parsed.proofs) or "none"
        raise SystemExit(f"no proof named {name!r} (have: {known})") from None
    try:
        return check_proof(script, parsed.theory, fuel=fuel)
    except EllError as exc:
        raise _Failure(f"proof {name} rejected: {exc}") from exc


class _Failure(Exception):
    """A requested check failed; carries the message for the report."""


def _emit(report: dict[str, Any], args: argparse.Namespace, text: str) -> None:
    if args.report == "json-like":
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(text)


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_check(args: argparse.Namespace) -> int:
    parsed = _load(args.file)
    items: list[dict[str, Any]] = []
    lines: list[str] = []
    for name, formula in parsed.formulas:
        item: dict[str, Any] = {"kind": "formula", "name": name}
        try:
            check_formula(formula, parsed.theory.signature)
            item["status"] = "ok"
            lines.append(f"formula {name}: ok")
        except EllError as exc:
            item["status"] = "fail"
            item["error"] = f"{type(exc).__name__}: {exc}"
            lines.append(f"formula {name}: FAIL {item['error']}")
        items.append(item)
    for name, script in parsed.proofs:
        item = {"kind": "proof", "name": name}
        try:
            checked = check_proof(script, parsed.theory, fuel=args.fuel)
            item["status"] = "ok"
            item["goal"] = show_formula(checked.sequent.goal)
            lines.append(f"proof {name}: ok")
            if args.verbose:
                item["term"] = show_pure(erase(checked.term))
                lines.append(f"  goal: {item['goal']}")
                lines.append(f"  term: {item['term']}")
        except EllError as exc:
            item["status"] = "fail"
            item["error"] = f"{type(exc).__name__}: {exc}"
            lines.append(f"proof {name}: FAIL {item['error']}")
        items.append(item)
    ok = all(i["status"] == "ok" for i in items)
    lines.append(f"{sum(i['status'] == 'ok' for i in items)}/{len(items)} definitions ok")
    report = {"schema": SCHEMA, "command": "check", "file": args.file, "items": items, "ok": ok}
    _emit(report, args, "\n".join(lines))
    return 0 if ok else 1


def _cmd_extract(args: argparse.Namespace) -> int:
    parsed = _load(args.file)
    try:
        checked = _checked(parsed, args.name, args.fuel)
    except _Failure as exc:
        print(exc, file=sys.stderr)
        return 1
    term = show_pure(erase(checked.term))
    report = {
        "schema": SCHEMA,
        "command": "extract",
        "file": args.file,
        "name": args.name,
        "term": term,
        "ok": True,
    }
    if args.verbose:
        report["goal"] = show_formula(checked.sequent.goal)
        _emit(report, args, f"{show_formula(checked.sequent.goal)}\n{term}")
    else:
        _emit(report, args, term)
    return 0


def _cmd_eal(args: argparse.Namespace) -> int:
    parsed = _load(args.file)
    try:
        checked = _checked(parsed, args.name, args.fuel)
        derivation = translate_to_eal(checked)
        check_eal(derivation)
    except _Failure as exc:
        print(exc, file=sys.stderr)
        return 1
    except EllError as exc:
        print(f"translated derivation rejected: {exc}", file=sys.stderr)
        return 1
    ty = show_ealtype(derivation.ty)
    depth = box_depth(to_box_term(checked))
    report = {
        "schema": SCHEMA,
        "command": "eal",
        "file": args.file,
        "name": args.name,
        "ty": ty,
        "box_depth": depth,
        "checked": True,
        "ok": True,
    }
    text = ty if not args.verbose else f"{ty}\nbox depth {depth}, derivation checked"
    _emit(report, args, text)
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    parsed = _load(args.file)
    try:
        checked = _checked(parsed, args.name, args.fuel)
    except _Failure as exc:
        print(exc, file=sys.stderr)
        return 1
    report: dict[str, Any] = {
        "schema": SCHEMA,
        "command": "run",
        "file": args.file,
        "name": args.name,
        "arguments": list(args.numerals),
        "strategy": args.strategy,
    }
    profile_lines: list[str] = []
    try:
        if args.strategy == "stratified":
            term = to_box_term(checked)
            for n in args.numerals:
                term = BApp(term, church_encode_box(n))
            normal, profile = stratified_normalize(term, budget=args.fuel)
            steps = profile.total_steps
            report["profile"] = [
                {"depth": l.depth, "steps": l.steps, "max-size": l.max_size}
                for l in profile.levels
            ]
            profile_lines = profile.to_text().splitlines()
        else:
            term = erase(checked.term)
            for n in args.numerals:
                term = PApp(term, church_encode(n))
            counter = StepCounter()
            normal = normal_order_normalize(term, fuel=args.fuel, counter=counter)
            steps = counter.steps
    except FuelExhausted as exc:
        report["ok"] = False
        report["error"] = str(exc)
        _emit(report, args, str(exc))
        return 1
    report["steps"] = steps
    try:
        value = church_decode(normal)
    except EllError:
        report["ok"] = False
        report["normal_form"] = show_pure(normal)
        _emit(report, args, f"normal form is not a numeral: {show_pure(normal)}")
        return 1
    report["ok"] = True
    report["value"] = value
    lines = [str(value)]
    if args.verbose:
        lines.append(f"numeral: {show_pure(normal)}")
        lines.append(f"steps: {steps}")
        lines.extend(profile_lines)
        report["normal_form"] = show_pure(normal)
    _emit(report, args, "\n".join(lines))
    return 0


def _resolve_ref(spec: str) -> tuple[Callable[..., int], int]:
    """A reference callable and its arity from a ``--ref`` argument."""
    if spec in REFERENCE_FUNCTIONS:
        return REFERENCE_FUNCTIONS[spec], 2 if spec != "pred" else 1
    head, sep, inner = spec.partition(":")
    if sep and head in ("sum", "prod") and inner in UNARY_LIBRARY:
        wrap = ref_sum if head == "sum" else ref_prod
        return wrap(UNARY_LIBRARY[inner]), 1
    names = "|".join(sorted(REFERENCE_FUNCTIONS))
    unary = "|".join(sorted(UNARY_LIBRARY))
    raise SystemExit(
        f"unknown reference {spec!r}; expected {names}, sum:F, or prod:F with F one of {unary}"
    )


def _cmd_conform(args: argparse.Namespace) -> int:
    parsed = _load(args.file)
    ref, arity = _resolve_ref(args.ref)
    try:
        checked = _checked(parsed, args.name, args.fuel)
    except _Failure as exc:
        print(exc, file=sys.stderr)
        return 1
    grid = [(n,) for n in range(args.max + 1)]
    if arity == 2:
        grid = [(a, b) for a in range(args.max + 1) for b in range(args.max + 1)]
    specs = tuple(nat_spec() for _ in range(arity + 1))
    rep = conformance_test(checked, specs, ref, samples=grid, fuel=args.fuel, name=args.name)
    report = {
        "schema": SCHEMA,
        "command": "conform",
        "file": args.file,
        "name": args.name,
        "ref": args.ref,
        "max": args.max,
        "results": [
            {
                "inputs": list(r.inputs),
                "expected": r.expected,
                "got": r.got,
                "steps": r.steps,
                "error": r.error,
                "ok": r.ok,
            }
            for r in rep.results
        ],
        "passed": rep.passed,
        "failed": rep.failed,
        "ok": rep.all_pass,
    }
    _emit(report, args, rep.to_text())
    return 0 if rep.all_pass else 1


# ---------------------------------------------------------------------------
# Argument wiring


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ellkit",
        description="Check, extract, translate, run, and conformance-test proof scripts.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--report",
        choices=("text", "json-like"),
        default="text",
        help="output format (json-like is stable and machine readable)",
    )
    common.add_argument(
        "--fuel",
        type=int,
        default=None,
        help="step budget (default 10^7, or the ELLKIT_FUEL environment variable)",
    )
    common.add_argument("--verbose", action="store_true", help="more detail in reports")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="replay every definition in a file")
    p.add_argument("file")
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("extract", parents=[common], help="print the program of a proof")
    p.add_argument("file")
    p.add_argument("name")
    p.set_defaults(fn=_cmd_extract)

    p = sub.add_parser("eal", parents=[common], help="print and verify the exponential typing")
    p.add_argument("file")
    p.add_argument("name")
    p.set_defaults(fn=_cmd_eal)

    p = sub.add_parser("run", parents=[common], help="run a proof's program on numerals")
    p.add_argument("file")
    p.add_argument("name")
    p.add_argument("numerals", nargs="*", type=int, help="decimal arguments")
    p.add_argument(
        "--strategy",
        choices=("normal-order", "stratified"),
        default="normal-order",
        help="reduction strategy",
    )
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("conform", parents=[common], help="compare against a reference function")
    p.add_argument("file")
    p.add_argument("name")
    p.add_argument("--ref", required=True, help="plus|mult|pred|minus|sum:F|prod:F")
    p.add_argument("--max", type=int, default=6, help="grid bound per argument (default 6)")
    p.set_defaults(fn=_cmd_conform)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.fuel is None:
            args.fuel = _default_fuel()
        elif args.fuel <= 0:
            print("--fuel must be positive", file=sys.stderr)
            return 2
        return args.fn(args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return 2
        raise


if __name__ == "__main__":
    sys.exit(main())
