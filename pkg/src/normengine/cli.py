"""``normengine`` command line: parse, stratify, run, explain, oracle.

Exit codes: 0 success (anomalies or not), 2 static errors (parse,
validation, stratification, grounding), 3 inconsistent database.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .crash import data_path
from .dsl import ParseError, load_program, parse_literal, serialize_program, validate_program
from .engine import GroundingError, InconsistencyError, ground, instance_cap, run_stratified
from .oracle import OracleLimitError, check_extension, describe, reiter_extensions
from .report import RunConfig, explain, run_pipeline
from .stratify import StratificationError, diagnostics_json, dumps, stratify

EXIT_OK, EXIT_STATIC, EXIT_INCONSISTENT = 0, 2, 3


def _default_kb() -> str:
    return str(data_path("crash.nkb"))


def _emit_json(doc) -> None:
    sys.stdout.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")


def _static_failure(exc, fmt) -> int:
    if isinstance(exc, ParseError):
        diags = [{"severity": d.severity, "message": d.message, "line": d.span[0], "column": d.span[1]}
                 for d in exc.diagnostics]
        lines = [str(d) for d in exc.diagnostics]
    elif isinstance(exc, StratificationError):
        diags = diagnostics_json(exc.diagnostics)
        lines = [str(d) for d in exc.diagnostics]
    else:
        diags = [{"message": str(exc)}]
        lines = [str(exc)]
    if fmt == "json":
        _emit_json({"schema_version": 1, "status": "error", "diagnostics": diags})
    else:
        for line in lines:
            print(f"error: {line}", file=sys.stderr)
    return EXIT_STATIC


def _inconsistent(exc: InconsistencyError, fmt) -> int:
    nodes = [exc.existing.to_json(), exc.attempted.to_json()]
    if fmt == "json":
        _emit_json({"schema_version": 1, "status": "inconsistent", "clash": nodes})
    else:
        print(f"inconsistent database: {exc}", file=sys.stderr)
        for n in nodes:
            print(f"  {json.dumps(n, ensure_ascii=False)}", file=sys.stderr)
    return EXIT_INCONSISTENT


def cmd_parse(args) -> int:
    try:
        p = load_program(args.file)
    except ParseError as e:
        return _static_failure(e, args.format)
    diags = validate_program(p)
    errors = [d for d in diags if d.severity == "error"]
    if args.format == "json":
        _emit_json({
            "schema_version": 1,
            "status": "error" if errors else "ok",
            "facts": len(p.facts) + len(p.static_facts),
            "rules": len(p.rules),
            "diagnostics": [{"severity": d.severity, "message": d.message, "line": d.span[0], "column": d.span[1]}
                            for d in diags],
        })
    else:
        for d in diags:
            print(f"{d.severity}: {d}", file=sys.stderr)
        if args.emit:
            sys.stdout.write(serialize_program(p))
        elif not errors:
            print(f"ok: {len(p.facts) + len(p.static_facts)} facts, {len(p.rules)} rules")
    return EXIT_STATIC if errors else EXIT_OK


def cmd_stratify(args) -> int:
    try:
        p = load_program(args.kb)
        s, diags = stratify(p)
    except (ParseError, StratificationError) as e:
        return _static_failure(e, args.format)
    if args.format == "json":
        sys.stdout.write(dumps(s, diags) + "\n")
    else:
        print(s.format_text())
        for d in diags:
            print(f"error: {d}", file=sys.stderr)
    return EXIT_STATIC if diags else EXIT_OK


def cmd_run(args) -> int:
    reports = []
    try:
        for facts in args.facts:
            cfg = RunConfig(kb=args.kb, facts=facts, output_format=args.format, trace=args.trace,
                            verify_oracle=args.verify_oracle, cap=args.cap)
            reports.append(run_pipeline(cfg).report)
    except (ParseError, StratificationError, GroundingError) as e:
        return _static_failure(e, args.format)
    except InconsistencyError as e:
        return _inconsistent(e, args.format)
    if args.format == "json":
        docs = [r.to_json() for r in reports]
        _emit_json(docs[0] if len(docs) == 1 else docs)
    else:
        for r in reports:
            sys.stdout.write(r.format_text())
            if r.trace_ref is not None:
                print("Trace:")
                for node in r.trace_ref:
                    print(f"  {json.dumps(node, ensure_ascii=False)}")
    return EXIT_OK


def cmd_explain(args) -> int:
    try:
        pattern = parse_literal(args.literal)
        run = run_pipeline(RunConfig(kb=args.kb, facts=args.facts, trace=True, cap=args.cap))
    except (ParseError, StratificationError, GroundingError) as e:
        return _static_failure(e, "text")
    except InconsistencyError as e:
        return _inconsistent(e, "text")
    sys.stdout.write(explain(run.database, pattern))
    return EXIT_OK


def cmd_oracle(args) -> int:
    try:
        p = load_program(args.file)
        s, diags = stratify(p)
        if diags:
            raise StratificationError(diags)
        g = ground(p, s, cap=args.cap or instance_cap())
        extensions = reiter_extensions(g, max_defaults=args.max_defaults, max_atoms=args.max_atoms)
    except (ParseError, StratificationError, GroundingError, OracleLimitError) as e:
        return _static_failure(e, args.format)
    try:
        db = run_stratified(g, s)
        engine = {"literals": describe(db.literals), "is_extension": check_extension(db, g)}
    except InconsistencyError as e:
        engine = {"inconsistent": str(e)}
    if args.format == "json":
        _emit_json({"schema_version": 1, "extensions": [describe(e) for e in extensions], "engine": engine})
    else:
        print(f"{len(extensions)} extension(s)")
        for k, e in enumerate(extensions, start=1):
            print(f"E{k}: {{{', '.join(describe(e))}}}")
        if "inconsistent" in engine:
            print(f"engine: inconsistent ({engine['inconsistent']})")
        else:
            print(f"engine: {{{', '.join(engine['literals'])}}}")
            print(f"engine result is an extension: {'yes' if engine['is_extension'] else 'no'}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="normengine", description="Stratified default-logic engine for accident reports.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def fmt(p):
        p.add_argument("--format", choices=("text", "json"), default="text")

    def cap(p):
        p.add_argument("--cap", type=_positive, default=None,
                       help="grounding instance cap (default: $NORMENGINE_INSTANCE_CAP or 100000)")

    p = sub.add_parser("parse", help="parse and validate a .nkb/.nfx file")
    p.add_argument("file")
    p.add_argument("--emit", action="store_true", help="print the canonical serialization")
    fmt(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("stratify", help="print the strata of a rule base")
    p.add_argument("kb", nargs="?", default=None)
    fmt(p)
    p.set_defaults(func=cmd_stratify)

    p = sub.add_parser("run", help="map report facts, run the rule base and report the cause")
    p.add_argument("--kb", default=None)
    p.add_argument("--facts", nargs="+", required=True)
    p.add_argument("--trace", action="store_true")
    p.add_argument("--verify-oracle", action="store_true")
    fmt(p)
    cap(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("explain", help="show how a literal was derived")
    p.add_argument("literal")
    p.add_argument("--kb", default=None)
    p.add_argument("--facts", required=True)
    cap(p)
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("oracle", help="enumerate the extensions of a small ground theory")
    p.add_argument("file")
    p.add_argument("--max-defaults", type=_positive, default=12)
    p.add_argument("--max-atoms", type=_positive, default=64)
    fmt(p)
    cap(p)
    p.set_defaults(func=cmd_oracle)
    return ap


def _positive(text) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "kb", "unset") is None:
        args.kb = _default_kb()
    try:
        return args.func(args)
    except FileNotFoundError as e:
        print(f"error: no such file: {e.filename or e}", file=sys.stderr)
        return EXIT_STATIC


if __name__ == "__main__":
    sys.exit(main())
