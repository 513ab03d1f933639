"""Command line: ``fraisse {classes,axioms,build,verify,export}``.

Exit codes: 0 success, 1 a check failed, 2 usage or parse error.  Each
command echoes its resolved configuration on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import classes as classes_mod
from .builder import BuildConfig, GenericStructure, GroundSet, run
from .classes import verify_class_axioms
from .structures import DomainError, canonical_dumps
from . import verify as checks

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CHECKS = ("chain", "ledger", "class", "density", "embeddability", "extension", "partial-iso", "back-and-forth")


class UsageError(Exception):
    pass


def _echo(command: str, config: dict):
    print(f"# {command} {canonical_dumps(config)}", file=sys.stderr)


def _lookup(registry, name):
    if name not in registry:
        raise UsageError(f"unknown class {name!r} (known: {', '.join(registry) or 'none'})")
    return registry[name]


def _load_build(path: str) -> GenericStructure:
    try:
        with open(path) as fh:
            return GenericStructure.from_json(json.load(fh))
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read build file {path}: {exc}") from exc


def cmd_classes(args, registry) -> int:
    _echo("classes", {"json": args.json})
    rows = [{"name": k.name, "language": k.language.to_json()} for k in registry.values()]
    if args.json:
        print(canonical_dumps(rows))
    else:
        for k in registry.values():
            print(f"{k.name:15} {k.language}")
    return EXIT_OK


def cmd_axioms(args, registry) -> int:
    k = _lookup(registry, args.klass)
    _echo("axioms", {"class": k.name, "n": args.n})
    try:
        report = verify_class_axioms(k, args.n)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    if args.json:
        print(canonical_dumps(report.to_json()))
    else:
        for r in report.results:
            status = "PASS" if r.passed else "FAIL"
            print(f"{status} {r.axiom} ({r.checked} instances)")
            if not r.passed:
                print(f"     counterexample: {canonical_dumps(r.counterexample)}")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_build(args, registry) -> int:
    k = _lookup(registry, args.klass)
    try:
        grounds = tuple(GroundSet.parse(g) for g in args.ground_set)
        config = BuildConfig(k.name, args.steps, args.seed, grounds)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _echo("build", dict(config.to_json(), out=args.out))
    M = run(config, k)
    text = M.dumps()
    if args.out == "-":
        sys.stdout.write(text)
    else:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_USAGE
        s = M.summary()
        print(f"universe size {s['universe_size']}, obligations met {s['obligations_met']} "
              f"({s['points_added']} strengthening), fairness bound {s['fairness_bound']}")
    return EXIT_OK


def _run_checks(args, M, other):
    selected = args.check or [c for c in CHECKS if c != "back-and-forth"]
    if not args.check:
        if M.klass.name != "linear-order":
            selected.remove("density")
        if other is not None:
            selected.append("back-and-forth")
    reports = []
    for name in selected:
        if name == "chain":
            reports.append(checks.check_chain(M))
        elif name == "ledger":
            reports.append(checks.check_ledger(M))
        elif name == "class":
            reports.append(checks.check_class_invariant(M))
        elif name == "density":
            reports.append(checks.check_density_linear(M, args.m))
        elif name == "embeddability":
            reports.append(checks.check_embeddability(M, args.k))
        elif name == "extension":
            reports.append(checks.check_extension_property(M, args.k, args.m))
        elif name == "partial-iso":
            reports.append(checks.check_partial_iso_extension(M, args.k, args.m))
        elif name == "back-and-forth":
            if other is None:
                raise UsageError("back-and-forth needs --against")
            reports.append(checks.back_and_forth_equiv(M, other, args.depth, args.m))
    return reports


def cmd_verify(args, registry) -> int:
    M = _load_build(args.build)
    other = _load_build(args.against) if args.against else None
    _echo("verify", {"build": args.build, "against": args.against, "checks": args.check,
                     "k": args.k, "m": args.m, "depth": args.depth})
    try:
        reports = _run_checks(args, M, other)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    if args.json:
        print(canonical_dumps([r.to_json() for r in reports]))
    else:
        for r in reports:
            print(r.line())
            for w in r.warnings:
                print(f"     warning: {w}")
            if not r.passed:
                print(f"     witness: {canonical_dumps(r.witness)}")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def to_dot(s) -> str:
    if any(a != 2 for _, a in s.language.relations):
        raise UsageError("DOT export needs a language of binary relations")
    symmetric = all((b, a) in rel for rel in s.rels for a, b in rel)
    kind, arrow = ("graph", "--") if symmetric else ("digraph", "->")
    lines = [f"{kind} M {{"]
    lines += [f"  {x};" for x in s.sorted_universe()]
    many = len(s.rels) > 1
    for name, rel in zip(s.language.names, s.rels):
        for a, b in sorted(rel):
            if symmetric and a > b:
                continue
            label = f' [label="{name}"]' if many else ""
            lines.append(f"  {a} {arrow} {b}{label};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_edge_list(s) -> str:
    lines = [f"# universe {' '.join(map(str, s.sorted_universe()))}"]
    for name, rel in zip(s.language.names, s.rels):
        lines += [f"{name} {' '.join(map(str, t))}" for t in sorted(rel)]
    return "\n".join(lines) + "\n"


def cmd_export(args, registry) -> int:
    M = _load_build(args.build)
    _echo("export", {"build": args.build, "format": args.format, "m": args.m, "out": args.out})
    s = M.prefix(args.m) if args.m is not None else M.final
    if args.format == "dot":
        text = to_dot(s)
    elif args.format == "edge-list":
        text = to_edge_list(s)
    else:
        text = s.dumps() + "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fraisse", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classes", help="list registered classes")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_classes)

    p = sub.add_parser("axioms", help="brute-force HP/JEP/AP for a class")
    p.add_argument("--class", dest="klass", required=True)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_axioms)

    p = sub.add_parser("build", help="build a generic prefix")
    p.add_argument("--class", dest="klass", required=True)
    p.add_argument("--steps", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ground-set", action="append", default=[], metavar="AmodM")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="run checks on a build file")
    p.add_argument("build")
    p.add_argument("--against")
    p.add_argument("--check", action="append", choices=CHECKS)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--m", type=int, default=10)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export", help="write a prefix of a build")
    p.add_argument("build")
    p.add_argument("--format", choices=("dot", "edge-list", "canonical"), default="canonical")
    p.add_argument("--m", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv=None, registry=None) -> int:
    registry = classes_mod.registered_classes() if registry is None else registry
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args, registry)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
