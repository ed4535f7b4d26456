"""Command-line front end.

    rigsyn compute {syntomic,abs-rigid,holim,cohomology} [--example NAME | --package PATH]
    rigsyn verify {all,cone-les,ts-quasi-iso,godement,ses,ring-axioms,holim-invariance}
    rigsyn examples {list,export} [NAME]

Exit codes: 0 success, 1 a verified property failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .cochain import Complex, ComplexError, betti
from .fisoc import FrobComplex, abs_rigid, eigenvalues
from .syntomic import (EXAMPLES, HypercoverData, PackageError, SyntomicPackage,
                       UnknownExample, builtin_example, hypercover_assemble, syntomic_cone,
                       syntomic_holim)
from .verify import SUITES, run_suite
from .ring_axioms import PERTURBATIONS, MODELS

SCHEMA_VERSION = 1


class InputError(Exception):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# inputs

def load_object(path: str):
    """A SyntomicPackage, FrobComplex, Complex or HypercoverData from JSON."""
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    if not isinstance(obj, dict):
        raise InputError(f"{path}: expected a JSON object")
    if "rig" in obj:
        return SyntomicPackage.from_json(obj)
    if "levels" in obj:
        return HypercoverData.from_json(obj)
    if "phi" in obj:
        return FrobComplex.from_json(obj)
    if "dims" in obj:
        return Complex.from_json(obj)
    raise InputError(f"{path}: unrecognized object")


def _subject(args):
    if args.example and args.package:
        raise InputError("give either --example or --package, not both")
    if args.example:
        return builtin_example(args.example, args.prime)
    if args.package:
        obj = load_object(args.package)
        if isinstance(obj, HypercoverData):
            obj = hypercover_assemble(obj)
        return obj
    raise InputError("one of --example or --package is required")


def _need(obj, kinds, what: str):
    if not isinstance(obj, kinds):
        raise InputError(f"{what} needs {' or '.join(k.__name__ for k in kinds)}, "
                         f"got {type(obj).__name__}")
    return obj


def _window(c: Complex, extra: int = 1) -> range:
    lo, hi = c.support if c.dims else (0, 0)
    return range(lo, hi + 1 + extra)


# ---------------------------------------------------------------------------
# output

def _table(headers: Sequence[str], rows: Sequence[Sequence]) -> str:
    cells = [list(map(str, headers))] + [[str(x) for x in r] for r in rows]
    widths = [max(len(r[k]) for r in cells) for k in range(len(headers))]
    numeric = [all(r[k].lstrip("-").isdigit() for r in cells[1:]) for k in range(len(headers))]
    lines = ["  ".join(c.rjust(w) if num else c.ljust(w)
                       for c, w, num in zip(r, widths, numeric)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _emit(args, report: dict, headers: Sequence[str], rows: Sequence[Sequence],
          title: str) -> None:
    if args.format == "json":
        sys.stdout.write(dump_json(report))
    else:
        sys.stdout.write(title + "\n" + _table(headers, rows))


# ---------------------------------------------------------------------------
# commands

def cmd_compute(args) -> int:
    obj = _subject(args)
    base = {"schema_version": SCHEMA_VERSION, "subject": args.subject}
    if args.subject in ("syntomic", "holim"):
        pkg = _need(obj, (SyntomicPackage,), args.subject)
        lo, hi = pkg.window()
        degrees = range(lo - 1, hi + 2)
        fn = syntomic_cone if args.subject == "syntomic" else syntomic_holim
        dims = fn(pkg, args.twist, degrees)
        outside = [n for n in degrees if not lo <= n <= hi]
        report = {**base, "package": pkg.name, "prime": pkg.prime, "twist": args.twist,
                  "window": [lo, hi], "dims": {str(n): dims[n] for n in degrees},
                  "outside_window": outside}
        rows = [(n, dims[n], "outside window" if n in outside else "") for n in degrees]
        _emit(args, report, ("n", "dim H^n_syn", "note"), rows,
              f"{args.subject} cohomology, twist {args.twist}, p = {pkg.prime}")
        return 0
    if args.subject == "abs-rigid":
        m = obj.rig if isinstance(obj, SyntomicPackage) else _need(obj, (FrobComplex,), "abs-rigid")
        degrees = _window(m.complex)
        dims = {n: abs_rigid(m, args.twist, n) for n in degrees}
        report = {**base, "prime": m.prime, "twist": args.twist,
                  "dims": {str(n): dims[n] for n in degrees}}
        _emit(args, report, ("n", "dim H^n_phi"), [(n, dims[n]) for n in degrees],
              f"absolute rigid cohomology, twist {args.twist}, p = {m.prime}")
        return 0
    if args.subject == "cohomology":
        if isinstance(obj, SyntomicPackage):
            obj = obj.rig
        c = obj.complex if isinstance(obj, FrobComplex) else _need(obj, (Complex,), "cohomology")
        degrees = _window(c, 0)
        dims = {n: betti(c, n) for n in degrees}
        eig = {}
        if isinstance(obj, FrobComplex):
            for n in degrees:
                try:
                    eig[n] = [str(v) for v in eigenvalues(obj, n)]
                except ValueError:
                    eig[n] = ["irrational"]
        report = {**base, "dims": {str(n): dims[n] for n in degrees}}
        if eig:
            report["eigenvalues"] = {str(n): v for n, v in eig.items()}
        rows = [(n, dims[n], " ".join(eig.get(n, []))) for n in degrees]
        _emit(args, report, ("n", "dim H^n", "phi eigenvalues"), rows, "cohomology")
        return 0
    raise InputError(f"unknown subject {args.subject}")


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    if args.perturb and args.perturb not in PERTURBATIONS:
        raise InputError(f"unknown perturbation {args.perturb}")
    if args.model not in MODELS:
        raise InputError(f"unknown model {args.model}")
    results = [run_suite(n, seed=args.seed, cases=args.cases, L=args.truncation_level,
                         D=args.degree_bound, model=args.model, perturbation=args.perturb)
               for n in names]
    passed = all(r.passed for r in results)
    if args.format == "json":
        sys.stdout.write(dump_json({"schema_version": SCHEMA_VERSION, "passed": passed,
                                    "suites": [r.to_json() for r in results]}))
    else:
        for r in results:
            rows = [(p.name, p.cases, p.failures, "pass" if p.passed else "FAIL")
                    for p in r.properties]
            sys.stdout.write(f"suite {r.suite}: {'pass' if r.passed else 'FAIL'}\n")
            sys.stdout.write(_table(("property", "cases", "failures", "result"), rows))
            for p in r.properties:
                if p.counterexample is not None:
                    sys.stdout.write(f"counterexample for {p.name!r}:\n")
                    sys.stdout.write(dump_json(p.counterexample))
    return 0 if passed else 1


def export_example(name: str, prime: int = 5) -> str:
    obj = builtin_example(name, prime)
    data = obj.to_json()
    data.setdefault("schema_version", SCHEMA_VERSION)
    data["example"] = name
    return dump_json(data)


def cmd_examples(args) -> int:
    if args.action == "list":
        if args.format == "json":
            sys.stdout.write(dump_json({"schema_version": SCHEMA_VERSION,
                                        "examples": {k: v[0] for k, v in EXAMPLES.items()}}))
        else:
            sys.stdout.write(_table(("name", "description"),
                                    [(k, v[0]) for k, v in EXAMPLES.items()]))
        return 0
    if not args.name:
        raise InputError("examples export needs a name")
    text = export_example(args.name, args.prime)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int, default=5)
    common.add_argument("--format", choices=("text", "json"), default="text")
    parser = argparse.ArgumentParser(prog="rigsyn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", parents=[common], help="cohomology tables")
    c.add_argument("subject", choices=("syntomic", "abs-rigid", "holim", "cohomology"))
    c.add_argument("--twist", type=int, default=1)
    c.add_argument("--example")
    c.add_argument("--package")

    v = sub.add_parser("verify", parents=[common], help="seeded property suites")
    v.add_argument("suite", choices=("all",) + SUITES)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--cases", type=int)
    v.add_argument("--truncation-level", type=int, default=5)
    v.add_argument("--degree-bound", type=int)
    v.add_argument("--model", default="derham-toy")
    v.add_argument("--perturb")

    e = sub.add_parser("examples", parents=[common], help="builtin examples")
    e.add_argument("action", choices=("list", "export"))
    e.add_argument("name", nargs="?")
    e.add_argument("--output")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if not _is_prime(args.prime):
            raise InputError(f"--prime {args.prime} is not prime")
        for flag in ("cases", "truncation_level", "degree_bound"):
            val = getattr(args, flag, None)
            if val is not None and val <= 0:
                raise InputError(f"--{flag.replace('_', '-')} must be positive")
        handler = {"compute": cmd_compute, "verify": cmd_verify,
                   "examples": cmd_examples}[args.command]
        return handler(args)
    except UnknownExample as exc:
        return _fail("UnknownExample", f"unknown example {exc.args[0]!r}", args)
    except (InputError, PackageError, ComplexError, ValueError, KeyError) as exc:
        return _fail(type(exc).__name__, str(exc), args)


def _fail(kind: str, message: str, args) -> int:
    err = {"schema_version": SCHEMA_VERSION, "error": kind, "message": message}
    if getattr(args, "format", "text") == "json":
        sys.stdout.write(dump_json(err))
    else:
        sys.stderr.write(f"error: {kind}: {message}\n")
    return 2


if __name__ == "__main__":
    sys.exit(main())
