"""Command-line front end.

Exit status: 0 when the property holds (or a degree is top, or a replayed
counterexample is confirmed), 1 when it fails (or the degree is below top),
2 on usage, parse or validation errors.
"""
import argparse
import json
import sys

from .automata import MvBuchi, MvRabin, load_automaton, omega_degree, word_degree
from .checker import (RABIN_MODES, check, counter_trace_from_json, degree, format_counter_trace,
                      replay, verdict_to_json)
from .errors import MvCheckError
from .lattice import load_lattice, law_report
from .properties import load_property, property_degree
from .system import LassoWord, load_system, parse_word

DEFAULT_BUDGET = 100_000


def _add_check_flags(p):
    p.add_argument("--ts", required=True, help="transition system file")
    p.add_argument("--prop", required=True, help="property file")
    p.add_argument("--stutter-complete", action="store_true",
                   help="add self-loops to terminal states before omega checks")
    p.add_argument("--dual", action="store_true",
                   help="read an omega-regular-neg-det automaton as recognizing the property itself")
    p.add_argument("--rabin-pairs", choices=RABIN_MODES, default="all",
                   help="'all': every required Rabin pair must hold on every path (default); "
                        "'any': at least one")
    p.add_argument("--state-budget", type=int, default=DEFAULT_BUDGET, metavar="N",
                   help="cap on product states (default %(default)s)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mvcheck",
        description="Model checking of multi-valued transition systems over finite lattices.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-lattice", help="load a lattice and report its laws")
    p.add_argument("lattice", help="lattice file or built-in name (B2, l3, B2xB2, l5, l3xl3)")

    p = sub.add_parser("check", help="check a system against a property")
    _add_check_flags(p)
    p.add_argument("--degree", action="store_true", help="also compute the satisfaction degree")
    p.add_argument("--all-cuts", action="store_true", help="report every failing cut")
    p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("eval", help="degree of a lasso word in a property")
    p.add_argument("--prop", required=True)
    p.add_argument("--lasso", required=True, help='lasso word such as "{}{b}|{b,p}"')

    p = sub.add_parser("automaton", help="automaton utilities")
    asub = p.add_subparsers(dest="action", required=True)
    d = asub.add_parser("degree", help="acceptance degree of a word")
    d.add_argument("--aut", required=True)
    g = d.add_mutually_exclusive_group(required=True)
    g.add_argument("--word", help='finite word such as "{}{b}" (finite automata)')
    g.add_argument("--lasso", help='lasso word such as "{}|{b}" (Buchi/Rabin automata)')

    p = sub.add_parser("replay", help="re-validate a counterexample from `check --json`")
    _add_check_flags(p)
    p.add_argument("--cex", required=True, help="JSON verdict or counterexample file ('-' for stdin)")
    return parser


def _cmd_validate(args, out):
    lat = load_lattice(args.lattice)
    report = law_report(lat)
    print(f"{lat!r}: {len(lat)} elements", file=out)
    print("join-irreducibles: " + ", ".join(m.name for m in lat.join_irreducibles), file=out)
    for law, ok in report.items():
        print(f"  {law}: {'ok' if ok else 'VIOLATED'}", file=out)
    return 0 if all(report.values()) else 1


def _load_pair(args):
    ts = load_system(args.ts)
    prop = load_property(args.prop, lattice=ts.lattice)
    opts = dict(dual=args.dual, stutter=args.stutter_complete,
                rabin_pairs=args.rabin_pairs, state_budget=args.state_budget)
    return ts, prop, opts


def _cmd_check(args, out):
    ts, prop, opts = _load_pair(args)
    verdict = check(ts, prop, all_cuts=args.all_cuts, **opts)
    result = degree(ts, prop, **opts) if args.degree else None
    if args.json:
        print(json.dumps(verdict_to_json(verdict, result), indent=2), file=out)
    else:
        if verdict.holds:
            print("holds", file=out)
        else:
            print(f"fails at {verdict.failing_element.name}", file=out)
            for x, cex in verdict.failures:
                print(format_counter_trace(cex), file=out)
        if result is not None:
            print(f"degree: {result.value.name}", file=out)
    if result is not None:
        return 0 if result.value == ts.lattice.top else 1
    return 0 if verdict.holds else 1


def _cmd_eval(args, out):
    prop = load_property(args.prop)
    value = property_degree(prop, LassoWord.parse(args.lasso))
    print(value.name, file=out)
    return 0 if value == prop.lattice.top else 1


def _cmd_automaton(args, out):
    aut = load_automaton(args.aut)
    omega = isinstance(aut, (MvBuchi, MvRabin))
    if omega and args.word is not None:
        raise MvCheckError(f"{aut.kind} automata read infinite words; use --lasso")
    if not omega and args.lasso is not None:
        raise MvCheckError(f"{aut.kind} automata read finite words; use --word")
    if omega:
        value = omega_degree(aut, LassoWord.parse(args.lasso))
    else:
        value = word_degree(aut, parse_word(args.word))
    print(value.name, file=out)
    return 0 if value == aut.lattice.top else 1


def _cmd_replay(args, out):
    ts, prop, opts = _load_pair(args)
    try:
        if args.cex == "-":
            data = json.load(sys.stdin)
        else:
            with open(args.cex, encoding="utf-8") as fh:
                data = json.load(fh)
    except OSError as exc:
        raise MvCheckError(f"cannot read {args.cex}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise MvCheckError(f"{args.cex}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if "counterexample" in data:
        data = data["counterexample"]
    try:
        cex = counter_trace_from_json(data)
    except (KeyError, TypeError) as exc:
        raise MvCheckError(f"malformed counterexample: {exc}") from None
    ok, reason = replay(ts, prop, cex, **opts)
    print(("confirmed: " if ok else "rejected: ") + reason, file=out)
    return 0 if ok else 1


COMMANDS = {
    "validate-lattice": _cmd_validate,
    "check": _cmd_check,
    "eval": _cmd_eval,
    "automaton": _cmd_automaton,
    "replay": _cmd_replay,
}


def run(argv=None, out=None):
    """Parse ``argv`` and execute; returns the exit status."""
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return COMMANDS[args.command](args, out)
    except MvCheckError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
