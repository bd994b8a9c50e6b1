"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 search budget exceeded,
3 violated hard invariant.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .ambiguity import KnowledgeState, bits_needed, max_conditional_ambiguity
from .errors import DfcompError, HardAssertionError, InvalidArgumentError, ResourceLimitError
from .formats import dump_json, emit_instance, parse_function, parse_instance, region_csv
from .functions import BUILTIN_NAMES, FunctionSpec, Problem, max_conditional_output_ambiguity, output_ambiguity
from .instances import generate_random, random_suite
from .oracle import DEFAULT_BUDGET, Oracle, SearchBudget
from .protocol import TieRule, run_online, run_worst_case
from .rates import (
    IDENTITY,
    audit_claims,
    audit_lemma4,
    audit_properties,
    audit_theorem1,
    classify,
    pair_by_function,
    rate_region,
    tight_bounds,
)
from .simulation import batch_simulate, simulate


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _load(args):
    s = parse_instance(_read(args.instance))
    if args.function_file:
        f = parse_function(_read(args.function_file), s)
    else:
        f = FunctionSpec.builtin(args.function)
    Problem(s, f)  # fail early on overflow or partial tables
    return s, f


def _budget(args) -> SearchBudget:
    if args.budget is None:
        return DEFAULT_BUDGET
    return SearchBudget(max_entries=args.budget, max_seconds=DEFAULT_BUDGET.max_seconds)


def _text(obj, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and any(isinstance(x, (dict, list)) for x in (v.values() if isinstance(v, dict) else v)):
                lines.append(f"{pad}{k}:")
                lines += _text(v, indent + 1)
            else:
                lines.append(f"{pad}{k}: {v}")
    elif isinstance(obj, list):
        for item in obj:
            if isinstance(item, (dict, list)):
                lines.append(f"{pad}-")
                lines += _text(item, indent + 1)
            else:
                lines.append(f"{pad}- {item}")
    else:
        lines.append(f"{pad}{obj}")
    return lines


def _emit(args, obj) -> None:
    if args.format == "json":
        sys.stdout.write(dump_json(obj))
    else:
        sys.stdout.write("\n".join(_text(obj)) + "\n")


# -- commands -----------------------------------------------------------------


def cmd_ambiguity(args) -> None:
    s, f = _load(args)
    n = s.n_informants
    oa = output_ambiguity(f, KnowledgeState.initial(s))
    mu_i = [len(s.marginal(i)) for i in range(1, n + 1)]
    _emit(args, {
        "informants": n,
        "widths": list(s.widths),
        "total_width": s.total_width,
        "mu": len(s.vectors),
        "mu_informant": mu_i,
        "index_widths": [bits_needed(m) for m in mu_i],
        "mu_f": oa.mu_f,
        "multiplicity": [{"output": x, "count": c} for x, c in oa.multiplicity.items()],
        "max_cond_mu_given_informant": [
            max_conditional_ambiguity(s, range(1, n + 1), [i]) for i in range(1, n + 1)
        ],
        "max_cond_mu_f_given_informant": [max_conditional_output_ambiguity(f, s, i) for i in range(1, n + 1)],
        "bits_mu": bits_needed(len(s.vectors)),
        "bits_mu_f": bits_needed(oa.mu_f),
        "trivial_bounds": [bits_needed(oa.mu_f), s.total_width],
    })


def _drawn(text: str) -> tuple[str, ...]:
    return tuple(text.replace(",", " ").split())


def cmd_run(args) -> None:
    s, f = _load(args)
    tie = TieRule.parse(args.tie)
    if args.worst_case:
        if args.simulate:
            summary = batch_simulate(s, f, tie)
            t = run_worst_case(s, f, tie)
            if summary.max_bits != t.total_informant_bits:
                raise HardAssertionError("simulated worst case differs from the worst-case run")
            _emit(args, summary.to_dict())
        else:
            _emit(args, run_worst_case(s, f, tie).to_dict())
        return
    drawn = _drawn(args.drawn)
    if args.simulate:
        log = simulate(s, f, drawn, tie)
        if not log.correct:
            raise HardAssertionError("simulation computed a wrong output")
        _emit(args, log.to_dict())
    else:
        _emit(args, run_online(s, f, drawn, tie).to_dict())


def cmd_optimal(args) -> None:
    s, f = _load(args)
    budget = _budget(args)
    o = Oracle(s, f, budget)
    value, witness = o.min_worst_cost()
    dsc = Oracle(s, IDENTITY, budget).height()
    if not bits_needed(len(o.problem.values)) <= value <= min(dsc, s.total_width):
        raise HardAssertionError(f"#f = {value} breaks the trivial bounds")
    n = s.n_informants
    _emit(args, {
        "cost_f": value,
        "cost_dsc": dsc,
        "b": [o.informant_cost(i, value) for i in range(1, n + 1)],
        "b_unrestricted": [o.informant_cost(i) for i in range(1, n + 1)],
        "witness": witness.to_dict(),
    })


def cmd_rate_region(args) -> None:
    s, f = _load(args)
    region = rate_region(s, f, args.limit, _budget(args))
    if args.csv:
        sys.stdout.write(region_csv(region))
    else:
        _emit(args, region.to_dict())


def cmd_bounds(args) -> None:
    s, f = _load(args)
    budget = _budget(args)
    _emit(args, tight_bounds(s, f, tie=TieRule.parse(args.tie), budget=budget).to_dict())


def cmd_classify(args) -> None:
    s, f = _load(args)
    label = classify(s, f)
    if args.format == "text":
        sys.stdout.write(f"{label.label} mu_f={label.mu_f} mu={label.mu_domain}\n")
    else:
        _emit(args, label.to_dict())


def cmd_audit(args) -> None:
    budget = _budget(args)
    tie = TieRule.parse(args.tie)
    if args.instances:
        f = FunctionSpec.builtin(args.function)
        cases = [(parse_instance(_read(p)), f) for p in args.instances]
    else:
        names = args.functions.split(",") if args.functions else BUILTIN_NAMES
        cases = [(c.support, c.function) for c in random_suite(
            args.count, args.seed, informants=args.informants, max_width=args.max_width, functions=names)]
    if args.lemma4:
        report = audit_lemma4(cases, budget)
    elif args.properties:
        report = audit_properties(pair_by_function(cases), budget)
    elif args.theorem1:
        report = audit_theorem1(cases, tie, budget)
    else:
        report = audit_claims(cases, tie, budget)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(dump_json(report))
        report = report.get("summary", {k: v for k, v in report.items() if k != "rows"})
    _emit(args, report)


def cmd_gen(args) -> None:
    widths = [int(w) for w in args.widths.split(",")]
    s = generate_random(len(widths), widths, args.density, args.seed)
    sys.stdout.write(emit_instance(s))


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tie", default="lowest", help="lowest | random:<seed>")
    common.add_argument("--budget", type=int, default=None, help="memo-entry limit for exact searches")
    common.add_argument("--format", choices=("json", "text"), default="json")

    inst = _Parser(add_help=False)
    inst.add_argument("instance", help="instance file, or - for stdin")
    group = inst.add_mutually_exclusive_group()
    group.add_argument("--function", default="identity", help="builtin name")
    group.add_argument("--function-file", help="function file (builtin or table)")

    parser = _Parser(prog="dfcomp", description="Worst-case distributed function computation toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ambiguity", parents=[common, inst], help="ambiguity summary")
    p.set_defaults(run=cmd_ambiguity)

    p = sub.add_parser("run", parents=[common, inst], help="run the greedy protocol")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--drawn", help="the informants' strings, e.g. '000 010'")
    mode.add_argument("--worst-case", action="store_true")
    p.add_argument("--simulate", action="store_true", help="route through the sink/informant actors")
    p.set_defaults(run=cmd_run)

    p = sub.add_parser("optimal", parents=[common, inst], help="exact #f, b_i and a witness tree")
    p.set_defaults(run=cmd_optimal)

    p = sub.add_parser("rate-region", parents=[common, inst], help="worst-case rate region")
    p.add_argument("--csv", action="store_true", help="emit corners and constraint lines as CSV")
    p.add_argument("--limit", type=int, default=64, help="optimal trees to enumerate")
    p.set_defaults(run=cmd_rate_region)

    p = sub.add_parser("bounds", parents=[common, inst], help="loose and tight bounds")
    p.set_defaults(run=cmd_bounds)

    p = sub.add_parser("classify", parents=[common, inst], help="lossy or lossless")
    p.set_defaults(run=cmd_classify)

    p = sub.add_parser("audit", parents=[common], help="check claims over a suite")
    which = p.add_mutually_exclusive_group()
    which.add_argument("--lemma4", action="store_true")
    which.add_argument("--properties", action="store_true")
    which.add_argument("--theorem1", action="store_true")
    which.add_argument("--all", action="store_true", help="every claim (default)")
    p.add_argument("instances", nargs="*", help="instance files; default is a random suite")
    p.add_argument("--function", default="identity", help="builtin used with instance files")
    p.add_argument("--functions", help="comma-separated builtins for the random suite")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--informants", type=int, nargs="+", default=[2, 3])
    p.add_argument("--max-width", type=int, default=10)
    p.add_argument("--output", help="write the full report here and print only the summary")
    p.set_defaults(run=cmd_audit)

    p = sub.add_parser("gen", help="random instance")
    p.add_argument("--widths", required=True, help="comma-separated widths, e.g. 3,3")
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(run=cmd_gen)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        args.run(args)
    except HardAssertionError as e:
        print(f"dfcomp: hard assertion violated: {e}", file=sys.stderr)
        return 3
    except ResourceLimitError as e:
        print(f"dfcomp: {e}", file=sys.stderr)
        return 2
    except (InvalidArgumentError, DfcompError, OSError) as e:
        print(f"dfcomp: error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
