"""Command-line entry point.

Subcommands: demo, boost, compress, oracle, profile, gcm, classify, sweep,
export-dot. Exit codes: 0 success, 2 input/validation error, 3 budget
exhaustion. Set TREELUCID_LOG=DEBUG (or INFO/WARNING) for logging.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from .boosting import BoostConfig, certify, topdown_lbl
from .demos import BUILDERS, FamilyDescriptor, build, trichotomy_classify
from .errors import BudgetError, SizeCapError, TreelucidError
from .gcm import MEASURES, AboveBudget, min_gamma
from .instance import (
    Instance,
    instance_from_json,
    instance_to_json,
    parse_weight,
)
from .minimax import compress, game_value, weak_interpretability_sweep
from .oracle import AboveCap, depth_profile, min_depth
from .tree import depth as tree_depth, from_json as tree_from_json, to_dot, to_json as tree_to_json

log = logging.getLogger("treelucid")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BUDGET = 3


def _load_instance(path: str) -> Instance:
    return instance_from_json(Path(path).read_text())


def _parse_eps(text: str):
    value = parse_weight(text if "/" in text else _maybe_float(text))
    return value


def _maybe_float(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)


def _parse_range(text: str):
    """'a..b' -> [a, a+1, ..., b]; 'a..b..s' uses stride s; 'a,b,c' literal."""
    if ".." in text:
        parts = [int(p) for p in text.split("..")]
        if len(parts) == 2:
            lo, hi, step = parts[0], parts[1], 1
        elif len(parts) == 3:
            lo, hi, step = parts
        else:
            raise ValueError(f"bad range {text!r}")
        return list(range(lo, hi + 1, step))
    return [int(p) for p in text.split(",")]


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text + ("" if text.endswith("\n") else "\n"))
    else:
        print(text)


# ---------------------------------------------------------------------------
# Subcommand handlers


def cmd_demo(args) -> int:
    params = [int(p) for p in args.params]
    inst = build(args.name, *params)
    _emit(args, instance_to_json(inst))
    if args.out:
        from .report import figure_path, plot_instance

        if plot_instance(inst, figure_path(args.out)):
            log.info("wrote %s", figure_path(args.out))
    return EXIT_OK


def cmd_boost(args) -> int:
    inst = _load_instance(args.instance)
    cfg = BoostConfig(
        gamma=args.gamma,
        epsilon=float(args.epsilon),
        weak_depth=args.weak_depth,
        max_phases=args.max_phases,
        weak_mode=args.weak_mode,
    )
    trace = topdown_lbl(inst, inst.distribution, cfg)
    report = certify(trace, cfg)
    if args.out:
        Path(args.out).write_text(tree_to_json(trace.tree))
    if args.trace:
        from .report import figure_path, plot_trace, trace_rows, write_csv

        write_csv(
            args.trace,
            ["phase", "surrogate", "min_leaf_advantage", "certified"],
            trace_rows(trace),
        )
        plot_trace(trace, figure_path(args.trace), gamma=cfg.gamma)
    print(
        json.dumps(
            {
                "phases": trace.phases,
                "depth": tree_depth(trace.tree),
                "final_loss": float(trace.final_loss),
                "final_surrogate": trace.surrogates[-1],
                "fully_certified": trace.fully_certified,
                "first_violation": report.first_violation,
                "global_bound": report.global_bound,
            }
        )
    )
    return EXIT_OK


def cmd_compress(args) -> int:
    inst = _load_instance(args.instance)
    result = compress(
        inst, args.weak_depth, args.gamma, tol=args.tol, seed=args.seed
    )
    if args.out:
        Path(args.out).write_text(tree_to_json(result.tree))
    print(
        json.dumps(
            {
                "game_value": result.solution.value,
                "duality_gap": result.solution.duality_gap,
                "multiset_size": result.multiset_size,
                "depth": tree_depth(result.tree),
                "margin": result.derandomization.margin,
            }
        )
    )
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = _load_instance(args.instance)
    result = min_depth(
        inst, inst.distribution, _parse_eps(args.epsilon), args.dmax
    )
    if isinstance(result, AboveCap):
        print(f"AboveCap({result.cap})" + (" structural" if result.structural else ""))
    else:
        print(result)
    return EXIT_OK


def cmd_profile(args) -> int:
    inst = _load_instance(args.instance)
    epsilons = [_parse_eps(e) for e in args.epsilons.split(",")]
    profile = depth_profile(inst, inst.distribution, epsilons, args.dmax)
    from .report import figure_path, plot_profile, profile_rows, write_csv

    rows = profile_rows(profile)
    if args.out:
        write_csv(args.out, ["epsilon", "depth"], rows)
        plot_profile(profile, figure_path(args.out))
    else:
        print("epsilon,depth")
        for row in rows:
            print(",".join(str(x) for x in row))
    return EXIT_OK


def cmd_gcm(args) -> int:
    inst = _load_instance(args.instance)
    measure = MEASURES[args.measure]
    result = min_gamma(
        inst, inst.distribution, _parse_eps(args.epsilon), measure, args.budget
    )
    if isinstance(result, AboveBudget):
        print(f"AboveBudget({result.budget})")
    else:
        print(result)
    return EXIT_OK


def _family(args) -> FamilyDescriptor:
    if args.family not in BUILDERS:
        raise TreelucidError(f"unknown family {args.family!r}")
    params = tuple(_parse_range(args.range)) if args.range else (0,)
    builder = BUILDERS[args.family]
    if args.family == "two_point":
        return FamilyDescriptor("two_point", (0,), args.gamma, lambda _p: builder())
    return FamilyDescriptor(args.family, params, args.gamma, builder)


def _member_value(job):
    name, param, d = job
    inst = BUILDERS[name](param) if name != "two_point" else BUILDERS[name]()
    return game_value(inst, d).value


def cmd_classify(args) -> int:
    fam = _family(args)
    verdict = trichotomy_classify(fam, args.gamma, args.dmax)
    if args.report:
        from .report import figure_path, plot_sweep, write_csv

        write_csv(
            args.report,
            ["depth", "max_game_value"],
            [[d, f"{v:.12g}"] for d, v in verdict.table],
        )
        if verdict.table:
            plot_sweep([verdict.table], [fam.name], args.gamma, figure_path(args.report))
    print(
        json.dumps(
            {
                "case": verdict.case,
                "depth": verdict.depth,
                "detail": verdict.detail,
                "table": list(verdict.table),
            }
        )
    )
    return EXIT_OK


def cmd_sweep(args) -> int:
    fam = _family(args)
    if args.jobs > 1:
        # Evaluate family members in parallel, one depth at a time.
        table = []
        found = None
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            for d in range(args.dmax + 1):
                jobs = [(fam.name, p, d) for p in fam.params]
                worst = max(pool.map(_member_value, jobs))
                table.append((d, worst))
                if worst <= 0.5 - args.gamma + 1e-6:
                    found = d
                    break
        from .minimax import SweepResult

        result = SweepResult(depth=found, table=tuple(table))
    else:
        result = weak_interpretability_sweep(fam.members(), args.gamma, args.dmax)
    if args.report:
        from .report import figure_path, plot_sweep, write_csv

        write_csv(
            args.report,
            ["depth", "max_game_value"],
            [[d, f"{v:.12g}"] for d, v in result.table],
        )
        plot_sweep([result.table], [fam.name], args.gamma, figure_path(args.report))
    print(json.dumps({"depth": result.depth, "table": list(result.table)}))
    return EXIT_OK


def cmd_export_dot(args) -> int:
    tree = tree_from_json(Path(args.tree).read_text())
    inst = _load_instance(args.instance) if args.instance else None
    _emit(args, to_dot(tree, inst))
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treelucid",
        description="Shallow decision-tree approximation: boosting, "
        "minimax compression, exact depth oracles, complexity measures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("demo", help="build a named demo instance")
    p.add_argument("name", choices=sorted(BUILDERS))
    p.add_argument("params", nargs="*", help="builder parameters (ints)")
    p.add_argument("--out", help="instance JSON path (figure written alongside)")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("boost", help="run level-by-level boosting")
    p.add_argument("--instance", required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--weak-depth", type=int, default=1)
    p.add_argument("--epsilon", required=True)
    p.add_argument("--max-phases", type=int, default=None)
    p.add_argument("--weak-mode", choices=["exact", "greedy"], default="exact")
    p.add_argument("--out", help="tree JSON path")
    p.add_argument("--trace", help="trace CSV path (figure written alongside)")
    p.set_defaults(func=cmd_boost)

    p = sub.add_parser("compress", help="game solve + derandomize + stack")
    p.add_argument("--instance", required=True)
    p.add_argument("--weak-depth", type=int, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="tree JSON path")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("oracle", help="exact minimal depth for one epsilon")
    p.add_argument("--instance", required=True)
    p.add_argument("--epsilon", required=True)
    p.add_argument("--dmax", type=int, required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("profile", help="minimal depth across an epsilon list")
    p.add_argument("--instance", required=True)
    p.add_argument("--epsilons", required=True, help="comma-separated")
    p.add_argument("--dmax", type=int, required=True)
    p.add_argument("--out", help="CSV path (figure written alongside)")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("gcm", help="minimal graded complexity of an accurate expression")
    p.add_argument("--instance", required=True)
    p.add_argument("--epsilon", required=True)
    p.add_argument("--measure", choices=sorted(MEASURES), default="connective")
    p.add_argument("--budget", type=int, default=20)
    p.set_defaults(func=cmd_gcm)

    for name, help_text in (
        ("classify", "trichotomy evidence for an instance family"),
        ("sweep", "smallest uniform depth beating 1/2 - gamma"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--family", required=True)
        p.add_argument("--range", default=None, help="e.g. 2..8 or 2,4,6")
        p.add_argument("--gamma", type=float, required=True)
        p.add_argument("--dmax", type=int, required=True)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--report", help="CSV path (figure written alongside)")
        p.set_defaults(func=cmd_classify if name == "classify" else cmd_sweep)

    p = sub.add_parser("export-dot", help="render a tree as Graphviz DOT")
    p.add_argument("--tree", required=True)
    p.add_argument("--instance", help="optional: use hypothesis names")
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_dot)

    return parser


def main(argv=None) -> int:
    level = os.environ.get("TREELUCID_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (BudgetError, SizeCapError) as exc:
        log.error("budget exhausted: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (TreelucidError, OSError, ValueError) as exc:
        log.error("input error: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
