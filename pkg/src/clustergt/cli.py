"""Command-line front end.

Subcommands: enumerate, plan, matrix, sweep, simulate, expsplit, baseline.
Global flags: --scenario, --seed, --out, --format, --budget, --workers.
Exit codes: 0 success, 2 input error, 3 search-budget exhaustion.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

import numpy as np

from . import baselines, engine, expsplit, sampling, separable
from ._format import fmt_num
from .errors import ClusterGTError, NotATree, ScenarioError, SearchExhausted
from .scenario import Scenario, format_clusters, parse_scenario
from .tree import FormationTree, lambda_table, validate_tree

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BUDGET = 3


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="clustergt",
        description="Two-step sampled group testing over cluster formations",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="scenario file path")
    common.add_argument("--seed", type=int, default=0, help="RNG seed (u64)")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "kv"), default="csv")
    common.add_argument("--budget", type=int, default=10_000_000,
                        help="matrix-search node budget")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", parents=[common],
                       help="list the formation ensemble of a scenario")
    p.add_argument("--lambdas", action="store_true",
                   help="emit the level,sigma,lambda_total table instead")

    p = sub.add_parser("plan", parents=[common],
                       help="optimal sampling plans and test counts per level")
    p.add_argument("--m", type=int, help="single sampling level (default: all)")

    p = sub.add_parser("matrix", parents=[common],
                       help="export the test matrix for one sampling level")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--decode-out", help="also export the decode table CSV")

    p = sub.add_parser("sweep", parents=[common],
                       help="E_f and T for every admissible sampling level")
    p.add_argument("--brute-force", action="store_true",
                   help="allow non-tree ensembles (adds corner annotations)")

    p = sub.add_parser("simulate", parents=[common],
                       help="exhaustive or Monte Carlo evaluation of one plan")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--trials", type=int, default=0,
                   help="Monte Carlo trials (0 = exhaustive)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--brute-force", action="store_true",
                   help="allow non-tree ensembles")

    p = sub.add_parser("expsplit", parents=[common],
                       help="per-level metrics of an exponentially split tree")
    p.add_argument("--f", type=int, required=True, dest="levels")
    p.add_argument("--delta", type=int, default=1)

    p = sub.add_parser("baseline", parents=[common],
                       help="adaptive baselines on the scenario's infections")
    p.add_argument("--algo", choices=("hwang", "individual"), required=True)
    p.add_argument("--trials", type=int, default=1000)
    return ap


def _load_scenario(args) -> Scenario:
    if not args.scenario:
        raise ScenarioError("--scenario is required for this command")
    return parse_scenario(args.scenario)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def _cmd_enumerate(args):
    sc = _load_scenario(args)
    ens = sc.to_ensemble()
    if args.lambdas:
        tree = validate_tree(ens)
        rows = lambda_table(tree)
        return _csv_text(("level", "sigma", "lambda_total"), rows), EXIT_OK
    rows = [
        (i + 1, form.sigma, fmt_num(p), format_clusters(form))
        for i, (form, p) in enumerate(zip(ens.formations, ens.probs))
    ]
    return _csv_text(("index", "sigma", "prob", "clusters"), rows), EXIT_OK


def _cmd_plan(args):
    sc = _load_scenario(args)
    tree = sc.to_tree()
    levels = [args.m] if args.m else list(range(1, tree.f + 1))
    rows = []
    code = EXIT_OK
    for m in levels:
        plan = sampling.optimal_sampling(tree, m)
        ef = sampling.expected_false(tree, plan)
        built = separable.construct_matrix(tree, plan, budget=args.budget)
        if not built.exact:
            code = EXIT_BUDGET
        rows.append((
            m,
            ";".join(str(v) for v in plan.selected),
            fmt_num(ef),
            built.t_lower,
            built.matrix.t_rows,
        ))
    return _csv_text(
        ("m", "selected", "expected_false", "lower_bound_T", "T"), rows
    ), code


def _cmd_matrix(args):
    sc = _load_scenario(args)
    tree = sc.to_tree()
    plan = sampling.optimal_sampling(tree, args.m)
    built = separable.construct_matrix(tree, plan, budget=args.budget)
    if args.decode_out:
        with open(args.decode_out, "w", encoding="utf-8") as fh:
            fh.write(_csv_text(("result_vector", "infected_set"),
                               built.decode_table.export_csv_rows()))
    return built.matrix.export_text(), EXIT_OK if built.exact else EXIT_BUDGET


def _tree_sweep_rows(tree: FormationTree, budget: int):
    rows = []
    code = EXIT_OK
    for m in range(1, tree.f + 1):
        plan = sampling.optimal_sampling(tree, m)
        ef = sampling.expected_false(tree, plan)
        built = separable.construct_matrix(tree, plan, budget=budget)
        if not built.exact:
            code = EXIT_BUDGET
        rows.append((m, fmt_num(ef), built.t_lower, built.matrix.t_rows,
                     "true" if built.exact else "false"))
    return rows, code


def ensemble_sweep(ens, budget: int):
    """Brute-force sweep rows for arbitrary ensembles.

    Returns (rows, exit_code); each row is (m, E_f, T_lower, T, exact,
    corner) with corner marking Pareto-minimal (T, E_f) points.
    """
    from . import _kernels

    n = ens.n
    labels = []
    sizes = []
    for form in ens.formations:
        lab = form.labels()
        labels.append([lab[v] for v in range(1, n + 1)])
        sizes.append([len(c) for c in form.clusters])
    probs = [float(p) for p in ens.probs]
    max_sigma = max(form.sigma for form in ens.formations)

    metrics = []
    code = EXIT_OK
    for m in range(1, ens.f + 1):
        form = ens.formations[m - 1]
        chosen = []
        ef = 0.0
        for cluster in form.clusters:
            cluster0 = [v - 1 for v in cluster]
            costs = _kernels.rep_costs(labels, sizes, probs, n, cluster0, max_sigma)
            best = min(range(len(cluster0)), key=lambda i: (costs[i], cluster[i]))
            chosen.append(cluster[best])
            ef += costs[best]
        plan = sampling.SamplingPlan(m=m, selected=tuple(chosen))
        built = separable.construct_matrix(ens, plan, budget=budget)
        if not built.exact:
            code = EXIT_BUDGET
        metrics.append((m, ef, built.t_lower, built.matrix.t_rows, built.exact))

    rows = []
    for m, ef, t_lower, t_rows, exact in metrics:
        dominated = any(
            t2 <= t_rows and ef2 <= ef and (t2 < t_rows or ef2 < ef)
            for _m2, ef2, _tl2, t2, _e2 in metrics
        )
        rows.append((m, repr(ef), t_lower, t_rows,
                     "true" if exact else "false",
                     "0" if dominated else "1"))
    return rows, code


def _cmd_sweep(args):
    sc = _load_scenario(args)
    try:
        tree = sc.to_tree()
    except NotATree:
        if not args.brute_force:
            raise
        ens = sc.to_ensemble()
        rows, code = ensemble_sweep(ens, args.budget)
        return _csv_text(
            ("m", "E_f", "T_lower", "T", "exact", "corner"), rows
        ), code
    rows, code = _tree_sweep_rows(tree, args.budget)
    return _csv_text(("m", "E_f", "T_lower", "T", "exact"), rows), code


def _plan_for(sc: Scenario, m: int, brute_force: bool):
    """(ensemble_or_tree, plan) honoring the tree/brute-force split."""
    try:
        tree = sc.to_tree()
    except NotATree:
        if not brute_force:
            raise
        ens = sc.to_ensemble()
        return ens, sampling.optimal_sampling_general(ens, m)
    return tree, sampling.optimal_sampling(tree, m)


def _cmd_simulate(args):
    sc = _load_scenario(args)
    system, plan = _plan_for(sc, args.m, args.brute_force)
    built = separable.construct_matrix(system, plan, budget=args.budget)
    if args.trials > 0:
        report = engine.evaluate_monte_carlo(
            system, plan, built.matrix, built.decode_table,
            trials=args.trials, seed=args.seed, workers=args.workers,
        )
    else:
        report = engine.evaluate_exhaustive(
            system, plan, built.matrix, built.decode_table
        )
    if args.format == "kv":
        text = "\n".join(report.kv_lines(fmt_num)) + "\n"
    else:
        text = report.CSV_HEADER + "\n" + report.csv_row(fmt_num) + "\n"
    return text, EXIT_OK if built.exact else EXIT_BUDGET


def _cmd_expsplit(args):
    params = expsplit.ExpSplitParams(f=args.levels, delta=args.delta)
    tree = expsplit.generate(params)
    rows = []
    code = EXIT_OK
    for m in range(1, params.f + 1):
        ef = expsplit.closed_form_ef(params, m)
        t_lower = separable.lower_bound_tests(tree, m)
        plan = sampling.SamplingPlan(
            m=m,
            selected=tuple(c[0] for c in tree.ensemble.formations[m - 1].clusters),
        )
        built = separable.construct_matrix(tree, plan, budget=args.budget)
        if not built.exact:
            code = EXIT_BUDGET
        rows.append((m, fmt_num(ef), t_lower, built.matrix.t_rows))
    return _csv_text(("m", "E_f", "T_lower", "T"), rows), code


def _cmd_baseline(args):
    sc = _load_scenario(args)
    ens = sc.to_ensemble()
    n = ens.n
    cum = np.cumsum(np.asarray([float(p) for p in ens.probs]))
    cum[-1] = 1.0
    gen = np.random.Generator(np.random.Philox(key=args.seed))
    u = gen.random(args.trials)
    z = gen.integers(0, n, size=args.trials)
    alpha_idx = np.minimum(
        np.searchsorted(cum, u, side="right"), len(cum) - 1
    )
    rows = []
    for t in range(args.trials):
        form = ens.formations[int(alpha_idx[t])]
        infected = form.cluster_of(int(z[t]) + 1)
        oracle = baselines.PoolOracle(infected, n)
        if args.algo == "hwang":
            got, tests = baselines.hwang_generalized(oracle, n, len(infected))
        else:
            got, tests = baselines.individual_testing(oracle, n)
        if got != frozenset(infected):  # defensive: zero-error contract
            raise ClusterGTError("baseline returned a wrong infected set")
        rows.append((t, len(infected), tests))
    return _csv_text(("trial", "k", "tests"), rows), EXIT_OK


_COMMANDS = {
    "enumerate": _cmd_enumerate,
    "plan": _cmd_plan,
    "matrix": _cmd_matrix,
    "sweep": _cmd_sweep,
    "simulate": _cmd_simulate,
    "expsplit": _cmd_expsplit,
    "baseline": _cmd_baseline,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text, code = _COMMANDS[args.command](args)
    except SearchExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ScenarioError, NotATree) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ClusterGTError, ValueError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
