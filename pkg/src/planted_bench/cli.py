"""Command-line entry point.

Subcommands: ``gen`` (emit instance files), ``solve`` (one instance, one
algorithm, JSON result), ``sweep`` (phase-diagram CSV from a JSON config),
``regime`` (condition report / asymptotic label). Exit codes: 0 on success,
1 on usage errors, 2 on runtime failures such as an exceeded enumeration
budget.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import exact, simple
from .core import (
    BiClusterAssignment,
    ClusterAssignment,
    PlantedParams,
    SubmatrixParams,
    assignments_equal_up_to_relabeling,
    bicluster_to_matrix,
    dump_json,
    flip_graph,
    matrix_to_json,
)
from .gen import (
    ModelPreset,
    derive_seed,
    preset_params,
    read_edge_list,
    read_matrix_csv,
    sample_assignment,
    sample_bicluster_assignment,
    sample_planted_graph,
    sample_submatrix_instance,
    write_edge_list,
    write_matrix_csv,
)
from .harness import SweepConfig, run_sweep
from .regimes import (
    ConditionConstants,
    asymptotic_regime_clustering,
    asymptotic_regime_submatrix,
    check_cvx_clustering,
    check_cvx_converse_clustering,
    check_impossible_clustering,
    check_mle_clustering,
    check_simple_clustering,
    check_simple_converse_clustering,
    check_submatrix_conditions,
)
from .sdp import SolverOptions, solve_convex


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        raise _UsageError(message)


def _add_clustering_params(p):
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--K", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)


def _add_submatrix_params(p):
    p.add_argument("--nl", type=int)
    p.add_argument("--nr", type=int)
    p.add_argument("--kl", type=int)
    p.add_argument("--kr", type=int)
    p.add_argument("--mu", type=float)
    p.add_argument("--noise", default="gaussian",
                   choices=["gaussian", "rademacher", "none"])


def build_parser() -> _Parser:
    parser = _Parser(prog="planted-bench")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="sample an instance and write it to disk")
    g.add_argument("--model", required=True, choices=["clustering", "submatrix"])
    _add_clustering_params(g)
    _add_submatrix_params(g)
    g.add_argument("--preset", choices=[m.value for m in ModelPreset])
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True, help="edge list (clustering) or CSV (submatrix)")
    g.add_argument("--truth-out", help="JSON file for the planted truth")

    s = sub.add_parser("solve", help="run one algorithm on one instance")
    s.add_argument("--alg", required=True,
                   choices=["mle", "cvx", "counting", "threshold", "element"])
    s.add_argument("--model", required=True, choices=["clustering", "submatrix"])
    s.add_argument("--in", dest="infile", required=True)
    _add_clustering_params(s)
    _add_submatrix_params(s)
    s.add_argument("--truth", help="truth JSON written by gen --truth-out")
    s.add_argument("--out", help="write the JSON result here instead of stdout")
    s.add_argument("--radius", type=float, help="trace-ball radius (cvx; default from params)")
    s.add_argument("--total", type=float, help="entry-sum target (cvx; default from params)")
    s.add_argument("--max-iters", type=int, default=None)
    s.add_argument("--tol", type=float, default=None, help="feasibility tolerance (cvx)")
    s.add_argument("--tol-obj", type=float, default=None, help="objective plateau tolerance (cvx)")
    s.add_argument("--budget", type=int, default=exact.DEFAULT_BUDGET,
                   help="enumeration budget (mle)")
    s.add_argument("--non-neighbors", action="store_true",
                   help="counting: link on common non-neighbors")
    s.add_argument("--no-flip", action="store_true",
                   help="do not flip p < q instances before solving")

    w = sub.add_parser("sweep", help="run a phase-diagram sweep from a JSON config")
    w.add_argument("--config", required=True)
    w.add_argument("--out", required=True)
    w.add_argument("--timing", action="store_true",
                   help="record wall-clock ms (forfeits byte-identical reruns)")

    r = sub.add_parser("regime", help="evaluate regime conditions or the asymptotic label")
    r.add_argument("--model", required=True, choices=["clustering", "submatrix"])
    r.add_argument("--alpha", type=float)
    r.add_argument("--beta", type=float)
    _add_clustering_params(r)
    _add_submatrix_params(r)
    r.add_argument("--gamma", type=float, default=1.0)
    r.add_argument("--constants", choices=["unit", "paper"], default="unit")
    r.add_argument("--json", action="store_true")
    return parser


def _clustering_params(args) -> PlantedParams:
    missing = [k for k in ("n", "r", "K", "p", "q") if getattr(args, k) is None]
    if getattr(args, "preset", None):
        kind = ModelPreset(args.preset)
        return preset_params(kind, args.n, args.r, args.K, args.p, args.q)
    if missing:
        raise _UsageError(f"missing clustering parameters: {', '.join('--' + m for m in missing)}")
    return PlantedParams(args.n, args.r, args.K, args.p, args.q)


def _submatrix_params(args) -> SubmatrixParams:
    missing = [k for k in ("nl", "nr", "kl", "kr", "r", "mu") if getattr(args, k) is None]
    if missing:
        raise _UsageError(f"missing submatrix parameters: {', '.join('--' + m for m in missing)}")
    return SubmatrixParams(n_L=args.nl, n_R=args.nr, K_L=args.kl, K_R=args.kr,
                           r=args.r, mu=args.mu, noise=args.noise)


def _cmd_gen(args) -> int:
    if args.model == "clustering":
        params = _clustering_params(args)
        truth = sample_assignment(params, derive_seed(args.seed, 0))
        graph = sample_planted_graph(params, truth, derive_seed(args.seed, 1))
        write_edge_list(graph, args.out)
        truth_obj = {"model": "clustering", "params": params.to_json(),
                     "truth": truth.to_json(), "seed": args.seed}
    else:
        params = _submatrix_params(args)
        truth = sample_bicluster_assignment(params, derive_seed(args.seed, 0))
        a = sample_submatrix_instance(params, truth, derive_seed(args.seed, 1))
        write_matrix_csv(a, args.out)
        truth_obj = {"model": "submatrix", "params": params.to_json(),
                     "truth": truth.to_json(), "seed": args.seed}
    if args.truth_out:
        dump_json(truth_obj, args.truth_out)
    print(f"wrote {args.out}")
    return 0


def _load_truth(args):
    if not args.truth:
        return None
    with open(args.truth) as f:
        obj = json.load(f)
    if obj["model"] == "clustering":
        return ClusterAssignment.from_json(obj["truth"])
    return BiClusterAssignment.from_json(obj["truth"])


def _solver_opts(args) -> SolverOptions:
    kwargs = {}
    if args.max_iters is not None:
        kwargs["max_iters"] = args.max_iters
    if args.tol is not None:
        kwargs["tol_feas"] = args.tol
    if args.tol_obj is not None:
        kwargs["tol_obj"] = args.tol_obj
    return SolverOptions(**kwargs)


def _solve_clustering(args, truth) -> dict:
    params = _clustering_params(args)
    graph = read_edge_list(args.infile, params.n)
    if params.p < params.q and not args.no_flip:
        graph = flip_graph(graph)
        params = params.flipped()
    if args.alg == "mle":
        res = exact.mle_clustering(graph, params.r, params.K, budget=args.budget)
        out = {"algorithm": "mle", "objective": res.objective, "unique": res.unique,
               "enumerated": res.enumerated, "assignment": res.best.to_json()}
        if truth is not None:
            out["exact_recovery"] = bool(res.unique and
                                         assignments_equal_up_to_relabeling(res.best, truth))
        return out
    if args.alg == "cvx":
        radius = args.radius if args.radius is not None else float(params.r * params.K)
        total = args.total if args.total is not None else float(params.r * params.K ** 2)
        sol = solve_convex(graph.adjacency.astype(float), radius, total,
                           opts=_solver_opts(args), truth=truth)
        return {"algorithm": "cvx", "objective": sol.objective,
                "feasibility_gap": sol.feasibility_gap, "iterations": sol.iterations,
                "converged": sol.converged,
                "rounded": sol.rounded.to_json() if sol.rounded else "unroundable",
                "exact_recovery": sol.exact_recovery,
                "Y_hat": matrix_to_json(sol.Y_hat)}
    if args.alg == "counting":
        result = simple.counting_algorithm(graph, params, args.non_neighbors)
        if isinstance(result, simple.Inconsistent):
            return {"algorithm": "counting", "inconsistent": True, "reason": result.reason}
        out = {"algorithm": "counting", "inconsistent": False,
               "assignment": result.to_json()}
        if truth is not None:
            out["exact_recovery"] = assignments_equal_up_to_relabeling(result, truth)
        return out
    raise _UsageError(f"algorithm {args.alg} does not apply to the clustering model")


def _solve_submatrix(args, truth) -> dict:
    params = _submatrix_params(args)
    a = read_matrix_csv(args.infile)
    y_true = bicluster_to_matrix(truth) if truth is not None else None
    if args.alg == "mle":
        res = exact.mle_submatrix(a, params, budget=args.budget)
        out = {"algorithm": "mle", "objective": res.objective, "unique": res.unique,
               "enumerated": res.enumerated, "assignment": res.best.to_json()}
        if y_true is not None:
            out["exact_recovery"] = bool(res.unique and np.array_equal(
                bicluster_to_matrix(res.best), y_true))
        return out
    if args.alg == "cvx":
        radius = args.radius if args.radius is not None else params.r * math.sqrt(params.K_L * params.K_R)
        total = args.total if args.total is not None else float(params.r * params.K_L * params.K_R)
        sol = solve_convex(a, radius, total, opts=_solver_opts(args), truth=truth)
        return {"algorithm": "cvx", "objective": sol.objective,
                "feasibility_gap": sol.feasibility_gap, "iterations": sol.iterations,
                "converged": sol.converged,
                "rounded": sol.rounded.to_json() if sol.rounded else "unroundable",
                "exact_recovery": sol.exact_recovery,
                "Y_hat": matrix_to_json(sol.Y_hat)}
    if args.alg == "threshold":
        result = simple.submatrix_thresholding(a, params)
        if isinstance(result, simple.Inconsistent):
            return {"algorithm": "threshold", "inconsistent": True, "reason": result.reason}
        out = {"algorithm": "threshold", "inconsistent": False,
               "assignment": result.to_json()}
        if y_true is not None:
            out["exact_recovery"] = bool(np.array_equal(bicluster_to_matrix(result), y_true))
        return out
    if args.alg == "element":
        y_hat = simple.elementwise_thresholding(a, params.mu)
        out = {"algorithm": "element", "Y_hat": matrix_to_json(y_hat)}
        if y_true is not None:
            out["exact_recovery"] = bool(np.array_equal(y_hat, y_true))
        return out
    raise _UsageError(f"algorithm {args.alg} does not apply to the submatrix model")


def _cmd_solve(args) -> int:
    truth = _load_truth(args)
    if args.model == "clustering":
        result = _solve_clustering(args, truth)
    else:
        result = _solve_submatrix(args, truth)
    text = json.dumps(result, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_sweep(args) -> int:
    with open(args.config) as f:
        cfg = SweepConfig.from_json(json.load(f))
    run_sweep(cfg, args.out, measure_time=args.timing)
    print(f"wrote {args.out}")
    return 0


def _cmd_regime(args) -> int:
    if args.alpha is not None or args.beta is not None:
        if args.alpha is None or args.beta is None:
            raise _UsageError("--alpha and --beta go together")
        if args.model == "clustering":
            label = asymptotic_regime_clustering(args.alpha, args.beta)
        else:
            label = asymptotic_regime_submatrix(args.alpha, args.beta)
        print(label.value)
        return 0
    consts = ConditionConstants.paper() if args.constants == "paper" else ConditionConstants()
    if args.model == "clustering":
        params = _clustering_params(args)
        if params.p < params.q:
            params = params.flipped()
        reports = [
            check_impossible_clustering(params, consts),
            check_mle_clustering(params, args.gamma, consts),
            check_cvx_clustering(params, consts),
            check_cvx_converse_clustering(params, consts),
            check_simple_clustering(params, consts),
            check_simple_converse_clustering(params, consts),
        ]
    else:
        reports = [check_submatrix_conditions(_submatrix_params(args), consts)]
    if args.json:
        print(json.dumps([r.to_json() for r in reports], indent=2, sort_keys=True))
    else:
        print("\n\n".join(r.to_table() for r in reports))
    return 0


def cli(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 1
    try:
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_regime(args)
    except _UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 1
    except (ValueError, TypeError, OSError, KeyError,
            exact.EnumerationBudgetError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
