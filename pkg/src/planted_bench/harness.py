"""Seeded Monte Carlo experiment runner and (alpha, beta) phase-diagram sweeps.

Success scoring follows the exact-recovery events of the theory: ties,
inconsistency, non-convergence, and unroundable solutions all count as
failures. Per-trial seeds derive from the master seed as
``derive_seed(master_seed, trial_index)``, so trials are decoupled and the
aggregate is independent of execution order; the env var
``PLANTED_BENCH_THREADS`` caps the worker count (default 1).

Persisted artifacts (reports, sweep CSVs) are byte-identical across reruns
with the same config and master seed. Wall-clock measurement is therefore an
explicit opt-in (``measure_time`` / ``--timing``): with it off, the wall_ms
fields are written as 0.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

import numpy as np

from . import exact, simple
from .core import (
    PlantedParams,
    SubmatrixParams,
    assignments_equal_up_to_relabeling,
    bicluster_to_matrix,
    flip_graph,
)
from .gen import (
    check_seed,
    derive_seed,
    sample_assignment,
    sample_bicluster_assignment,
    sample_planted_graph,
    sample_submatrix_instance,
)
from .regimes import asymptotic_regime_clustering, asymptotic_regime_submatrix
from .sdp import SolverOptions, solve_convex

WILSON_Z = 1.959963984540054  # 95% two-sided


class Model(str, Enum):
    CLUSTERING = "clustering"
    SUBMATRIX = "submatrix"


class Algorithm(str, Enum):
    MLE = "mle"
    CVX = "cvx"
    COUNTING = "counting"
    THRESHOLDING = "thresholding"
    ELEMENT = "element"


_CLUSTERING_ALGOS = {Algorithm.MLE, Algorithm.CVX, Algorithm.COUNTING}
_SUBMATRIX_ALGOS = {Algorithm.MLE, Algorithm.CVX, Algorithm.THRESHOLDING, Algorithm.ELEMENT}


def worker_count() -> int:
    raw = os.environ.get("PLANTED_BENCH_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def wilson_interval(successes: int, trials: int, z: float = WILSON_Z):
    """Wilson score interval for a binomial proportion (small-trial friendly)."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    ph = successes / trials
    denom = 1.0 + z * z / trials
    center = (ph + z * z / (2 * trials)) / denom
    half = z * math.sqrt(ph * (1 - ph) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class TrialConfig:
    """One Monte Carlo configuration: a model, its parameters, an algorithm,
    and a number of seeded trials."""

    model: Model
    params: Union[PlantedParams, SubmatrixParams]
    algorithm: Algorithm
    trials: int
    master_seed: int
    solver_opts: SolverOptions = field(default_factory=SolverOptions)
    flip_if_needed: bool = True
    use_non_neighbors: bool = False
    mle_budget: int = exact.DEFAULT_BUDGET

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        check_seed(self.master_seed)
        if self.trials <= 0:
            raise ValueError("trials must be positive")
        if self.model is Model.CLUSTERING:
            if not isinstance(self.params, PlantedParams):
                raise TypeError("clustering model needs PlantedParams")
            if self.algorithm not in _CLUSTERING_ALGOS:
                raise ValueError(f"{self.algorithm.value} does not apply to clustering")
            if self.params.p < self.params.q and not self.flip_if_needed:
                if self.algorithm in (Algorithm.COUNTING, Algorithm.MLE, Algorithm.CVX):
                    raise ValueError("p < q requires flip_if_needed for this algorithm")
            if self.algorithm is Algorithm.MLE:
                count = exact.cluster_space_size(self.params.n, self.params.r, self.params.K)
                if count > self.mle_budget:
                    raise ValueError(f"MLE enumeration of {count} hypotheses exceeds "
                                     f"the budget of {self.mle_budget}")
        else:
            if not isinstance(self.params, SubmatrixParams):
                raise TypeError("submatrix model needs SubmatrixParams")
            if self.algorithm not in _SUBMATRIX_ALGOS:
                raise ValueError(f"{self.algorithm.value} does not apply to submatrix")
            if self.algorithm is Algorithm.MLE:
                p = self.params
                count = exact.bicluster_space_size(p.n_L, p.n_R, p.K_L, p.K_R, p.r)
                if count > self.mle_budget:
                    raise ValueError(f"MLE enumeration of {count} hypotheses exceeds "
                                     f"the budget of {self.mle_budget}")

    def config_json(self) -> dict:
        return {
            "model": self.model.value,
            "params": self.params.to_json(),
            "algorithm": self.algorithm.value,
            "trials": self.trials,
            "master_seed": self.master_seed,
            "flip_if_needed": self.flip_if_needed,
            "use_non_neighbors": self.use_non_neighbors,
        }


@dataclass(frozen=True)
class TrialOutcome:
    seed: int
    success: bool
    wall_ms: float
    failure_kind: Optional[str]  # wrong_answer | tie | inconsistent | non_converged

    def to_json(self) -> dict:
        return {"seed": self.seed, "success": self.success,
                "wall_ms": self.wall_ms, "failure_kind": self.failure_kind}


@dataclass(frozen=True)
class ExperimentReport:
    """Per-configuration Monte Carlo result with a Wilson 95% interval."""

    config: dict
    trials: tuple
    successes: int
    success_rate: float
    wilson_lo: float
    wilson_hi: float

    def to_json(self) -> dict:
        return {"config": self.config,
                "trials": [t.to_json() for t in self.trials],
                "successes": self.successes,
                "success_rate": self.success_rate,
                "wilson_lo": self.wilson_lo,
                "wilson_hi": self.wilson_hi}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"


def _score_clustering(cfg: TrialConfig, seed: int) -> TrialOutcome:
    params = cfg.params
    truth = sample_assignment(params, derive_seed(seed, 0))
    graph = sample_planted_graph(params, truth, derive_seed(seed, 1))
    if params.p < params.q and cfg.flip_if_needed:
        graph = flip_graph(graph)
        params = params.flipped()

    if cfg.algorithm is Algorithm.MLE:
        res = exact.mle_clustering(graph, params.r, params.K, budget=cfg.mle_budget)
        if not res.unique:
            return TrialOutcome(seed, False, 0.0, "tie")
        ok = assignments_equal_up_to_relabeling(res.best, truth)
        return TrialOutcome(seed, ok, 0.0, None if ok else "wrong_answer")

    if cfg.algorithm is Algorithm.CVX:
        radius = float(params.r * params.K)
        total = float(params.r * params.K ** 2)
        sol = solve_convex(graph.adjacency.astype(float), radius, total,
                           opts=cfg.solver_opts, truth=truth)
        if not sol.converged:
            return TrialOutcome(seed, False, 0.0, "non_converged")
        ok = sol.exact_recovery
        return TrialOutcome(seed, ok, 0.0, None if ok else "wrong_answer")

    result = simple.counting_algorithm(graph, params, cfg.use_non_neighbors)
    if isinstance(result, simple.Inconsistent):
        return TrialOutcome(seed, False, 0.0, "inconsistent")
    ok = assignments_equal_up_to_relabeling(result, truth)
    return TrialOutcome(seed, ok, 0.0, None if ok else "wrong_answer")


def _score_submatrix(cfg: TrialConfig, seed: int) -> TrialOutcome:
    params = cfg.params
    truth = sample_bicluster_assignment(params, derive_seed(seed, 0))
    A = sample_submatrix_instance(params, truth, derive_seed(seed, 1))
    y_true = bicluster_to_matrix(truth)

    if cfg.algorithm is Algorithm.MLE:
        res = exact.mle_submatrix(A, params, budget=cfg.mle_budget)
        if not res.unique:
            return TrialOutcome(seed, False, 0.0, "tie")
        ok = bool(np.array_equal(bicluster_to_matrix(res.best), y_true))
        return TrialOutcome(seed, ok, 0.0, None if ok else "wrong_answer")

    if cfg.algorithm is Algorithm.CVX:
        radius = params.r * math.sqrt(params.K_L * params.K_R)
        total = float(params.r * params.K_L * params.K_R)
        sol = solve_convex(A, radius, total, opts=cfg.solver_opts, truth=truth)
        if not sol.converged:
            return TrialOutcome(seed, False, 0.0, "non_converged")
        ok = sol.exact_recovery
        return TrialOutcome(seed, ok, 0.0, None if ok else "wrong_answer")

    if cfg.algorithm is Algorithm.THRESHOLDING:
        result = simple.submatrix_thresholding(A, params)
        if isinstance(result, simple.Inconsistent):
            return TrialOutcome(seed, False, 0.0, "inconsistent")
        ok = bool(np.array_equal(bicluster_to_matrix(result), y_true))
        return TrialOutcome(seed, ok, 0.0, None if ok else "wrong_answer")

    y_hat = simple.elementwise_thresholding(A, params.mu)
    ok = bool(np.array_equal(y_hat, y_true))
    return TrialOutcome(seed, ok, 0.0, None if ok else "wrong_answer")


def run_single_trial(cfg: TrialConfig, index: int, measure_time: bool = False) -> TrialOutcome:
    seed = derive_seed(cfg.master_seed, index)
    start = time.perf_counter() if measure_time else 0.0
    if cfg.model is Model.CLUSTERING:
        outcome = _score_clustering(cfg, seed)
    else:
        outcome = _score_submatrix(cfg, seed)
    if measure_time:
        wall = (time.perf_counter() - start) * 1000.0
        outcome = TrialOutcome(outcome.seed, outcome.success, wall, outcome.failure_kind)
    return outcome


def run_trials(cfg: TrialConfig, measure_time: bool = False) -> ExperimentReport:
    """Run all trials of a configuration, aggregating by trial index so the
    report is independent of the execution schedule."""
    indices = range(cfg.trials)
    threads = worker_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(lambda t: run_single_trial(cfg, t, measure_time), indices))
    else:
        outcomes = [run_single_trial(cfg, t, measure_time) for t in indices]
    successes = sum(1 for o in outcomes if o.success)
    lo, hi = wilson_interval(successes, cfg.trials)
    return ExperimentReport(config=cfg.config_json(), trials=tuple(outcomes),
                            successes=successes, success_rate=successes / cfg.trials,
                            wilson_lo=lo, wilson_hi=hi)


SWEEP_CSV_COLUMNS = ["model", "algorithm", "n", "r", "K", "p", "q", "mu",
                     "alpha", "beta", "trials", "successes", "success_rate",
                     "wilson_lo", "wilson_hi", "predicted_regime", "wall_ms"]


@dataclass(frozen=True)
class SweepConfig:
    """Grid over (alpha, beta) at a fixed instance size.

    Parameter maps: clustering uses p = 2q = n^-alpha and K = round(n^beta);
    submatrix uses mu^2 = n^-alpha, K_L = K_R = round(n^beta) on square
    n x n instances. ``cluster_map`` picks r: "partition" derives
    r = floor(n/K) (capped so rK <= n), "single" fixes r = 1. Cells whose
    derived parameters are invalid (K < 2 or rK > n) are skipped and marked
    by trials = 0 in the CSV.
    """

    model: Model
    n: int
    alpha_grid: tuple
    beta_grid: tuple
    algorithms: tuple
    trials: int
    master_seed: int
    cluster_map: str = "partition"
    use_non_neighbors: bool = False
    solver_opts: SolverOptions = field(default_factory=SolverOptions)

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        object.__setattr__(self, "alpha_grid", tuple(float(a) for a in self.alpha_grid))
        object.__setattr__(self, "beta_grid", tuple(float(b) for b in self.beta_grid))
        object.__setattr__(self, "algorithms",
                           tuple(Algorithm(a) for a in self.algorithms))
        check_seed(self.master_seed)
        for grid, name in ((self.alpha_grid, "alpha_grid"), (self.beta_grid, "beta_grid")):
            if not grid or any(not 0.0 < x < 1.0 for x in grid):
                raise ValueError(f"{name} values must lie strictly inside (0, 1)")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ValueError(f"{name} must be strictly increasing")
        if self.trials <= 0:
            raise ValueError("trials must be positive")
        if self.cluster_map not in ("partition", "single"):
            raise ValueError("cluster_map must be 'partition' or 'single'")

    @classmethod
    def from_json(cls, obj: dict) -> "SweepConfig":
        opts = obj.get("solver_opts")
        solver_opts = SolverOptions(**opts) if opts else SolverOptions()
        return cls(model=Model(obj["model"]), n=int(obj["n"]),
                   alpha_grid=tuple(obj["alpha_grid"]), beta_grid=tuple(obj["beta_grid"]),
                   algorithms=tuple(obj["algorithms"]), trials=int(obj["trials"]),
                   master_seed=int(obj["master_seed"]),
                   cluster_map=obj.get("cluster_map", "partition"),
                   use_non_neighbors=bool(obj.get("use_non_neighbors", False)),
                   solver_opts=solver_opts)

    def cell_params(self, alpha: float, beta: float):
        """Derived model parameters of one grid cell, or None when skipped."""
        n = self.n
        K = int(round(n ** beta))
        if K < 2:
            return None
        r = max(1, n // K) if self.cluster_map == "partition" else 1
        if r * K > n:
            r = n // K
        if r < 1 or r * K > n:
            return None
        if self.model is Model.CLUSTERING:
            p = n ** (-alpha)
            q = p / 2.0
            if not 0 < q < p <= 1:
                return None
            return PlantedParams(n=n, r=r, K=K, p=p, q=q)
        mu = math.sqrt(n ** (-alpha))
        return SubmatrixParams(n_L=n, n_R=n, K_L=K, K_R=K, r=r, mu=mu)


def _fmt_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def run_sweep(cfg: SweepConfig, out_path, measure_time: bool = False) -> list:
    """Run the whole grid and write one CSV row per (alpha, beta, algorithm).

    Returns the rows as a list of dicts (same order as the file). The CSV is
    byte-identical across reruns with the same config unless ``measure_time``
    is set.
    """
    rows = []
    cell_index = 0
    for alpha in cfg.alpha_grid:
        for beta in cfg.beta_grid:
            if cfg.model is Model.CLUSTERING:
                predicted = asymptotic_regime_clustering(alpha, beta).value
            else:
                predicted = asymptotic_regime_submatrix(alpha, beta).value
            params = cfg.cell_params(alpha, beta)
            for algorithm in cfg.algorithms:
                cell_seed = derive_seed(cfg.master_seed, cell_index)
                cell_index += 1
                base = {"model": cfg.model.value, "algorithm": algorithm.value,
                        "n": cfg.n, "alpha": alpha, "beta": beta,
                        "predicted_regime": predicted}
                if params is None:
                    rows.append({**base, "r": None, "K": None, "p": None, "q": None,
                                 "mu": None, "trials": 0, "successes": 0,
                                 "success_rate": None, "wilson_lo": None,
                                 "wilson_hi": None, "wall_ms": 0.0})
                    continue
                start = time.perf_counter() if measure_time else 0.0
                report = run_trials(TrialConfig(
                    model=cfg.model, params=params, algorithm=algorithm,
                    trials=cfg.trials, master_seed=cell_seed,
                    solver_opts=cfg.solver_opts,
                    use_non_neighbors=cfg.use_non_neighbors), measure_time=measure_time)
                wall = (time.perf_counter() - start) * 1000.0 if measure_time else 0.0
                if cfg.model is Model.CLUSTERING:
                    per_model = {"r": params.r, "K": params.K, "p": params.p,
                                 "q": params.q, "mu": None}
                else:
                    per_model = {"r": params.r, "K": params.K_L, "p": None,
                                 "q": None, "mu": params.mu}
                rows.append({**base, **per_model, "trials": cfg.trials,
                             "successes": report.successes,
                             "success_rate": report.success_rate,
                             "wilson_lo": report.wilson_lo,
                             "wilson_hi": report.wilson_hi, "wall_ms": wall})
    with open(out_path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(SWEEP_CSV_COLUMNS)
        for row in rows:
            writer.writerow([_fmt_cell(row[col]) for col in SWEEP_CSV_COLUMNS])
    return rows
