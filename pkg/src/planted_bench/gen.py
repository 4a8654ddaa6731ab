"""Seeded random instance generators for both models, plus model presets.

Determinism contract: (params, truth, seed) fully determine the output bits
within a build. The generator is numpy's PCG64 and per-pair edge draws consume
the stream in fixed row-major order over the upper triangle, so instances are
reproducible run to run. Cross-language bit-identity is not promised.

Concurrent trials should use disjoint seeds derived with
:func:`derive_seed`, a splitmix64-style mix of (master_seed, index).
"""

from __future__ import annotations

import csv
from enum import Enum

import numpy as np

from .core import (
    BiClusterAssignment,
    ClusterAssignment,
    Graph,
    NoiseKind,
    PlantedParams,
    SubmatrixParams,
    bicluster_to_matrix,
    require_real_matrix,
)

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(x: int) -> int:
    # Standard splitmix64 finalizer; stable across platforms and sessions.
    x = (x + _GOLDEN) & _MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= _MASK64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return seed


def derive_seed(master_seed: int, index: int) -> int:
    """Child seed for trial ``index``: hash(master_seed, index), collision-safe
    for any practical number of trials."""
    master_seed = check_seed(master_seed)
    return _splitmix64(master_seed ^ _splitmix64(index & _MASK64))


class ModelPreset(str, Enum):
    """Classical special cases of the planted clustering model."""

    R_DISJOINT_CLIQUE = "r_disjoint_clique"      # p = 1, 0 < q < 1
    PLANTED_DENSEST_SUBGRAPH = "planted_densest_subgraph"  # r = 1
    PLANTED_PARTITION = "planted_partition"      # r*K = n
    PLANTED_COLORING = "planted_coloring"        # p = 0, r*K = n
    CUSTOM = "custom"


def preset_params(kind: ModelPreset, n: int, r: int, K: int,
                  p: float | None = None, q: float | None = None) -> PlantedParams:
    """Fully populated PlantedParams obeying the preset's constraint.

    Density knobs that a preset pins down (p = 1 for disjoint cliques, p = 0
    for coloring) must be omitted or agree with the pinned value; violated
    structural constraints raise ValueError.
    """
    kind = ModelPreset(kind)
    if kind is ModelPreset.R_DISJOINT_CLIQUE:
        if p is not None and p != 1.0:
            raise ValueError("r-disjoint-clique preset forces p = 1")
        if q is None or not 0 < q < 1:
            raise ValueError("r-disjoint-clique preset needs 0 < q < 1")
        return PlantedParams(n, r, K, 1.0, q)
    if kind is ModelPreset.PLANTED_DENSEST_SUBGRAPH:
        if r != 1:
            raise ValueError("planted-densest-subgraph preset forces r = 1")
        if p is None or q is None:
            raise ValueError("planted-densest-subgraph preset needs p and q")
        return PlantedParams(n, 1, K, p, q)
    if kind is ModelPreset.PLANTED_PARTITION:
        if r * K != n:
            raise ValueError(f"planted-partition preset needs r*K = n, got {r * K} != {n}")
        if p is None or q is None:
            raise ValueError("planted-partition preset needs p and q")
        return PlantedParams(n, r, K, p, q)
    if kind is ModelPreset.PLANTED_COLORING:
        if p is not None and p != 0.0:
            raise ValueError("planted-coloring preset forces p = 0")
        if r * K != n:
            raise ValueError(f"planted-coloring preset needs r*K = n, got {r * K} != {n}")
        if q is None or not 0 < q < 1:
            raise ValueError("planted-coloring preset needs 0 < q < 1")
        return PlantedParams(n, r, K, 0.0, q)
    if p is None or q is None:
        raise ValueError("custom preset needs p and q")
    return PlantedParams(n, r, K, p, q)


def sample_assignment(params: PlantedParams, seed: int) -> ClusterAssignment:
    """Uniformly random valid assignment, deterministic given the seed."""
    rng = np.random.default_rng(check_seed(seed))
    perm = rng.permutation(params.n)
    labels = np.zeros(params.n, dtype=int)
    for m in range(params.r):
        labels[perm[m * params.K:(m + 1) * params.K]] = m + 1
    return ClusterAssignment(tuple(labels.tolist()), params.r, params.K)


def sample_planted_graph(params: PlantedParams, truth: ClusterAssignment, seed: int) -> Graph:
    """One draw of the planted graph: each unordered pair independently gets an
    edge with probability p if the endpoints share a nonzero label, else q."""
    if truth.n != params.n or truth.r != params.r or truth.K != params.K:
        raise ValueError("truth is inconsistent with params")
    rng = np.random.default_rng(check_seed(seed))
    n = params.n
    labels = np.asarray(truth.labels)
    same = (labels[:, None] == labels[None, :]) & (labels[:, None] > 0)
    prob = np.where(same, params.p, params.q)
    iu = np.triu_indices(n, k=1)
    u = rng.random(len(iu[0]))  # row-major over the upper triangle
    adj = np.zeros((n, n), dtype=bool)
    adj[iu] = u < prob[iu]
    adj |= adj.T
    return Graph(n, adj)


def sample_bicluster_assignment(params: SubmatrixParams, seed: int) -> BiClusterAssignment:
    """Uniformly random bi-clustering: independent uniform left and right
    partitions; left block k pairs with right block k."""
    rng = np.random.default_rng(check_seed(seed))

    def side(n, K):
        perm = rng.permutation(n)
        labels = np.zeros(n, dtype=int)
        for m in range(params.r):
            labels[perm[m * K:(m + 1) * K]] = m + 1
        return tuple(labels.tolist())

    return BiClusterAssignment(side(params.n_L, params.K_L), side(params.n_R, params.K_R))


def sample_submatrix_instance(params: SubmatrixParams, truth: BiClusterAssignment,
                              seed: int) -> np.ndarray:
    """A = mu * Y(truth) + noise, with i.i.d. noise per ``params.noise``:
    standard normal, Rademacher (+-1 equiprobable), or exact zeros."""
    if (truth.n_L, truth.n_R) != (params.n_L, params.n_R) or truth.r != params.r:
        raise ValueError("truth is inconsistent with params")
    if truth.r and (truth.K_L, truth.K_R) != (params.K_L, params.K_R):
        raise ValueError("truth block sizes disagree with params")
    rng = np.random.default_rng(check_seed(seed))
    shape = (params.n_L, params.n_R)
    if params.noise is NoiseKind.GAUSSIAN:
        noise = rng.standard_normal(shape)
    elif params.noise is NoiseKind.RADEMACHER:
        noise = rng.integers(0, 2, size=shape) * 2.0 - 1.0
    else:
        noise = np.zeros(shape)
    return params.mu * bicluster_to_matrix(truth) + noise


def write_edge_list(g: Graph, path) -> None:
    """Edge-list text export, one 0-indexed "i j" pair per line."""
    with open(path, "w") as f:
        for i, j in g.edges():
            f.write(f"{i} {j}\n")


def read_edge_list(path, n: int) -> Graph:
    edges = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            i, j = line.split()
            edges.append((int(i), int(j)))
    return Graph.from_edges(n, edges)


def write_matrix_csv(m: np.ndarray, path) -> None:
    arr = require_real_matrix(m)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        for row in arr:
            writer.writerow([repr(float(x)) for x in row])


def read_matrix_csv(path) -> np.ndarray:
    rows = []
    with open(path, newline="") as f:
        for record in csv.reader(f):
            if record:
                rows.append([float(x) for x in record])
    return require_real_matrix(np.asarray(rows))
