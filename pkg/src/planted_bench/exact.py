"""Desk-scale combinatorial maximum-likelihood estimation by exhaustive
enumeration of the hypothesis class.

Enumeration is deliberately brute force: this module exists to be an oracle
for the polynomial-time algorithms, not to be fast. A budget guard (default
ten million hypotheses) refuses anything larger, reporting the exact count.

Ordering: node subsets are generated in colexicographic order and partitions
anchor the smallest unplaced node, so the stream of assignments is
deterministic and canonical (clusters labeled by smallest member).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations
from typing import Iterator, Union

import numpy as np

from .core import (
    BiClusterAssignment,
    ClusterAssignment,
    Graph,
    SubmatrixParams,
    require_real_matrix,
)

DEFAULT_BUDGET = 10**7


class EnumerationBudgetError(RuntimeError):
    """Raised when the hypothesis class is larger than the stated budget."""

    def __init__(self, count: int, budget: int):
        self.count = count
        self.budget = budget
        super().__init__(
            f"hypothesis class has exactly {count} elements, over the budget of {budget}; "
            f"raise the budget explicitly to enumerate anyway")


@dataclass(frozen=True)
class MleResult:
    """Best hypothesis found by exhaustive search.

    ``unique`` is False when two or more hypotheses tie at the optimum; the
    harness scores tied trials as failures since the success event requires a
    unique maximizer. ``enumerated`` counts hypotheses visited and equals the
    closed-form cardinality whenever enumeration completes.
    """

    best: Union[ClusterAssignment, BiClusterAssignment]
    objective: float
    unique: bool
    enumerated: int


def cluster_space_size(n: int, r: int, K: int) -> int:
    """Exact number of distinct clusterings: choose the r*K clustered nodes,
    then split them into r unordered groups of K. Arbitrary precision."""
    if r * K > n:
        raise ValueError(f"r*K = {r * K} exceeds n = {n}")
    n1 = r * K
    return math.comb(n, n1) * math.factorial(n1) // (math.factorial(r) * math.factorial(K) ** r)


def bicluster_space_size(n_L: int, n_R: int, K_L: int, K_R: int, r: int) -> int:
    """Number of distinct bi-clusterings: unordered left partition times
    unordered right partition times the r! block pairings."""
    return (cluster_space_size(n_L, r, K_L) * cluster_space_size(n_R, r, K_R)
            * math.factorial(r))


def _combinations_colex(n: int, k: int) -> Iterator[tuple]:
    """k-subsets of range(n) in colexicographic order."""
    if k == 0:
        yield ()
        return
    for top in range(k - 1, n):
        for rest in _combinations_colex(top, k - 1):
            yield rest + (top,)


def _partitions(nodes: tuple, r: int, K: int) -> Iterator[tuple]:
    """Unordered partitions of ``nodes`` into r groups of K, emitted as
    tuples of groups; each group is sorted and groups are ordered by their
    smallest member, which makes the labeling canonical."""
    if r == 0:
        yield ()
        return
    anchor, rest = nodes[0], nodes[1:]
    for mates_idx in _combinations_colex(len(rest), K - 1):
        group = (anchor,) + tuple(rest[i] for i in mates_idx)
        remaining = tuple(x for i, x in enumerate(rest) if i not in set(mates_idx))
        for tail in _partitions(remaining, r - 1, K):
            yield (group,) + tail


def enumerate_cluster_partitions(n: int, r: int, K: int,
                                 budget: int = DEFAULT_BUDGET) -> Iterator[tuple]:
    """Stream of cluster partitions as tuples of member tuples (canonical
    order). Refuses upfront when the class exceeds ``budget``."""
    count = cluster_space_size(n, r, K)
    if count > budget:
        raise EnumerationBudgetError(count, budget)
    for chosen in _combinations_colex(n, r * K):
        yield from _partitions(chosen, r, K)


def enumerate_cluster_assignments(n: int, r: int, K: int,
                                  budget: int = DEFAULT_BUDGET) -> Iterator[ClusterAssignment]:
    """Each valid assignment exactly once, canonical labels, deterministic order."""
    for clusters in enumerate_cluster_partitions(n, r, K, budget=budget):
        yield ClusterAssignment.from_clusters(n, clusters)


def _cluster_objective(adj: np.ndarray, clusters: tuple) -> int:
    # Sum over ordered pairs inside clusters; the diagonal is zero, so the
    # diagonal convention of the hypothesis matrix cannot change the argmax.
    total = 0
    for group in clusters:
        idx = np.asarray(group)
        total += int(adj[np.ix_(idx, idx)].sum())
    return total


def mle_clustering(A: Graph, r: int, K: int, budget: int = DEFAULT_BUDGET) -> MleResult:
    """Exhaustive maximizer of sum_ij A_ij Y_ij over all clusterings.

    Assumes the p > q orientation; for p < q the caller flips the graph
    first. The objective counts ordered pairs (twice the number of
    within-cluster edges).
    """
    adj = A.adjacency.astype(np.int64)
    best_clusters = None
    best_obj = None
    ties = 0
    visited = 0
    for clusters in enumerate_cluster_partitions(A.n, r, K, budget=budget):
        visited += 1
        obj = _cluster_objective(adj, clusters)
        if best_obj is None or obj > best_obj:
            best_obj = obj
            best_clusters = clusters
            ties = 1
        elif obj == best_obj:
            ties += 1
    assert best_clusters is not None
    return MleResult(best=ClusterAssignment.from_clusters(A.n, best_clusters),
                     objective=float(best_obj), unique=(ties == 1), enumerated=visited)


def _best_pairings(block_sums: np.ndarray):
    """Maximum-weight perfect matchings on an r x r block-sum matrix, by
    exhaustive scan over permutations (exact, desk-scale r)."""
    r = block_sums.shape[0]
    best_val = None
    best_perm = None
    ties = 0
    for perm in permutations(range(r)):
        val = float(sum(block_sums[k, perm[k]] for k in range(r)))
        if best_val is None or val > best_val:
            best_val, best_perm, ties = val, perm, 1
        elif val == best_val:
            ties += 1
    return best_val, best_perm, ties


def mle_submatrix(A: np.ndarray, params: SubmatrixParams,
                  budget: int = DEFAULT_BUDGET) -> MleResult:
    """Exhaustive maximizer of sum_ij A_ij Y_ij over all bi-clusterings.

    The search factors: enumerate unordered left and right partitions, then
    pair blocks exactly by maximum-weight matching on the r x r block-sum
    matrix. The objective is additive over matched blocks, so this is
    equivalent to (and exponentially cheaper than) joint enumeration; every
    pairing still counts toward ``enumerated`` and toward tie detection.
    """
    arr = require_real_matrix(A)
    nL, nR, KL, KR, r = params.n_L, params.n_R, params.K_L, params.K_R, params.r
    if arr.shape != (nL, nR):
        raise ValueError(f"matrix shape {arr.shape} != ({nL}, {nR})")
    total = bicluster_space_size(nL, nR, KL, KR, r)
    if total > budget:
        raise EnumerationBudgetError(total, budget)

    right_partitions = list(enumerate_cluster_partitions(nR, r, KR, budget=budget))
    # Row/column sums per block are what the objective needs.
    best = None  # (objective, left clusters, right clusters, pairing)
    ties = 0
    visited = 0
    n_pairings = math.factorial(r)
    for left in enumerate_cluster_partitions(nL, r, KL, budget=budget):
        left_idx = [np.asarray(g) for g in left]
        for right in right_partitions:
            visited += n_pairings
            right_idx = [np.asarray(g) for g in right]
            block = np.empty((r, r))
            for k, li in enumerate(left_idx):
                sub = arr[li]
                for l, ri in enumerate(right_idx):
                    block[k, l] = sub[:, ri].sum()
            val, perm, pair_ties = _best_pairings(block)
            if best is None or val > best[0]:
                best = (val, left, right, perm)
                ties = pair_ties
            elif val == best[0]:
                ties += pair_ties

    assert best is not None
    val, left, right, perm = best
    left_labels = [0] * nL
    right_labels = [0] * nR
    for k, group in enumerate(left):
        for i in group:
            left_labels[i] = k + 1
        for j in right[perm[k]]:
            right_labels[j] = k + 1
    assignment = BiClusterAssignment(tuple(left_labels), tuple(right_labels))
    return MleResult(best=assignment, objective=val, unique=(ties == 1),
                     enumerated=visited)
