"""Simple-regime recovery algorithms: degree/common-neighbor counting for the
clustering model, row/column/correlation thresholding for the submatrix
model, and element-wise thresholding for the high-SNR submatrix setting.

Inequality semantics follow each procedure's stated rule literally: the
counting algorithm isolates on strict "<" and links on strict ">", while the
submatrix thresholding isolates on "<=" and links on ">=". Boundary cases are
therefore model-specific (and tested).

"Declare error if inconsistency found" is interpreted as the weakest
condition under which the success event is well-defined: the linked
relation's connected components must be exactly r groups of the exact target
size. Components are extracted by union-find over above-threshold pairs;
transitivity violations inside a component do not by themselves trigger an
error, only size/count constraints do.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    BiClusterAssignment,
    ClusterAssignment,
    Graph,
    PlantedParams,
    SubmatrixParams,
    require_real_matrix,
)


@dataclass(frozen=True)
class Inconsistent:
    """Returned (never raised) when the thresholded relation is not a valid
    clustering; the harness scores it as a failed trial."""

    reason: str


@dataclass(frozen=True)
class CountingThresholds:
    """Decision thresholds of the counting algorithm, computed exactly from
    (n, K, p, q): isolate below (p-q)K/2 + qn, link above
    (p-q)^2 K/3 + 2Kpq + q^2 (n-2K)."""

    degree_threshold: float
    common_neighbor_threshold: float

    @classmethod
    def from_params(cls, params: PlantedParams, use_non_neighbors: bool = False) -> "CountingThresholds":
        n, K, p, q = params.n, params.K, params.p, params.q
        degree = (p - q) * K / 2.0 + q * n
        if use_non_neighbors:
            p, q = 1.0 - p, 1.0 - q
        common = (p - q) ** 2 * K / 3.0 + 2.0 * K * p * q + q * q * (n - 2 * K)
        return cls(degree_threshold=degree, common_neighbor_threshold=common)


@dataclass(frozen=True)
class ThresholdingThresholds:
    """Decision thresholds of the submatrix thresholding algorithm, computed
    exactly from SubmatrixParams. Left-pair correlations compare against
    mu^2 K_R / 2 (``corr_threshold``); right pairs use the transposed analog
    mu^2 K_L / 2."""

    row_threshold: float
    col_threshold: float
    corr_threshold: float
    block_threshold: float
    element_threshold: float

    @classmethod
    def from_params(cls, params: SubmatrixParams) -> "ThresholdingThresholds":
        mu, KL, KR = params.mu, params.K_L, params.K_R
        return cls(row_threshold=mu * KR / 2.0,
                   col_threshold=mu * KL / 2.0,
                   corr_threshold=mu * mu * KR / 2.0,
                   block_threshold=mu * KL * KR / 2.0,
                   element_threshold=mu / 2.0)


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)

    def components(self):
        groups = {}
        for x in self.parent:
            groups.setdefault(self.find(x), []).append(x)
        return [sorted(g) for g in sorted(groups.values())]


def _components_from_links(nodes, linked) -> list:
    """Connected components of the boolean relation ``linked`` restricted to
    ``nodes`` (an index array into linked's axes)."""
    uf = _UnionFind(list(nodes))
    for a_pos, i in enumerate(nodes):
        for j in nodes[a_pos + 1:]:
            if linked[i, j]:
                uf.union(i, j)
    return uf.components()


def _groups_to_labels(n, groups, expected_r, expected_size):
    if len(groups) != expected_r:
        return Inconsistent(f"found {len(groups)} groups, expected {expected_r}")
    for g in groups:
        if len(g) != expected_size:
            return Inconsistent(f"group of size {len(g)}, expected {expected_size}")
    labels = [0] * n
    for m, g in enumerate(sorted(groups), start=1):
        for i in g:
            labels[i] = m
    return labels


def common_neighbors(A: Graph, i: int, j: int) -> int:
    """Number of nodes adjacent to both i and j (i and j themselves never
    count: the diagonal is zero)."""
    if i == j:
        raise ValueError("common_neighbors needs two distinct nodes")
    return int((A.adjacency[i] & A.adjacency[j]).sum())


def counting_algorithm(A: Graph, params: PlantedParams,
                       use_non_neighbors: bool = False):
    """Degree/common-neighbor counting (p > q orientation).

    Step 1 declares node i isolated iff d_i < (p-q)K/2 + qn. Step 2 (r > 1
    only) links non-isolated pairs whose common-neighbor count exceeds the
    pair threshold and reads the clusters off the connected components. With
    ``use_non_neighbors`` step 2 counts common non-neighbors instead and the
    pair threshold swaps (p, q) -> (1-p, 1-q); step 1 is unchanged.

    Returns a ClusterAssignment, or Inconsistent when the components are not
    exactly r groups of size K.
    """
    if not params.p > params.q:
        raise ValueError("requires p > q; flip the graph and parameters first")
    if A.n != params.n:
        raise ValueError("graph size disagrees with params")
    thresholds = CountingThresholds.from_params(params, use_non_neighbors)
    degrees = A.degrees()
    non_isolated = np.nonzero(degrees >= thresholds.degree_threshold)[0]

    if len(non_isolated) != params.r * params.K:
        return Inconsistent(
            f"{len(non_isolated)} non-isolated nodes, expected {params.r * params.K}")

    if params.r == 1:
        labels = [0] * params.n
        for i in non_isolated:
            labels[int(i)] = 1
        return ClusterAssignment(tuple(labels), 1, params.K)

    adj = A.adjacency.astype(np.int64)
    if use_non_neighbors:
        comp = 1 - adj
        np.fill_diagonal(comp, 0)
        # Zero diagonal makes (comp @ comp)[i, j] range over k != i, j only.
        counts = comp @ comp
    else:
        counts = adj @ adj  # same exclusion via the zero diagonal of adj
    linked = counts > thresholds.common_neighbor_threshold
    groups = _components_from_links(non_isolated.tolist(), linked)
    labels = _groups_to_labels(params.n, groups, params.r, params.K)
    if isinstance(labels, Inconsistent):
        return labels
    return ClusterAssignment(tuple(labels), params.r, params.K)


def submatrix_thresholding(A: np.ndarray, params: SubmatrixParams):
    """Row/column-sum and correlation thresholding for submatrix localization.

    Step 1 isolates left node i iff its row sum is <= mu K_R / 2 (columns
    analogously with mu K_L / 2). Step 2 (r > 1) links non-isolated left
    pairs with row correlation >= mu^2 K_R / 2 (right pairs >= mu^2 K_L / 2)
    and reads clusters off the components. Step 3 pairs left cluster k with
    right cluster l iff the block sum is >= mu K_L K_R / 2; the pairing must
    be a perfect matching.

    Returns a BiClusterAssignment (right labels aligned to their left
    partners), or Inconsistent.
    """
    arr = require_real_matrix(A)
    if arr.shape != (params.n_L, params.n_R):
        raise ValueError(f"matrix shape {arr.shape} != ({params.n_L}, {params.n_R})")
    th = ThresholdingThresholds.from_params(params)
    r, KL, KR = params.r, params.K_L, params.K_R

    row_sums = arr.sum(axis=1)
    col_sums = arr.sum(axis=0)
    left_nodes = np.nonzero(row_sums > th.row_threshold)[0]
    right_nodes = np.nonzero(col_sums > th.col_threshold)[0]
    if len(left_nodes) != r * KL:
        return Inconsistent(f"{len(left_nodes)} non-isolated left nodes, expected {r * KL}")
    if len(right_nodes) != r * KR:
        return Inconsistent(f"{len(right_nodes)} non-isolated right nodes, expected {r * KR}")

    if r == 1:
        left_groups = [left_nodes.tolist()]
        right_groups = [right_nodes.tolist()]
    else:
        left_corr = arr @ arr.T
        right_corr = arr.T @ arr
        right_corr_threshold = params.mu ** 2 * KL / 2.0
        left_groups = _components_from_links(left_nodes.tolist(),
                                             left_corr >= th.corr_threshold)
        right_groups = _components_from_links(right_nodes.tolist(),
                                              right_corr >= right_corr_threshold)
        for side, groups, size in (("left", left_groups, KL), ("right", right_groups, KR)):
            if len(groups) != r:
                return Inconsistent(f"{len(groups)} {side} groups, expected {r}")
            for g in groups:
                if len(g) != size:
                    return Inconsistent(f"{side} group of size {len(g)}, expected {size}")

    # Associate left and right clusters by block sums; require a perfect matching.
    match = [-1] * r
    used_right = set()
    for k, ci in enumerate(left_groups):
        partners = []
        rows = arr[np.asarray(ci)]
        for l, dj in enumerate(right_groups):
            if rows[:, np.asarray(dj)].sum() >= th.block_threshold:
                partners.append(l)
        if len(partners) != 1:
            return Inconsistent(f"left group {k} matches {len(partners)} right groups")
        if partners[0] in used_right:
            return Inconsistent(f"right group {partners[0]} matched twice")
        used_right.add(partners[0])
        match[k] = partners[0]

    left_labels = [0] * params.n_L
    right_labels = [0] * params.n_R
    for k, ci in enumerate(left_groups):
        for i in ci:
            left_labels[i] = k + 1
        for j in right_groups[match[k]]:
            right_labels[j] = k + 1
    return BiClusterAssignment(tuple(left_labels), tuple(right_labels))


def elementwise_thresholding(A: np.ndarray, mu: float) -> np.ndarray:
    """0/1 matrix with ones exactly where A_ij >= mu / 2."""
    if not mu > 0:
        raise ValueError("mu must be positive")
    arr = require_real_matrix(A)
    return (arr >= mu / 2.0).astype(float)
