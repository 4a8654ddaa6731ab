"""Domain types shared by every other module.

Conventions used throughout the package:

* Cluster labels are 1-based; label 0 marks an isolated node. A single dense
  label vector therefore represents clustered and isolated nodes without
  optionals.
* Graphs are simple and undirected: the adjacency matrix is boolean,
  symmetric, and has a zero diagonal.
* Dense real matrices are plain ``numpy.ndarray`` objects (alias
  ``RealMatrix``); helpers below validate finiteness and serialize them with
  explicit ``rows``/``cols``/``entries`` fields.

All types are immutable after construction (numpy buffers are frozen), so
instances can be shared freely across concurrently running trials.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

RealMatrix = np.ndarray


class NoiseKind(str, Enum):
    """Noise menu for the submatrix model (sub-Gaussian with parameter 1)."""

    GAUSSIAN = "gaussian"
    RADEMACHER = "rademacher"
    NONE = "none"


def _frozen_array(values, dtype) -> np.ndarray:
    arr = np.asarray(values, dtype=dtype)
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


def require_real_matrix(m: RealMatrix) -> np.ndarray:
    """Validate a dense real matrix: 2-d, float, finite entries only."""
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite (no NaN/Inf)")
    return arr


def matrix_to_json(m: RealMatrix) -> dict:
    arr = require_real_matrix(m)
    return {"rows": int(arr.shape[0]), "cols": int(arr.shape[1]),
            "entries": [[float(x) for x in row] for row in arr]}


def matrix_from_json(obj: dict) -> np.ndarray:
    arr = require_real_matrix(np.asarray(obj["entries"], dtype=float))
    if arr.shape != (obj["rows"], obj["cols"]):
        raise ValueError("entries shape disagrees with rows/cols")
    return arr


@dataclass(frozen=True)
class PlantedParams:
    """Parameters of the planted clustering model.

    ``n`` nodes, ``r`` hidden clusters of size ``K`` each, in-cluster edge
    probability ``p`` and cross-cluster probability ``q``. ``p == q`` makes
    recovery meaningless and is rejected at construction. Both orientations
    ``p > q`` and ``p < q`` are valid; algorithms that assume ``p > q``
    expect the caller to flip the graph first (see :func:`flip_graph`).
    """

    n: int
    r: int
    K: int
    p: float
    q: float

    def __post_init__(self):
        if self.n <= 0 or self.r <= 0 or self.K <= 0:
            raise ValueError("n, r, K must be positive integers")
        if self.r * self.K > self.n:
            raise ValueError(f"r*K = {self.r * self.K} exceeds n = {self.n}")
        for name, v in (("p", self.p), ("q", self.q)):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} = {v} outside [0, 1]")
        if self.p == self.q:
            raise ValueError("p == q is rejected: the model carries no signal")

    @property
    def n_clustered(self) -> int:
        """Number of non-isolated nodes, r*K."""
        return self.r * self.K

    @property
    def n_isolated(self) -> int:
        """Number of isolated nodes, n - r*K."""
        return self.n - self.r * self.K

    def flipped(self) -> "PlantedParams":
        """Parameters of the complement graph: (p, q) -> (1-p, 1-q)."""
        return PlantedParams(self.n, self.r, self.K, 1.0 - self.p, 1.0 - self.q)

    def to_json(self) -> dict:
        return {"n": self.n, "r": self.r, "K": self.K, "p": self.p, "q": self.q}

    @classmethod
    def from_json(cls, obj: dict) -> "PlantedParams":
        return cls(n=int(obj["n"]), r=int(obj["r"]), K=int(obj["K"]),
                   p=float(obj["p"]), q=float(obj["q"]))


@dataclass(frozen=True)
class ClusterAssignment:
    """Ground-truth or recovered clustering as a dense label vector.

    ``labels[i]`` is the cluster of node ``i`` in {1..r}, or 0 if isolated.
    Exactly ``K`` nodes carry each nonzero label and exactly ``n - r*K``
    nodes carry label 0.
    """

    labels: tuple
    r: int
    K: int

    def __post_init__(self):
        labels = tuple(int(x) for x in self.labels)
        object.__setattr__(self, "labels", labels)
        counts = {}
        for x in labels:
            counts[x] = counts.get(x, 0) + 1
        for m in range(1, self.r + 1):
            if counts.get(m, 0) != self.K:
                raise ValueError(f"label {m} used {counts.get(m, 0)} times, expected K = {self.K}")
        n_isolated = len(labels) - self.r * self.K
        if counts.get(0, 0) != n_isolated:
            raise ValueError("label counts do not sum up: bad labels outside {0..r}")
        bad = set(counts) - set(range(self.r + 1))
        if bad:
            raise ValueError(f"labels outside {{0..r}}: {sorted(bad)}")

    @property
    def n(self) -> int:
        return len(self.labels)

    def clusters(self) -> list:
        """Member lists of clusters 1..r, each sorted ascending."""
        out = [[] for _ in range(self.r)]
        for i, x in enumerate(self.labels):
            if x > 0:
                out[x - 1].append(i)
        return out

    def isolated_nodes(self) -> list:
        return [i for i, x in enumerate(self.labels) if x == 0]

    def canonical(self) -> "ClusterAssignment":
        """Relabel clusters by smallest member index (order of first appearance)."""
        mapping = {}
        new = []
        for x in self.labels:
            if x == 0:
                new.append(0)
                continue
            if x not in mapping:
                mapping[x] = len(mapping) + 1
            new.append(mapping[x])
        return ClusterAssignment(tuple(new), self.r, self.K)

    def to_json(self) -> dict:
        return {"labels": list(self.labels), "r": self.r, "K": self.K}

    @classmethod
    def from_json(cls, obj: dict) -> "ClusterAssignment":
        return cls(tuple(int(x) for x in obj["labels"]), int(obj["r"]), int(obj["K"]))

    @classmethod
    def from_clusters(cls, n: int, clusters: Sequence[Sequence[int]]) -> "ClusterAssignment":
        if not clusters:
            raise ValueError("need at least one cluster")
        K = len(clusters[0])
        labels = [0] * n
        for m, members in enumerate(clusters, start=1):
            for i in members:
                labels[i] = m
        return cls(tuple(labels), len(clusters), K)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph: symmetric boolean adjacency, zero diagonal."""

    n: int
    adjacency: np.ndarray = field(repr=False)

    def __post_init__(self):
        adj = _frozen_array(self.adjacency, bool)
        if adj.shape != (self.n, self.n):
            raise ValueError(f"adjacency shape {adj.shape} != ({self.n}, {self.n})")
        if np.any(np.diag(adj)):
            raise ValueError("adjacency diagonal must be zero")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        object.__setattr__(self, "adjacency", adj)

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def edge_count(self) -> int:
        return int(self.adjacency.sum()) // 2

    def edges(self) -> list:
        ii, jj = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(ii.tolist(), jj.tolist()))

    def to_json(self) -> dict:
        return {"n": self.n, "adjacency": self.adjacency.astype(int).tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "Graph":
        return cls(int(obj["n"]), np.asarray(obj["adjacency"], dtype=bool))

    @classmethod
    def from_edges(cls, n: int, edges: Sequence[Sequence[int]]) -> "Graph":
        adj = np.zeros((n, n), dtype=bool)
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            adj[i, j] = True
            adj[j, i] = True
        return cls(n, adj)


@dataclass(frozen=True)
class SubmatrixParams:
    """Parameters of the submatrix localization (bi-clustering) model.

    ``r`` disjoint ``K_L x K_R`` blocks with elevated mean ``mu > 0`` hidden
    inside an ``n_L x n_R`` matrix of unit-parameter sub-Gaussian noise.
    """

    n_L: int
    n_R: int
    K_L: int
    K_R: int
    r: int
    mu: float
    noise: NoiseKind = NoiseKind.GAUSSIAN

    def __post_init__(self):
        object.__setattr__(self, "noise", NoiseKind(self.noise))
        if min(self.n_L, self.n_R, self.K_L, self.K_R, self.r) <= 0:
            raise ValueError("dimensions must be positive integers")
        if self.r * self.K_L > self.n_L:
            raise ValueError(f"r*K_L = {self.r * self.K_L} exceeds n_L = {self.n_L}")
        if self.r * self.K_R > self.n_R:
            raise ValueError(f"r*K_R = {self.r * self.K_R} exceeds n_R = {self.n_R}")
        if not self.mu > 0:
            raise ValueError("mu must be positive")

    @property
    def n(self) -> int:
        """max(n_L, n_R), the size scale used by the theory conditions."""
        return max(self.n_L, self.n_R)

    def to_json(self) -> dict:
        return {"n_L": self.n_L, "n_R": self.n_R, "K_L": self.K_L, "K_R": self.K_R,
                "r": self.r, "mu": self.mu, "noise": self.noise.value}

    @classmethod
    def from_json(cls, obj: dict) -> "SubmatrixParams":
        return cls(n_L=int(obj["n_L"]), n_R=int(obj["n_R"]), K_L=int(obj["K_L"]),
                   K_R=int(obj["K_R"]), r=int(obj["r"]), mu=float(obj["mu"]),
                   noise=NoiseKind(obj.get("noise", "gaussian")))


@dataclass(frozen=True)
class BiClusterAssignment:
    """Left/right cluster labels with aligned pairing.

    Label ``k >= 1`` on the left pairs with label ``k`` on the right; label 0
    marks isolated rows/columns. Every nonzero label present must appear on
    both sides, with a uniform count per side (K_L on the left, K_R on the
    right).
    """

    left_labels: tuple
    right_labels: tuple

    def __post_init__(self):
        left = tuple(int(x) for x in self.left_labels)
        right = tuple(int(x) for x in self.right_labels)
        object.__setattr__(self, "left_labels", left)
        object.__setattr__(self, "right_labels", right)
        r = max(left + right + (0,))
        for side, labels in (("left", left), ("right", right)):
            counts = {}
            for x in labels:
                if x < 0 or x > r:
                    raise ValueError(f"{side} label {x} outside {{0..{r}}}")
                counts[x] = counts.get(x, 0) + 1
            sizes = {counts.get(k, 0) for k in range(1, r + 1)}
            if r > 0 and (0 in sizes or len(sizes) != 1):
                raise ValueError(f"{side} clusters must all be present with equal size")

    @property
    def n_L(self) -> int:
        return len(self.left_labels)

    @property
    def n_R(self) -> int:
        return len(self.right_labels)

    @property
    def r(self) -> int:
        return max(self.left_labels + self.right_labels + (0,))

    @property
    def K_L(self) -> int:
        return self.left_labels.count(1) if self.r else 0

    @property
    def K_R(self) -> int:
        return self.right_labels.count(1) if self.r else 0

    def to_json(self) -> dict:
        return {"left_labels": list(self.left_labels), "right_labels": list(self.right_labels)}

    @classmethod
    def from_json(cls, obj: dict) -> "BiClusterAssignment":
        return cls(tuple(obj["left_labels"]), tuple(obj["right_labels"]))


def assignment_to_cluster_matrix(a: ClusterAssignment, diagonal_one: bool) -> np.ndarray:
    """0/1 cluster matrix of an assignment: Y[i, j] = 1 iff i, j share a
    nonzero label. The diagonal is 1 for clustered nodes when ``diagonal_one``
    is set and 0 otherwise (both conventions are used by different consumers,
    so the choice is explicit per call site)."""
    labels = np.asarray(a.labels)
    same = (labels[:, None] == labels[None, :]) & (labels[:, None] > 0)
    y = same.astype(float)
    if not diagonal_one:
        np.fill_diagonal(y, 0.0)
    return y


def assignments_equal_up_to_relabeling(a: ClusterAssignment, b: ClusterAssignment) -> bool:
    """True iff some permutation of cluster labels maps ``a`` to ``b``.

    Isolated sets must match exactly. Decided by canonicalizing both sides
    (relabel clusters by smallest member index), which is O(n) and
    deterministic."""
    if a.n != b.n or a.r != b.r or a.K != b.K:
        raise ValueError("assignments have mismatched n, r, or K")
    return a.canonical().labels == b.canonical().labels


def flip_graph(g: Graph) -> Graph:
    """Complement graph: edge iff no edge in ``g``; diagonal stays zero.

    A graph sampled with densities (p, q) flips into one sampled with
    (1-p, 1-q), which reduces the p < q orientation to p > q."""
    adj = ~g.adjacency
    adj = adj.copy()
    np.fill_diagonal(adj, False)
    return Graph(g.n, adj)


def bicluster_to_matrix(b: BiClusterAssignment) -> np.ndarray:
    """0/1 bi-clustering matrix: Y[i, j] = 1 iff left i and right j carry the
    same nonzero label (the union of the r aligned blocks)."""
    left = np.asarray(b.left_labels)
    right = np.asarray(b.right_labels)
    y = (left[:, None] == right[None, :]) & (left[:, None] > 0)
    return y.astype(float)


def dump_json(obj: dict, path) -> None:
    with open(path, "w") as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write("\n")
