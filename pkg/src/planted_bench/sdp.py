"""Convexified maximum-likelihood estimation.

Maximizes the linear objective <A, Y> over the intersection of

* the trace-norm (nuclear-norm) ball of a given radius,
* the unit box 0 <= Y_ij <= 1, and
* the hyperplane sum_ij Y_ij = total,

by gradient steps alternated with the two primitive projections below, with
correction terms carried across iterations (an ADMM splitting of the two
constraint blocks; see solve_convex for why the corrections must persist).
The objective is linear and the feasible set compact, so the iteration cannot
diverge, only converge slowly. :func:`dykstra_project` composes the same two
primitives into the exact Euclidean projection onto the intersection.

Success is certified by exact matrix equality after rounding, never by
objective comparison: a tied or unroundable outcome counts as failure.

Tighter relaxations exist (replacing the trace-norm ball with the cone of
positive-semidefinite matrices of fixed trace, row-sum caps, triangle
inequalities); any of them inherits the same recovery guarantees, and none is
implemented here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .core import (
    BiClusterAssignment,
    ClusterAssignment,
    assignment_to_cluster_matrix,
    bicluster_to_matrix,
    require_real_matrix,
)

Assignment = Union[ClusterAssignment, BiClusterAssignment]


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverOptions:
    """Knobs of the convex solver.

    ``step_size="auto"`` uses radius / ||A||_F. ``tol_obj`` scales the
    objective plateau test (range over a trailing 20-iteration window at most
    tol_obj * (1 + |objective|)). ``dykstra_inner_iters`` caps the final
    projection pass that pulls the returned iterate inside the constraint
    set. ``round_threshold`` is the entrywise 0/1 rounding cut.
    """

    max_iters: int = 2000
    step_size: Union[float, str] = "auto"
    tol_feas: float = 1e-6
    tol_obj: float = 1e-7
    dykstra_inner_iters: int = 50
    round_threshold: float = 0.5

    def __post_init__(self):
        if self.max_iters <= 0 or self.dykstra_inner_iters <= 0:
            raise ValueError("iteration counts must be positive")
        if self.step_size != "auto" and not float(self.step_size) > 0:
            raise ValueError("step_size must be positive or 'auto'")
        if self.tol_feas < 0 or self.tol_obj < 0:
            raise ValueError("tolerances must be nonnegative")
        if not 0.0 < self.round_threshold < 1.0:
            raise ValueError("round_threshold must lie in (0, 1)")


@dataclass(frozen=True)
class ConvexSolution:
    """Solver output; Y_hat, objective and feasibility_gap are certified by
    direct evaluation on the returned iterate."""

    Y_hat: np.ndarray
    objective: float
    feasibility_gap: float
    iterations: int
    converged: bool
    rounded: Optional[Assignment]
    exact_recovery: bool


def nuclear_norm(M: np.ndarray) -> float:
    if M.shape[0] == M.shape[1] and np.allclose(M, M.T, atol=1e-12, rtol=0.0):
        return float(np.abs(np.linalg.eigvalsh((M + M.T) / 2.0)).sum())
    return float(np.linalg.svd(M, compute_uv=False).sum())


def _l1_ball_project_sorted(s: np.ndarray, radius: float) -> np.ndarray:
    """Project a nonincreasing nonnegative vector onto the l1 ball, i.e. soft
    threshold at the exact pivot (the classic sorted-prefix rule)."""
    if s.sum() <= radius:
        return s
    css = np.cumsum(s)
    j = np.arange(1, len(s) + 1)
    shifted = s - (css - radius) / j
    rho = int(np.nonzero(shifted > 0)[0][-1]) + 1
    theta = (css[rho - 1] - radius) / rho
    return np.maximum(s - theta, 0.0)


def project_trace_ball(M: np.ndarray, radius: float) -> np.ndarray:
    """Frobenius projection onto {X : ||X||_* <= radius}.

    Full decomposition, project the singular values onto the l1 ball,
    reassemble. Symmetric inputs take the eigendecomposition path (signed
    soft threshold of the eigenvalues), which computes the same projection
    at about a third of the cost; the iterates of the clustering solver stay
    symmetric throughout. Already-feasible inputs are returned unchanged.
    """
    arr = require_real_matrix(M)
    if not radius > 0:
        raise ValueError("radius must be positive")
    symmetric = arr.shape[0] == arr.shape[1] and np.allclose(arr, arr.T, atol=1e-12, rtol=0.0)
    try:
        if symmetric:
            lam, q = np.linalg.eigh((arr + arr.T) / 2.0)
            mags = np.abs(lam)
            if mags.sum() <= radius:
                return arr
            order = np.argsort(mags)[::-1]
            proj_sorted = _l1_ball_project_sorted(mags[order], radius)
            mags2 = np.empty_like(mags)
            mags2[order] = proj_sorted
            out = (q * (np.sign(lam) * mags2)) @ q.T
            return (out + out.T) / 2.0
        u, s, vt = np.linalg.svd(arr, full_matrices=False)
    except np.linalg.LinAlgError as err:
        raise SolverError(f"decomposition did not converge during trace-ball projection: {err}")
    if s.sum() <= radius:
        return arr
    s_proj = _l1_ball_project_sorted(s, radius)
    return (u * s_proj) @ vt


def project_box_sum(M: np.ndarray, total: float) -> np.ndarray:
    """Frobenius projection onto {X : 0 <= X_ij <= 1, sum_ij X_ij = total}.

    The projection is clip(M - lam, 0, 1) with lam the root of the monotone
    piecewise-linear map lam -> sum(clip(M - lam, 0, 1)) - total. The entries
    are sorted once, the map is evaluated in closed form from prefix sums,
    and the linear piece containing the root is solved exactly, so the sum
    constraint holds to within 1e-10 * total.
    """
    arr = require_real_matrix(M)
    size = arr.size
    if not 0 < total < size:
        raise ValueError(f"total = {total} must lie strictly between 0 and {size}")
    flat = arr.ravel()
    if flat.min() >= 0.0 and flat.max() <= 1.0 and abs(flat.sum() - total) <= 1e-10 * total:
        return arr
    s = np.sort(flat)
    prefix = np.concatenate([[0.0], np.cumsum(s)])

    def g(lam: float) -> float:
        # Entries above lam+1 clamp to one; entries in (lam, lam+1] stay linear.
        lo = int(np.searchsorted(s, lam, side="right"))
        hi = int(np.searchsorted(s, lam + 1.0, side="right"))
        return (size - hi) + (prefix[hi] - prefix[lo]) - lam * (hi - lo)

    # Bisect over the breakpoint grid {x_i, x_i - 1}; g is nonincreasing.
    bp = np.sort(np.concatenate([s, s - 1.0]))
    if g(bp[0]) < total or g(bp[-1]) > total:
        raise SolverError("box-sum projection bracket failed")  # unreachable under the precondition
    lo_i, hi_i = 0, len(bp) - 1
    while hi_i - lo_i > 1:
        mid = (lo_i + hi_i) // 2
        if g(bp[mid]) >= total:
            lo_i = mid
        else:
            hi_i = mid
    # Solve the linear piece on [bp[lo_i], bp[hi_i]].
    lam0 = bp[lo_i]
    lo = int(np.searchsorted(s, lam0, side="right"))
    hi = int(np.searchsorted(s, lam0 + 1.0, side="right"))
    n_act = hi - lo
    if n_act == 0:
        lam = lam0 if abs(g(lam0) - total) <= abs(g(bp[hi_i]) - total) else bp[hi_i]
    else:
        lam = ((prefix[hi] - prefix[lo]) + (size - hi) - total) / n_act
        lam = min(max(lam, bp[lo_i]), bp[hi_i])
    out = np.clip(flat - lam, 0.0, 1.0)
    return out.reshape(arr.shape)


def feasibility_gap(Y: np.ndarray, radius: float, total: float,
                    nuc: Optional[float] = None) -> float:
    """Largest relative violation of the three constraint blocks."""
    if nuc is None:
        nuc = nuclear_norm(Y)
    box_low = max(0.0, float(-Y.min()))
    box_high = max(0.0, float(Y.max() - 1.0))
    sum_dev = abs(float(Y.sum()) - total) / total
    nuc_excess = max(0.0, nuc - radius) / radius
    return max(box_low, box_high, sum_dev, nuc_excess)


def dykstra_project(Z: np.ndarray, radius: float, total: float,
                    inner_iters: int = 50, tol_feas: float = 1e-6) -> np.ndarray:
    """Dykstra alternation between the trace ball and the box-sum polytope,
    converging to the Euclidean projection of Z onto their intersection;
    stops once the iterate is feasible for both to within tol_feas."""
    x = Z
    p_corr = np.zeros_like(Z)
    q_corr = np.zeros_like(Z)
    for _ in range(inner_iters):
        y = project_trace_ball(x + p_corr, radius)
        p_corr = x + p_corr - y
        x = project_box_sum(y + q_corr, total)
        q_corr = y + q_corr - x
        # The box-sum projection ran last, so only the trace ball can be violated.
        if nuclear_norm(x) <= radius * (1.0 + tol_feas):
            break
    return x


_PLATEAU_WINDOW = 20


def solve_convex(A: np.ndarray, radius: float, total: float,
                 opts: SolverOptions = SolverOptions(),
                 truth: Optional[Assignment] = None) -> ConvexSolution:
    """Ascend <A, Y> by alternating the two projections with persistent
    correction terms (an ADMM splitting of the two constraint blocks).

    Each iteration takes one gradient step of size eta = 1 / rho, projects
    onto the trace ball, then onto the box-sum polytope, carrying the
    correction (scaled dual) across iterations. Restarting the corrections
    every step, i.e. projected ascent with a fresh Dykstra pass per
    iteration, stalls before the rounding threshold whenever the trace ball
    is active at the optimum (it always is at a cluster matrix), because the
    alternation angle between the two sets collapses there; the persistent
    form resolves the active face at the same per-iteration cost.

    Terminates when the objective range over the trailing 20 iterations
    drops to ``tol_obj * (1 + |objective|)``, or at ``max_iters`` (then
    flagged ``converged=False``, never silently). The returned iterate is
    pulled inside the constraint set (Dykstra sweeps, then an exact shrink
    toward the feasible center if sweeps are exhausted), and its objective
    and feasibility gap are certified by direct evaluation. When ``truth``
    is supplied the final iterate is rounded and certified against it;
    otherwise ``rounded`` is None and ``exact_recovery`` False.
    """
    arr = require_real_matrix(A)
    if not radius > 0 or not 0 < total < arr.size:
        raise ValueError("radius/total inconsistent with any hypothesis")
    norm_a = float(np.linalg.norm(arr))
    if opts.step_size == "auto":
        eta = radius / norm_a if norm_a > 0 else 1.0
    else:
        eta = float(opts.step_size)
    center = np.full(arr.shape, total / arr.size)  # strictly interior point
    x = center
    u = np.zeros_like(arr)
    step = eta * arr
    alpha = 1.8  # over-relaxation, standard range (1, 2); halves the iteration count
    converged = False
    iterations = 0
    window: list = []
    obj = float((arr * x).sum())
    for iterations in range(1, opts.max_iters + 1):
        y = project_trace_ball(x - u + step, radius)
        y_rel = alpha * y + (1.0 - alpha) * x
        x = project_box_sum(y_rel + u, total)
        u = u + y_rel - x
        obj = float((arr * x).sum())
        window.append(obj)
        if len(window) > _PLATEAU_WINDOW:
            window.pop(0)
            if max(window) - min(window) <= opts.tol_obj * (1.0 + abs(obj)):
                converged = True
                break

    # The box-sum block is satisfied exactly; pull the iterate inside the
    # trace ball too. Dykstra sweeps first; if the tolerance is still not
    # met, shrink toward the interior point, which is exact and changes each
    # entry by at most the shrink factor.
    if nuclear_norm(x) > radius * (1.0 + opts.tol_feas):
        x = dykstra_project(x, radius, total, opts.dykstra_inner_iters, opts.tol_feas)
        nuc = nuclear_norm(x)
        if nuc > radius * (1.0 + opts.tol_feas):
            nuc_center = nuclear_norm(center)
            c = (radius - nuc_center) / (nuc - nuc_center)
            x = c * x + (1.0 - c) * center

    obj = float((arr * x).sum())
    gap = feasibility_gap(x, radius, total)
    rounded: Optional[Assignment] = None
    recovery = False
    if truth is not None:
        rounded, recovery = round_and_certify(x, truth, opts.round_threshold)
    return ConvexSolution(Y_hat=x, objective=obj, feasibility_gap=gap,
                          iterations=iterations, converged=converged,
                          rounded=rounded, exact_recovery=recovery)


def _cluster_from_binary(B: np.ndarray, r: int, K: int) -> Optional[ClusterAssignment]:
    """Assignment whose diagonal-one cluster matrix equals B, if any."""
    n = B.shape[0]
    if B.shape != (n, n) or not np.array_equal(B, B.T):
        return None
    diag = np.diag(B)
    labels = [0] * n
    groups = {}
    for i in range(n):
        if not diag[i]:
            if B[i].any():
                return None
            continue
        pattern = B[i].tobytes()
        groups.setdefault(pattern, []).append(i)
    if len(groups) != r or any(len(g) != K for g in groups.values()):
        return None
    for m, g in enumerate(sorted(groups.values()), start=1):
        for i in g:
            labels[i] = m
    try:
        cand = ClusterAssignment(tuple(labels), r, K)
    except ValueError:
        return None
    if np.array_equal(assignment_to_cluster_matrix(cand, diagonal_one=True).astype(bool), B):
        return cand
    return None


def _bicluster_from_binary(B: np.ndarray, r: int, K_L: int, K_R: int) -> Optional[BiClusterAssignment]:
    """Assignment whose bi-clustering matrix equals B, if any."""
    nL, nR = B.shape
    left_groups = {}
    right_nonzero = set()
    for i in range(nL):
        if B[i].any():
            left_groups.setdefault(B[i].tobytes(), []).append(i)
    if len(left_groups) != r or any(len(g) != K_L for g in left_groups.values()):
        return None
    left_labels = [0] * nL
    right_labels = [0] * nR
    for m, (pattern, g) in enumerate(sorted(left_groups.items(), key=lambda kv: kv[1]), start=1):
        cols = np.nonzero(np.frombuffer(pattern, dtype=bool))[0]
        if len(cols) != K_R:
            return None
        for i in g:
            left_labels[i] = m
        for j in cols:
            if j in right_nonzero:
                return None
            right_nonzero.add(int(j))
            right_labels[j] = m
    try:
        cand = BiClusterAssignment(tuple(left_labels), tuple(right_labels))
    except ValueError:
        return None
    if np.array_equal(bicluster_to_matrix(cand).astype(bool), B):
        return cand
    return None


def round_and_certify(Y_hat: np.ndarray, truth: Assignment,
                      threshold: float = 0.5):
    """Entrywise threshold of Y_hat, validated as an assignment matrix.

    Returns ``(assignment_or_None, exact_recovery)``: the rounded assignment
    when the 0/1 matrix is the cluster (diagonal-one convention) or
    bi-clustering matrix of some valid assignment with the truth's shape, and
    None when unroundable. ``exact_recovery`` is True iff the rounded matrix
    equals the truth's matrix exactly.
    """
    arr = require_real_matrix(Y_hat)
    B = arr >= threshold
    if isinstance(truth, ClusterAssignment):
        target = assignment_to_cluster_matrix(truth, diagonal_one=True).astype(bool)
        rounded = _cluster_from_binary(B, truth.r, truth.K)
    elif isinstance(truth, BiClusterAssignment):
        target = bicluster_to_matrix(truth).astype(bool)
        rounded = _bicluster_from_binary(B, truth.r, truth.K_L, truth.K_R)
    else:
        raise TypeError(f"unsupported truth type {type(truth)!r}")
    if target.shape != B.shape:
        raise ValueError("Y_hat shape disagrees with the truth assignment")
    return rounded, bool(np.array_equal(B, target))
