"""Bernoulli KL divergence, theorem-condition checkers, and the asymptotic
four-regime classifier.

The checkers are calculators, not oracles of truth: the theory behind them is
order-wise, with unspecified universal constants. Every constant here defaults
to 1 and is user-configurable through :class:`ConditionConstants`;
``ConditionConstants.paper()`` restores the few constants whose numeric values
are actually pinned down (1/192 for the clustering impossibility conditions,
1/12 for the submatrix one, 4 for element-wise thresholding).

Logarithms are natural throughout: the bounds are order-wise, hence base-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from enum import Enum
from typing import Optional

from .core import PlantedParams, SubmatrixParams


class RegimeLabel(str, Enum):
    """Algorithmic difficulty tiers, ordered easiest-last.

    HIGH_SNR applies only to the submatrix model, where a large enough mean
    makes the blocks trivially identifiable entry by entry. BOUNDARY marks
    inputs sitting exactly on a regime boundary line (the classifier never
    hides measure-zero lines by picking a side).
    """

    IMPOSSIBLE = "impossible"
    HARD = "hard"
    EASY = "easy"
    SIMPLE = "simple"
    HIGH_SNR = "high_snr"
    BOUNDARY = "boundary"


_REGIME_ORDER = {RegimeLabel.IMPOSSIBLE: 0, RegimeLabel.HARD: 1,
                 RegimeLabel.EASY: 2, RegimeLabel.SIMPLE: 3}


@dataclass(frozen=True)
class ConditionConstants:
    """Per-theorem multiplicative constants, all strictly positive.

    Clustering: impossible / mle / cvx / cvx_converse / simple1 / simple2 /
    simple_converse. Submatrix counterparts carry a ``_sub`` suffix;
    ``c_element`` scales the element-wise thresholding success condition.
    """

    c_impossible: float = 1.0
    c_mle: float = 1.0
    c_cvx: float = 1.0
    c_cvx_converse: float = 1.0
    c_simple1: float = 1.0
    c_simple2: float = 1.0
    c_simple_converse: float = 1.0
    c_impossible_sub: float = 1.0
    c_mle_sub: float = 1.0
    c_cvx_sub: float = 1.0
    c_cvx_converse_sub: float = 1.0
    c_simple1_sub: float = 1.0
    c_simple2_sub: float = 1.0
    c_simple_converse_sub: float = 1.0
    c_element: float = 1.0

    def __post_init__(self):
        for f in fields(self):
            if not getattr(self, f.name) > 0:
                raise ValueError(f"{f.name} must be strictly positive")

    @classmethod
    def paper(cls) -> "ConditionConstants":
        """The constants with explicit published values; the rest stay 1."""
        return cls(c_impossible=1.0 / 192.0, c_impossible_sub=1.0 / 12.0,
                   c_element=4.0)


@dataclass(frozen=True)
class ConditionRow:
    """One evaluated inequality: satisfied compares lhs against rhs in the
    stated orientation ('ge', 'gt', 'le', or 'lt')."""

    name: str
    lhs: float
    rhs: float
    orientation: str
    satisfied: bool

    def to_json(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs,
                "orientation": self.orientation, "satisfied": self.satisfied}


@dataclass(frozen=True)
class ConditionReport:
    """Evaluated conditions of one checker plus its regime suggestion."""

    checker: str
    rows: tuple
    satisfied: bool
    regime: Optional[RegimeLabel]

    def row(self, name: str) -> ConditionRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_json(self) -> dict:
        return {"checker": self.checker,
                "rows": [r.to_json() for r in self.rows],
                "satisfied": self.satisfied,
                "regime": self.regime.value if self.regime else None}

    def to_table(self) -> str:
        sym = {"ge": ">=", "gt": ">", "le": "<=", "lt": "<"}
        width = max([len(r.name) for r in self.rows] + [9])
        lines = [f"{'condition':<{width}}  {'lhs':>12}  op  {'rhs':>12}  satisfied"]
        for r in self.rows:
            lines.append(f"{r.name:<{width}}  {_fmt(r.lhs):>12}  {sym[r.orientation]:>2}  "
                         f"{_fmt(r.rhs):>12}  {str(r.satisfied).lower()}")
        verdict = self.regime.value if self.regime else "undetermined"
        lines.append(f"{self.checker}: satisfied={str(self.satisfied).lower()} "
                     f"regime={verdict}")
        return "\n".join(lines)


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf"
    return f"{x:.6g}"


def _row(name: str, lhs: float, rhs: float, orientation: str) -> ConditionRow:
    if orientation == "ge":
        ok = lhs >= rhs
    elif orientation == "gt":
        ok = lhs > rhs
    elif orientation == "le":
        ok = lhs <= rhs
    elif orientation == "lt":
        ok = lhs < rhs
    else:
        raise ValueError(orientation)
    return ConditionRow(name, float(lhs), float(rhs), orientation, bool(ok))


def bernoulli_kl(u: float, v: float) -> float:
    """KL divergence D(u || v) between Bernoulli(u) and Bernoulli(v), in nats.

    Conventions: 0*log 0 = 0, so u in {0, 1} is fine; D(u || v) = 0 iff
    u == v. An infinite divergence (v in {0, 1} with u != v) is returned as
    math.inf rather than raised, so condition comparisons stay total.
    """
    if not 0.0 <= u <= 1.0 or not 0.0 <= v <= 1.0:
        raise ValueError(f"u = {u}, v = {v} must lie in [0, 1]")
    if u == v:
        return 0.0
    if v == 0.0 or v == 1.0:
        return math.inf
    total = 0.0
    if u > 0.0:
        total += u * math.log(u / v)
    if u < 1.0:
        total += (1.0 - u) * math.log((1.0 - u) / (1.0 - v))
    return total


def _safe_log_ratio(p: float, q: float) -> float:
    # log(p/q) with the conventions matching bernoulli_kl: p*log(p/q) is the
    # dominant impossibility term; p = 0 contributes 0, q = 0 blows up.
    if p == 0.0:
        return 0.0
    if q == 0.0:
        return math.inf
    return math.log(p / q)


def check_impossible_clustering(params: PlantedParams,
                                consts: ConditionConstants = ConditionConstants()) -> ConditionReport:
    """Impossibility conditions for clustering (information barrier).

    Requires the p > q orientation (flip the model first otherwise). Rows
    cover the two KL conditions (either one suffices for the impossibility
    verdict) plus their three Taylor-expansion simplifications. All
    right-hand sides are scaled by ``c_impossible``; the published values are
    1/192 (and 1/193 for the Kp simplification, which we fold into the same
    constant). The underlying statement additionally assumes
    128 <= K <= n/2; the calculator does not gate on that.
    """
    n, r, K, p, q = params.n, params.r, params.K, params.p, params.q
    if not p > q:
        raise ValueError("requires p > q; flip the model first")
    c = consts.c_impossible
    log_rk_cap = min(math.log(r * K), float(K))
    rows = (
        _row("kl_reverse_small", K * bernoulli_kl(q, p), c * log_rk_cap, "le"),
        _row("kl_forward_small", K * bernoulli_kl(p, q), c * math.log(n), "le"),
        _row("gap_sq_small", K * (p - q) ** 2, c * q * (1 - q) * math.log(n), "le"),
        _row("kp_small", K * p, c * log_rk_cap, "le"),
        _row("kp_logratio_small", K * p * _safe_log_ratio(p, q), c * math.log(n), "le"),
    )
    impossible = rows[0].satisfied or rows[1].satisfied
    return ConditionReport("impossible_clustering", rows, impossible,
                           RegimeLabel.IMPOSSIBLE if impossible else None)


def check_mle_clustering(params: PlantedParams, gamma: float = 1.0,
                         consts: ConditionConstants = ConditionConstants()) -> ConditionReport:
    """Success conditions for the exhaustive MLE (both KL rows must hold).

    The three lower-bound simplifications are reported as extra rows but do
    not gate the verdict.
    """
    n, r, K, p, q = params.n, params.r, params.K, params.p, params.q
    if not p > q:
        raise ValueError("requires p > q; flip the model first")
    if gamma < 1.0:
        raise ValueError("gamma must be >= 1")
    c = consts.c_mle
    rows = (
        _row("kl_reverse_large", K * bernoulli_kl(q, p), c * math.log(gamma * r * K), "ge"),
        _row("kl_forward_large", K * bernoulli_kl(p, q), c * math.log(n), "ge"),
        _row("gap_sq_large", K * (p - q) ** 2, c * q * (1 - q) * math.log(n), "ge"),
        _row("kp_large", K * p, c * math.log(gamma * r * K), "ge"),
        _row("kp_logratio_large", K * p * _safe_log_ratio(p, q), c * math.log(n), "ge"),
    )
    ok = rows[0].satisfied and rows[1].satisfied
    return ConditionReport("mle_clustering", rows, ok,
                           RegimeLabel.HARD if ok else None)


def check_cvx_clustering(params: PlantedParams,
                         consts: ConditionConstants = ConditionConstants()) -> ConditionReport:
    """Success condition for the trace-norm convexified MLE:
    K^2 (p-q)^2 >= c * [p(1-q) K log n + q(1-q) n]."""
    n, K, p, q = params.n, params.K, params.p, params.q
    if not p > q:
        raise ValueError("requires p > q; flip the model first")
    lhs = (K * (p - q)) ** 2
    rhs = consts.c_cvx * (p * (1 - q) * K * math.log(n) + q * (1 - q) * n)
    rows = (_row("spectral_snr", lhs, rhs, "ge"),)
    ok = rows[0].satisfied
    return ConditionReport("cvx_clustering", rows, ok, RegimeLabel.EASY if ok else None)


def check_cvx_converse_clustering(params: PlantedParams,
                                  consts: ConditionConstants = ConditionConstants(),
                                  eps0: float = 0.05) -> ConditionReport:
    """Failure condition for the convexified MLE (spectral barrier):
    K^2 (p-q)^2 <= c * (K p + q n), under the side conditions
    log n <= K <= n/2, q >= log n / n, and p <= 1 - eps0."""
    n, K, p, q = params.n, params.K, params.p, params.q
    if not p > q:
        raise ValueError("requires p > q; flip the model first")
    lhs = (K * (p - q)) ** 2
    rhs = consts.c_cvx_converse * (K * p + q * n)
    rows = (
        _row("spectral_barrier", lhs, rhs, "le"),
        _row("side_k_low", float(K), math.log(n), "ge"),
        _row("side_k_high", float(K), n / 2.0, "le"),
        _row("side_q_low", q, math.log(n) / n, "ge"),
        _row("side_p_high", p, 1.0 - eps0, "le"),
    )
    ok = all(r.satisfied for r in rows)
    return ConditionReport("cvx_converse_clustering", rows, ok, None)


def _simple_pair_rhs(n: int, K: int, p: float, q: float) -> float:
    # Variance proxy of the pairwise count statistic.
    return K * p * p * (1 - q * q) + n * q * q * (1 - q * q)


def check_simple_clustering(params: PlantedParams,
                            consts: ConditionConstants = ConditionConstants(),
                            use_non_neighbors: bool = False) -> ConditionReport:
    """Success conditions for the degree/common-neighbor counting algorithm.

    Row one (isolated-node detection): K^2 (p-q)^2 >= c1 [K p (1-q) +
    n q (1-q)] log n. Row two (cluster separation, r > 1 only):
    K^2 (p-q)^4 >= c2 [K p^2 (1-q^2) + n q^2 (1-q^2)] log n; with
    ``use_non_neighbors`` the second row swaps (p, q) -> (1-p, 1-q),
    matching the common non-neighbor variant of step 2.
    """
    n, r, K, p, q = params.n, params.r, params.K, params.p, params.q
    if not p > q:
        raise ValueError("requires p > q; flip the model first")
    c1, c2 = consts.c_simple1, consts.c_simple2
    rows = [
        _row("degree_separation",
             (K * (p - q)) ** 2,
             c1 * (K * p * (1 - q) + n * q * (1 - q)) * math.log(n), "ge"),
    ]
    if r > 1:
        pp, qq = ((1 - p, 1 - q) if use_non_neighbors else (p, q))
        rows.append(_row("pair_count_separation",
                         K * K * (p - q) ** 4,
                         c2 * _simple_pair_rhs(n, K, pp, qq) * math.log(n), "ge"))
    ok = all(r_.satisfied for r_ in rows)
    return ConditionReport("simple_clustering", tuple(rows), ok,
                           RegimeLabel.SIMPLE if ok else None)


def check_simple_converse_clustering(params: PlantedParams,
                                     consts: ConditionConstants = ConditionConstants(),
                                     eps0: float = 0.05) -> ConditionReport:
    """Failure conditions for the counting algorithm (variance barrier).

    Isolated-node detection fails when K^2 (p-q)^2 < c [(K p + n q) log(rK) +
    n q log(n - rK)]; cluster recovery fails when K^2 (p-q)^4 <
    c (K p^2 + n q^2) log(rK). Side rows carry the technical hypotheses.
    """
    n, r, K, p, q = params.n, params.r, params.K, params.p, params.q
    if not p > q:
        raise ValueError("requires p > q; flip the model first")
    c = consts.c_simple_converse
    n2 = n - r * K
    iso_rhs = (K * p + n * q) * math.log(r * K)
    if n2 > 1:
        iso_rhs += n * q * math.log(n2)
    rows = (
        _row("degree_overlap", (K * (p - q)) ** 2, c * iso_rhs, "lt"),
        _row("pair_count_overlap", K * K * (p - q) ** 4,
             c * (K * p * p + n * q * q) * math.log(r * K), "lt"),
        _row("side_k_high", float(K), n / 2.0, "le"),
        _row("side_p_high", p, 1.0 - eps0, "le"),
        _row("side_q_low", q, math.log(n) / n, "ge"),
        _row("side_counts", K * p * p + n * q * q, math.log(n), "ge"),
    )
    ok = (rows[0].satisfied or rows[1].satisfied) and all(r_.satisfied for r_ in rows[2:])
    return ConditionReport("simple_converse_clustering", rows, ok, None)


def check_submatrix_conditions(params: SubmatrixParams,
                               consts: ConditionConstants = ConditionConstants()) -> ConditionReport:
    """One row per submatrix-model condition, with an overall regime suggestion.

    Covers the impossibility bound, the MLE and convexified-MLE success
    bounds, the convex converse (square instances only), the two thresholding
    success bounds, their converses, and the element-wise thresholding
    success/failure pair. The suggestion picks the cheapest tier whose
    success condition holds (high-SNR, then simple, easy, hard); failing all
    of those it reports impossible when the impossibility row holds, else
    boundary (undetermined at the supplied constants).
    """
    nL, nR, KL, KR, r, mu = (params.n_L, params.n_R, params.K_L, params.K_R,
                             params.r, params.mu)
    n = params.n
    mu2 = mu * mu
    logn = math.log(n)
    rows = [
        _row("impossible",
             mu2,
             consts.c_impossible_sub * max(math.log(nR - KR) / KL if nR > KR else 0.0,
                                           math.log(nL - KL) / KR if nL > KL else 0.0),
             "le"),
        _row("mle", mu2, consts.c_mle_sub * logn / min(KL, KR), "ge"),
        _row("cvx", mu2,
             consts.c_cvx_sub * (logn / min(KL, KR) + n / (KL * KR)), "ge"),
    ]
    if nL == nR and KL == KR:
        rows.append(_row("cvx_converse", mu2,
                         consts.c_cvx_converse_sub * nL / (KL * KL), "le"))
    simple_iso_rhs = max(nL * math.log(nR) / (KL * KL), nR * math.log(nL) / (KR * KR))
    rows.append(_row("simple_isolated", mu2,
                     consts.c_simple1_sub * simple_iso_rhs, "ge"))
    rows.append(_row("simple_isolated_converse", mu2,
                     consts.c_simple_converse_sub * simple_iso_rhs, "le"))
    if r > 1:
        pair_rhs = max(nL * math.log(r * KR) / (KL * KL), nR * math.log(r * KL) / (KR * KR))
        rows.append(_row("simple_pairing", mu2 * mu2,
                         consts.c_simple2_sub * pair_rhs, "ge"))
        rows.append(_row("simple_pairing_converse", mu2 * mu2,
                         consts.c_simple_converse_sub * pair_rhs, "le"))
    rows.append(_row("element_success", mu2, consts.c_element * logn, "gt"))
    rows.append(_row("element_failure", mu2, 4.0 * logn, "le"))

    report = {r_.name: r_.satisfied for r_ in rows}
    simple_ok = report["simple_isolated"] and report.get("simple_pairing", True)
    if report["element_success"]:
        regime = RegimeLabel.HIGH_SNR
    elif simple_ok:
        regime = RegimeLabel.SIMPLE
    elif report["cvx"]:
        regime = RegimeLabel.EASY
    elif report["mle"]:
        regime = RegimeLabel.HARD
    elif report["impossible"]:
        regime = RegimeLabel.IMPOSSIBLE
    else:
        regime = RegimeLabel.BOUNDARY
    satisfied = regime not in (RegimeLabel.IMPOSSIBLE, RegimeLabel.BOUNDARY)
    return ConditionReport("submatrix_conditions", tuple(rows), satisfied, regime)


def _asymptotic_regime(alpha: float, beta: float) -> RegimeLabel:
    if not 0.0 < alpha < 1.0 or not 0.0 < beta < 1.0:
        raise ValueError("alpha and beta must lie strictly inside (0, 1)")
    b_info = alpha                 # information limit
    b_comp = (1.0 + alpha) / 2.0   # conjectured computational limit
    b_simple = alpha + 0.5         # counting/thresholding limit
    if beta in (b_info, b_comp, b_simple):
        return RegimeLabel.BOUNDARY
    if beta < b_info:
        return RegimeLabel.IMPOSSIBLE
    if beta < b_comp:
        return RegimeLabel.HARD
    if beta < b_simple:
        return RegimeLabel.EASY
    return RegimeLabel.SIMPLE


def asymptotic_regime_clustering(alpha: float, beta: float) -> RegimeLabel:
    """Regime of the scaling p = 2q = n^-alpha, K = n^beta as n grows.

    Open regions: impossible for beta < alpha, hard up to (1+alpha)/2 (the
    conjectured computational limit), easy up to alpha + 1/2, simple above.
    Points exactly on a boundary line return BOUNDARY.
    """
    return _asymptotic_regime(alpha, beta)


def asymptotic_regime_submatrix(alpha: float, beta: float) -> RegimeLabel:
    """Regime of the scaling mu^2 = n^-alpha, K_L = K_R = n^beta on square
    instances; the boundary geometry is identical to the clustering map."""
    return _asymptotic_regime(alpha, beta)


def regime_at_least(a: RegimeLabel, b: RegimeLabel) -> bool:
    """True when label ``a`` is at least as easy as ``b`` (both orderable)."""
    return _REGIME_ORDER[a] >= _REGIME_ORDER[b]
