import math

import mpmath
import numpy as np
import pytest

from planted_bench.core import PlantedParams, SubmatrixParams
from planted_bench.regimes import (
    ConditionConstants,
    RegimeLabel,
    asymptotic_regime_clustering,
    asymptotic_regime_submatrix,
    bernoulli_kl,
    check_cvx_clustering,
    check_cvx_converse_clustering,
    check_impossible_clustering,
    check_mle_clustering,
    check_simple_clustering,
    check_simple_converse_clustering,
    check_submatrix_conditions,
    regime_at_least,
)


def kl_oracle(u, v):
    """High-precision Bernoulli KL in nats (50 significant digits)."""
    with mpmath.workdps(50):
        u, v = mpmath.mpf(u), mpmath.mpf(v)
        total = mpmath.mpf(0)
        if u > 0:
            total += u * mpmath.log(u / v)
        if u < 1:
            total += (1 - u) * mpmath.log((1 - u) / (1 - v))
        return float(total)


def test_bernoulli_kl_zero_at_equality():
    for x in (0.0, 0.3, 1.0):
        assert bernoulli_kl(x, x) == 0.0


@pytest.mark.parametrize("u,v", [(1.0, 0.5), (0.5, 0.25), (0.9, 0.1), (0.01, 0.97)])
def test_bernoulli_kl_against_oracle(u, v):
    assert bernoulli_kl(u, v) == pytest.approx(kl_oracle(u, v), rel=1e-12)


def test_bernoulli_kl_frozen_values():
    assert bernoulli_kl(1.0, 0.5) == pytest.approx(0.6931471805599453, abs=1e-15)
    assert bernoulli_kl(0.5, 0.25) == pytest.approx(0.14384103622589045, abs=1e-15)


def test_bernoulli_kl_infinite_and_domain():
    assert bernoulli_kl(0.3, 0.0) == math.inf
    assert bernoulli_kl(0.3, 1.0) == math.inf
    assert bernoulli_kl(1.0, 0.0) == math.inf
    with pytest.raises(ValueError):
        bernoulli_kl(-0.1, 0.5)
    with pytest.raises(ValueError):
        bernoulli_kl(0.5, 1.5)


def _grid(num):
    return (np.arange(1, num + 1)) / (num + 1)


def test_kl_upper_bound_on_grid():
    # D(u||v) <= (u-v)^2 / (v (1-v))
    for u in _grid(40):
        for v in _grid(40):
            bound = (u - v) ** 2 / (v * (1 - v))
            assert bernoulli_kl(u, v) <= bound + 1e-12 + 1e-12 * bound


def test_kl_lower_bound_on_grid():
    # D(u||v) >= (u-v)^2 / (2 (u v max)(1 - u v min))
    for u in _grid(40):
        for v in _grid(40):
            bound = (u - v) ** 2 / (2 * max(u, v) * (1 - min(u, v)))
            assert bernoulli_kl(u, v) >= bound - 1e-12 - 1e-12 * bound


def test_kl_midpoint_bound_on_grid():
    # D((p+q)/2 || q) >= D(p||q)/36 and the mirrored form, for 0 < q < p < 1.
    g = _grid(40)
    for q in g:
        for p in g:
            if not q < p:
                continue
            mid = (p + q) / 2
            assert bernoulli_kl(mid, q) >= bernoulli_kl(p, q) / 36 - 1e-12
            assert bernoulli_kl(mid, p) >= bernoulli_kl(q, p) / 36 - 1e-12


def test_impossible_checker_near_equal_densities():
    params = PlantedParams(n=1000, r=5, K=100, p=0.201, q=0.2)
    report = check_impossible_clustering(params, ConditionConstants.paper())
    assert report.satisfied
    assert report.regime is RegimeLabel.IMPOSSIBLE
    assert report.row("kl_reverse_small").satisfied
    assert report.row("kl_forward_small").satisfied


def test_impossible_checker_planted_clique_not_impossible():
    params = PlantedParams(n=1000, r=1, K=200, p=1.0, q=0.5)
    report = check_impossible_clustering(params, ConditionConstants.paper())
    row = report.row("kl_forward_small")
    assert row.lhs == pytest.approx(200 * math.log(2))
    assert row.rhs == pytest.approx(math.log(1000) / 192)
    assert not report.satisfied


def test_impossible_checker_infinite_divergence():
    params = PlantedParams(n=50, r=2, K=5, p=1.0, q=0.0)
    report = check_impossible_clustering(params)
    assert not report.satisfied  # both KL sides are infinite


def test_mle_checker_strong_signal():
    params = PlantedParams(n=200, r=2, K=50, p=0.9, q=0.1)
    report = check_mle_clustering(params, gamma=1.0)
    row = report.row("kl_forward_large")
    assert row.lhs == pytest.approx(50 * kl_oracle(0.9, 0.1))
    assert row.lhs > row.rhs
    assert report.satisfied and report.regime is RegimeLabel.HARD


def test_mle_checker_vanishing_gap():
    params = PlantedParams(n=200, r=2, K=50, p=0.5 + 1e-9, q=0.5)
    assert not check_mle_clustering(params).satisfied


def test_mle_checker_single_node_clusters():
    params = PlantedParams(n=200, r=2, K=1, p=0.9, q=0.1)
    report = check_mle_clustering(params)
    assert report.row("kl_forward_large").lhs == pytest.approx(kl_oracle(0.9, 0.1))
    assert not report.satisfied


def test_cvx_checker_example_values():
    params = PlantedParams(n=150, r=3, K=50, p=0.6, q=0.2)
    report = check_cvx_clustering(params)
    row = report.row("spectral_snr")
    assert row.lhs == pytest.approx(400.0)
    assert row.rhs == pytest.approx(0.6 * 0.8 * 50 * math.log(150) + 0.2 * 0.8 * 150)
    assert report.satisfied and report.regime is RegimeLabel.EASY


def test_cvx_checker_fails_on_vanishing_gap_and_spectral_barrier():
    tiny = PlantedParams(n=150, r=3, K=50, p=0.2 + 1e-12, q=0.2)
    assert not check_cvx_clustering(tiny).satisfied
    barrier = PlantedParams(n=10000, r=1, K=50, p=0.6, q=0.2)
    report = check_cvx_clustering(barrier)
    assert not report.satisfied  # q(1-q)n term dominates


def test_cvx_converse_checker():
    params = PlantedParams(n=300, r=15, K=20, p=0.10, q=0.06)
    report = check_cvx_converse_clustering(params)
    assert report.row("spectral_barrier").satisfied
    assert report.satisfied


def test_simple_checker_directions():
    good = PlantedParams(n=400, r=5, K=80, p=0.9, q=0.1)
    assert check_simple_clustering(good).satisfied
    bad = PlantedParams(n=400, r=20, K=20, p=0.30, q=0.25)
    assert not check_simple_clustering(bad).satisfied
    assert check_simple_converse_clustering(bad).satisfied


def test_simple_checker_non_neighbor_variant():
    # Dense graphs: the non-neighbor pair statistic has smaller variance, so
    # its sufficient condition is weaker (Remark-style swap).
    params = PlantedParams(n=400, r=2, K=200, p=0.98, q=0.90)
    with_n = check_simple_clustering(params, use_non_neighbors=True)
    without = check_simple_clustering(params, use_non_neighbors=False)
    assert with_n.row("pair_count_separation").rhs < without.row("pair_count_separation").rhs


def test_submatrix_conditions_examples():
    p1 = SubmatrixParams(n_L=100, n_R=100, K_L=10, K_R=10, r=1, mu=0.1)
    rep1 = check_submatrix_conditions(p1, ConditionConstants.paper())
    row = rep1.row("impossible")
    assert row.rhs == pytest.approx(math.log(90) / 10 / 12)
    assert row.satisfied and rep1.regime is RegimeLabel.IMPOSSIBLE

    n = 100
    p2 = SubmatrixParams(n_L=n, n_R=n, K_L=10, K_R=10, r=2,
                         mu=math.sqrt(64 * math.log(n)))
    rep2 = check_submatrix_conditions(p2)
    assert rep2.row("element_success").satisfied
    assert rep2.regime is RegimeLabel.HIGH_SNR

    p3 = SubmatrixParams(n_L=100, n_R=100, K_L=50, K_R=50, r=1,
                         mu=math.sqrt(4 / 100))
    rep3 = check_submatrix_conditions(p3)
    assert not rep3.row("cvx").satisfied


GOLDEN = [
    (0.25, 0.2, RegimeLabel.IMPOSSIBLE),
    (0.25, 0.5, RegimeLabel.HARD),
    (0.25, 0.7, RegimeLabel.EASY),
    (0.25, 0.8, RegimeLabel.SIMPLE),
    (0.2, 0.25, RegimeLabel.HARD),
    (0.5, 0.25, RegimeLabel.IMPOSSIBLE),
    (0.7, 0.25, RegimeLabel.IMPOSSIBLE),
    (0.8, 0.25, RegimeLabel.IMPOSSIBLE),
    (0.25, 0.25, RegimeLabel.BOUNDARY),
    (0.25, 0.625, RegimeLabel.BOUNDARY),
    (0.25, 0.75, RegimeLabel.BOUNDARY),
    (0.5, 0.75, RegimeLabel.BOUNDARY),
]


@pytest.mark.parametrize("alpha,beta,expected", GOLDEN)
def test_asymptotic_regime_golden(alpha, beta, expected):
    assert asymptotic_regime_clustering(alpha, beta) is expected
    assert asymptotic_regime_submatrix(alpha, beta) is expected


def test_asymptotic_regime_rejects_out_of_range():
    for alpha, beta in [(0.0, 0.5), (1.0, 0.5), (0.5, 0.0), (0.5, 1.0), (-0.1, 0.5)]:
        with pytest.raises(ValueError):
            asymptotic_regime_clustering(alpha, beta)


def test_regime_monotone_in_beta():
    # For fixed alpha, increasing beta never moves toward a harder regime.
    order = {RegimeLabel.IMPOSSIBLE: 0, RegimeLabel.HARD: 1,
             RegimeLabel.EASY: 2, RegimeLabel.SIMPLE: 3}
    for alpha in np.linspace(0.05, 0.95, 19):
        prev = -1
        for beta in np.linspace(0.01, 0.99, 197):
            label = asymptotic_regime_clustering(float(alpha), float(beta))
            if label is RegimeLabel.BOUNDARY:
                continue
            assert order[label] >= prev
            prev = order[label]


def test_regions_partition_the_square():
    # Off the three boundary lines, exactly one of the four region predicates
    # holds and it matches the classifier.
    rng = np.random.default_rng(0)
    for _ in range(2000):
        alpha, beta = rng.uniform(0.01, 0.99, 2)
        lines = (alpha, (1 + alpha) / 2, alpha + 0.5)
        if any(abs(beta - b) < 1e-12 for b in lines):
            continue
        label = asymptotic_regime_clustering(alpha, beta)
        expected = (RegimeLabel.IMPOSSIBLE if beta < alpha else
                    RegimeLabel.HARD if beta < (1 + alpha) / 2 else
                    RegimeLabel.EASY if beta < alpha + 0.5 else
                    RegimeLabel.SIMPLE)
        assert label is expected


def test_regime_at_least_ordering():
    assert regime_at_least(RegimeLabel.SIMPLE, RegimeLabel.EASY)
    assert not regime_at_least(RegimeLabel.IMPOSSIBLE, RegimeLabel.HARD)


def test_condition_constants_validation():
    with pytest.raises(ValueError):
        ConditionConstants(c_cvx=0.0)
    paper = ConditionConstants.paper()
    assert paper.c_impossible == pytest.approx(1 / 192)
    assert paper.c_impossible_sub == pytest.approx(1 / 12)
    assert paper.c_element == 4.0


def test_condition_report_table_and_json():
    params = PlantedParams(n=150, r=3, K=50, p=0.6, q=0.2)
    report = check_cvx_clustering(params)
    table = report.to_table()
    assert "spectral_snr" in table and ">=" in table
    obj = report.to_json()
    assert obj["checker"] == "cvx_clustering"
    assert obj["rows"][0]["satisfied"] is True
