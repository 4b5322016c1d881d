import numpy as np
import pytest

from qhslab import (BoostState, CombinedHypothesis, QueryCounter, SharedSample,
                    StageBudgetExceeded, WeakHypothesis, chi, combine,
                    exact_weak_parity, filter_sample_size, margin_sum, point_weight,
                    random_dnf, smoothboost_filter, smoothboost_sample, stage_budget,
                    to_pm1, weight_from_margin, wht_unscaled)
from qhslab import seeds


def exact_sample_wl(points, labels, dist, rng):
    """Exact best parity under the supplied sample distribution."""
    mass = np.zeros(points.size)
    np.add.at(mass, points, dist * labels)
    est = wht_unscaled(mass)
    a = int(np.flatnonzero(np.abs(est) == np.abs(est).max()).min())
    return WeakHypothesis(a, 1 if est[a] >= 0 else -1, float(abs(est[a])))


def make_exact_filter_wl(f_sign, n):
    """Exact weak learner over the cube, margins tracked incrementally."""
    xs = np.arange(1 << n, dtype=np.int64)
    margins = np.zeros(1 << n)
    seen = [0]

    def wl(sample, state, estimate, rng):
        while seen[0] < len(state.hypotheses):
            hyp = state.hypotheses[seen[0]]
            margins[:] += f_sign * hyp.values(xs) - state.theta
            seen[0] += 1
        weights = weight_from_margin(margins, state.gamma)
        return exact_weak_parity(f_sign, weights)

    return wl


def test_boost_state_theta_range():
    for gamma in (0.01, 0.1, 0.3, 0.49):
        state = BoostState(gamma)
        assert 0 < state.theta <= 0.2
    with pytest.raises(ValueError):
        BoostState(0.0)
    with pytest.raises(ValueError):
        BoostState(0.5)


def test_margin_trivials():
    state = BoostState(0.25)
    xs = np.arange(8)
    assert np.all(margin_sum(state, np.ones(8), xs) == 0.0)
    b = 3
    state.hypotheses.append(WeakHypothesis(b, 1, 1.0))
    f_values = chi(b, xs).astype(float)  # hypothesis agrees everywhere
    assert np.allclose(margin_sum(state, f_values, xs), 1.0 - state.theta)


def test_margin_matches_incremental_table():
    rng = np.random.default_rng(0)
    n = 6
    xs = np.arange(1 << n)
    f_sign = to_pm1(rng.integers(0, 2, size=1 << n)).astype(float)
    state = BoostState(1.0 / 12)
    table = np.zeros(1 << n)
    for stage in range(20):
        hyp = WeakHypothesis(int(rng.integers(0, 1 << n)), int(rng.choice([-1, 1])), 0.5)
        state.hypotheses.append(hyp)
        table += f_sign * hyp.values(xs) - state.theta
        assert np.allclose(margin_sum(state, f_sign, xs), table, atol=1e-12)
        assert np.allclose(point_weight(state, f_sign, xs),
                           weight_from_margin(table, state.gamma), atol=1e-12)


def test_weight_rule_values():
    assert weight_from_margin(np.array([-3.0]), 0.25)[0] == 1.0
    assert weight_from_margin(np.array([0.0]), 0.25)[0] == 1.0
    assert weight_from_margin(np.array([2.0]), 0.25)[0] == 0.75
    margins = np.linspace(-5, 40, 200)
    weights = weight_from_margin(margins, 0.1)
    assert np.all((weights > 0) & (weights <= 1))


def test_combine_trivials_and_tie():
    b = 5
    single = combine([WeakHypothesis(b, 1, 1.0)])
    xs = np.arange(16)
    assert np.array_equal(single.values(xs), chi(b, xs))
    triple = combine([WeakHypothesis(b, 1, 1.0)] * 3)
    assert np.array_equal(triple.values(xs), chi(b, xs))
    tied = combine([WeakHypothesis(0, 1, 1.0), WeakHypothesis(0, -1, 1.0)])
    assert np.all(tied.values(xs) == 1.0)  # vote sums to zero everywhere
    with pytest.raises(ValueError):
        combine([])


def test_smoothboost_sample_perfect_learner():
    # the target is itself a parity: every stage accepts it with margin 1
    # and the vote is exact once the weights drain below epsilon
    n, b = 6, 9
    points = np.arange(1 << n)
    labels = chi(b, points).astype(float)
    combined = smoothboost_sample(points, labels, 0.1, 1.0 / 12, exact_sample_wl)
    assert {(h.a, h.sign) for h in combined.hypotheses} == {(b, 1)}
    assert np.array_equal(combined.values(points), labels)


def test_smoothboost_sample_random_dnfs():
    n, epsilon = 10, 0.1
    points = np.arange(1 << n)
    for trial in range(5):
        s = 1 + trial % 4
        gamma = 1.0 / (8 * s + 4)
        formula = random_dnf(n, s, 3, 300 + trial)
        labels = formula.sign_table()
        trace = []
        combined = smoothboost_sample(points, labels, epsilon, gamma, exact_sample_wl,
                                      trace=trace)
        err = float(np.mean(combined.values(points) != labels))
        assert err < epsilon
        assert len(combined.hypotheses) <= 2.0 / (epsilon * gamma**2)
        # smoothness: m * D_t never exceeds 1/epsilon
        margins = np.zeros(1 << n)
        for (_, mean_weight, hyp) in trace:
            weights = weight_from_margin(margins, gamma)
            assert weights.max() / (weights.mean()) <= 1.0 / epsilon + 1e-9
            assert abs(weights.mean() - mean_weight) < 1e-12
            margins += labels * hyp.values(points) - gamma / (2 + gamma)


def test_smoothboost_sample_budget_error():
    n = 4
    points = np.arange(1 << n)
    labels = chi(5, points).astype(float)

    def useless_wl(points_, labels_, dist, rng):
        return WeakHypothesis(0, 1, 0.0)  # constant +1 against a balanced parity

    with pytest.raises(StageBudgetExceeded):
        smoothboost_sample(points, labels, 0.2, 0.1, useless_wl)


def test_smoothboost_sample_validation():
    with pytest.raises(ValueError):
        smoothboost_sample(np.arange(4), np.ones(4), 0.6, 0.1, exact_sample_wl)
    with pytest.raises(ValueError):
        smoothboost_sample(np.arange(4), np.ones(4), 0.1, 0.0, exact_sample_wl)


def test_filter_sample_size_formula():
    assert filter_sample_size(0.1, 0.05) == int(np.ceil(8 * np.log(1 / 0.005 + 2) / 0.01))


def test_smoothboost_filter_exact_runs():
    n, s, epsilon = 10, 3, 0.1
    gamma = 1.0 / (8 * s + 4)
    failures = 0
    for seed in range(100):
        formula = random_dnf(n, s, 3, 400 + seed)
        f_sign = formula.sign_table()
        combined = smoothboost_filter(n, formula.truth_table(), QueryCounter(),
                                      epsilon, gamma, make_exact_filter_wl(f_sign, n),
                                      seeds.derive(seed, 3))
        err = float(np.mean(combined.sign_table(n) != f_sign))
        failures += (err >= epsilon)
    assert failures <= 5


def test_smoothboost_filter_smoothness_and_estimates():
    n, s, epsilon = 10, 2, 0.1
    gamma = 1.0 / (8 * s + 4)
    xs = np.arange(1 << n)
    within = 0
    total = 0
    for seed in range(10):
        formula = random_dnf(n, s, 3, 500 + seed)
        f_sign = formula.sign_table()
        trace = []
        smoothboost_filter(n, formula.truth_table(), QueryCounter(), epsilon, gamma,
                           make_exact_filter_wl(f_sign, n), seeds.derive(seed, 4),
                           trace=trace)
        margins = np.zeros(1 << n)
        for (_, estimate, hyp) in trace:
            weights = weight_from_margin(margins, gamma)
            # exact sup norm of 2**n D_t with the estimated normalizer
            assert weights.max() / estimate <= 3.0 / epsilon + 1e-9
            total += 1
            within += (abs(weights.mean() - estimate) <= epsilon / 3.0)
            margins += f_sign * hyp.values(xs) - gamma / (2 + gamma)
    assert within >= 0.95 * total


def test_margin_identity_after_termination():
    """Total margin equals stages times (vote margin minus theta)."""
    n, s, epsilon = 8, 2, 0.15
    gamma = 1.0 / 20
    formula = random_dnf(n, s, 3, 42)
    f_sign = formula.sign_table()
    xs = np.arange(1 << n)
    state_holder = {}

    def wl(sample, state, estimate, rng):
        state_holder["state"] = state
        weights = point_weight(state, f_sign, xs)
        return exact_weak_parity(f_sign, weights)

    combined = smoothboost_filter(n, formula.truth_table(), QueryCounter(), epsilon,
                                  gamma, wl, seeds.derive(0, 5))
    stages = len(combined.hypotheses)
    state = BoostState(gamma, list(combined.hypotheses))
    total_margin = margin_sum(state, f_sign, xs)
    vote = combined.vote(xs)
    assert np.allclose(total_margin, stages * (f_sign * vote - state.theta), atol=1e-10)
    weights = point_weight(state, f_sign, xs)
    assert np.all((weights > 0) & (weights <= 1))


def test_filter_equals_sample_on_full_cube():
    """With the exact cube as the shared sample and the loop thresholds
    aligned (the filter stops at 2 eps / 3), both drivers accept the same
    hypothesis sequence."""
    n, s = 8, 2
    epsilon = 0.15
    gamma = 1.0 / 20
    formula = random_dnf(n, s, 3, 77)
    f_sign = formula.sign_table()
    bits = formula.truth_table()
    points = np.arange(1 << n)

    def make_tracking_sample_wl():
        # same computation path as the filter-side learner, so near-tied
        # coefficients resolve identically
        margins = np.zeros(1 << n)
        theta = gamma / (2 + gamma)

        def wl(points_, labels_, dist, rng):
            weights = weight_from_margin(margins, gamma)
            hyp = exact_weak_parity(f_sign, weights)
            margins[:] += f_sign * hyp.values(points_) - theta
            return hyp

        return wl

    sample_trace = []
    smoothboost_sample(points, f_sign, 2 * epsilon / 3, gamma, make_tracking_sample_wl(),
                       trace=sample_trace)

    cube = SharedSample.full_cube(n, bits)
    filter_trace = []
    smoothboost_filter(n, bits, QueryCounter(), epsilon, gamma,
                       make_exact_filter_wl(f_sign, n), seeds.derive(0, 6),
                       sample=cube, trace=filter_trace)
    assert [(h.a, h.sign) for (_, _, h) in sample_trace] == \
        [(h.a, h.sign) for (_, _, h) in filter_trace]


def test_stage_budget_formula():
    assert stage_budget(0.1, 0.05) == int(np.ceil(2 / (0.1 * 0.0025)))
