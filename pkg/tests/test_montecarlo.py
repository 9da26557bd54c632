import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from malus_bell.model import lhv_correlation, lhv_joint_distribution, qm_joint_distribution
from malus_bell.montecarlo import (
    REPLICATE_STREAM,
    ExperimentConfig,
    Mode,
    OutcomePair,
    PairSample,
    PairSamples,
    Sweep,
    draw_samples,
    estimate_correlation,
    estimate_from_outcomes,
    mc_correlation_source,
    run_sweep,
    sample_joint_outcomes,
    simulate,
    simulate_pair,
)
from malus_bell.rng import substream

PI = math.pi
N = 100_000


@pytest.fixture(scope="module")
def big_sample():
    return draw_samples(N, 42, "main")


def test_draw_samples_deterministic():
    a = draw_samples(5, 42, "main")
    b = draw_samples(5, 42, "main")
    assert list(a) == list(b)


def test_draw_samples_seed_and_label_sensitivity():
    base = draw_samples(N, 42, "main")
    assert base[0] != draw_samples(N, 43, "main")[0]
    assert base[0] != draw_samples(N, 42, "other")[0]


def test_draw_samples_ranges_and_moments(big_sample):
    s = big_sample
    assert len(s) == N
    assert s.theta.min() >= 0.0 and s.theta.max() < PI
    for u in (s.u_a, s.u_b):
        assert u.min() >= 0.0 and u.max() < 1.0
        assert abs(u.mean() - 0.5) < 4 * math.sqrt(1 / 12) / math.sqrt(N)
    assert abs(s.theta.mean() - PI / 2) < 4 * (PI / math.sqrt(12)) / math.sqrt(N)
    # the three arrays are not copies of one another
    assert abs(np.corrcoef(s.u_a, s.u_b)[0, 1]) < 4 / math.sqrt(N)
    assert abs(np.corrcoef(s.theta, s.u_a)[0, 1]) < 4 / math.sqrt(N)


def test_draw_samples_rejects_zero():
    with pytest.raises(ValueError):
        draw_samples(0, 1)


def test_samples_are_read_only(big_sample):
    with pytest.raises(ValueError):
        big_sample.theta[0] = 1.0


@pytest.mark.parametrize("sample, alpha, beta, expected", [
    (PairSample(0.0, 0.5, 0.5), 0.0, PI / 2, OutcomePair(1, 1)),
    (PairSample(0.0, 0.2, 0.2), PI / 2, 0.0, OutcomePair(-1, -1)),
    (PairSample(PI / 4, 0.5, 0.5), 0.0, PI / 2, OutcomePair(-1, -1)),
])
def test_simulate_pair_examples(sample, alpha, beta, expected):
    assert simulate_pair(sample, alpha, beta) == expected


def test_vectorized_simulation_matches_scalar():
    s = draw_samples(500, 7, "vec")
    x, y = simulate(s, 0.3, 1.9)
    assert [OutcomePair(int(a), int(b)) for a, b in zip(x, y)] == [simulate_pair(p, 0.3, 1.9) for p in s]


@pytest.mark.parametrize("beta, target", [(0.0, -0.5), (PI / 4, 0.0)])
def test_estimate_correlation_near_theory(big_sample, beta, target):
    est = estimate_correlation(big_sample, 0.0, beta)
    assert est.n == N
    assert abs(est.mean - target) < 0.013


def test_estimate_correlation_negating_y_negates_mean(big_sample):
    x, y = simulate(big_sample, 0.4, 1.3)
    e = estimate_from_outcomes(x, y)
    f = estimate_from_outcomes(x, -y)
    assert f.mean == -e.mean
    assert f.stderr == e.stderr


def test_estimate_correlation_accepts_sequence():
    s = draw_samples(50, 3, "seq")
    assert estimate_correlation(list(s), 0.1, 0.2) == estimate_correlation(s, 0.1, 0.2)


def test_estimate_correlation_empty():
    with pytest.raises(ValueError):
        estimate_correlation([], 0.0, 0.0)


@given(st.lists(st.tuples(st.sampled_from([-1, 1]), st.sampled_from([-1, 1])), min_size=1, max_size=60))
def test_estimator_matches_textbook_definition(pairs):
    x = np.array([p[0] for p in pairs])
    y = np.array([p[1] for p in pairs])
    est = estimate_from_outcomes(x, y)
    prod = x * y
    assert est.mean == prod.sum() / len(prod)
    expected_se = prod.std(ddof=1) / math.sqrt(len(prod)) if len(prod) > 1 else 0.0
    assert est.stderr == pytest.approx(expected_se, abs=1e-12)


def test_single_sample_estimate():
    e = estimate_from_outcomes([1], [1])
    assert (e.mean, e.stderr, e.n) == (1.0, 0.0, 1)


# seeds frozen once; failures at the nominal 4 sigma rate would be unlucky
@pytest.mark.parametrize("alpha, beta, seed", [
    (0.0, 0.0, 11), (0.0, PI / 8, 12), (0.3, 2.0, 13), (1.2, 0.4, 14), (2.9, 2.9, 15),
])
def test_chance_agreement_with_closed_form(alpha, beta, seed):
    est = estimate_correlation(draw_samples(N, seed, "agree"), alpha, beta)
    e = lhv_correlation(alpha, beta)
    assert abs(est.mean - e) <= 4 * math.sqrt(1 - e * e) / math.sqrt(N)


@pytest.mark.parametrize("alpha, beta, seed", [(0.0, 1.0, 21), (0.7, 2.2, 22), (2.5, 0.3, 23)])
def test_per_wing_marginals(alpha, beta, seed):
    x, y = simulate(draw_samples(N, seed, "marg"), alpha, beta)
    band = 4 * 0.5 / math.sqrt(N)
    assert abs(np.mean(x == 1) - 0.5) <= band
    assert abs(np.mean(y == 1) - 0.5) <= band


def small_config(**kw):
    base = dict(n_pairs=20_000, seed=5, sweep=Sweep(0.0, PI, 50))
    base.update(kw)
    return ExperimentConfig(**base)


def test_sweep_grid_includes_endpoints():
    betas = Sweep().betas()
    assert len(betas) == 1000
    assert betas[0] == 0.0 and betas[-1] == PI
    assert betas[1] == pytest.approx(PI / 999)


def test_single_point_sweep_equals_direct_estimate():
    cfg = ExperimentConfig(n_pairs=10_000, seed=9, sweep=Sweep(0.0, PI, 1))
    curve = run_sweep(cfg)
    assert len(curve) == 1 and curve.beta[0] == 0.0
    est = estimate_correlation(draw_samples(10_000, 9, REPLICATE_STREAM), 0.0, 0.0)
    assert (curve.corr[0], curve.stderr[0], curve.n[0]) == (est.mean, est.stderr, est.n)


@pytest.mark.parametrize("mode", list(Mode))
def test_sweep_deterministic_and_thread_independent(mode):
    cfg = small_config(mode=mode)
    a = run_sweep(cfg)
    assert a.equals(run_sweep(cfg))
    assert a.equals(run_sweep(cfg, workers=4))
    assert a.equals(run_sweep(cfg, workers=7))


def test_replicate_mode_reuses_samples():
    cfg = small_config()
    curve = run_sweep(cfg)
    s = draw_samples(cfg.n_pairs, cfg.seed, REPLICATE_STREAM)
    for i in (0, 17, 49):
        assert curve.corr[i] == estimate_correlation(s, 0.0, curve.beta[i]).mean


def test_independent_mode_uses_fresh_samples():
    cfg = small_config(mode=Mode.INDEPENDENT, sweep=Sweep(0.0, 0.0, 2))
    curve = run_sweep(cfg)
    # same beta twice, different substreams
    assert curve.corr[0] != curve.corr[1]


def test_replicate_curve_is_smooth():
    cfg = ExperimentConfig(n_pairs=N, seed=2024, sweep=Sweep(0.0, PI, 1000))
    curve = run_sweep(cfg)
    assert np.max(np.abs(np.diff(curve.corr))) <= 0.01


@pytest.mark.parametrize("kw", [
    dict(n_pairs=0), dict(seed=-1), dict(seed=2**64), dict(mode="bogus"),
    dict(sweep=Sweep(0.0, PI, 0)), dict(alpha=math.nan), dict(sweep=Sweep(0.0, math.inf, 5)),
])
def test_invalid_config(kw):
    with pytest.raises(ValueError):
        ExperimentConfig(**kw)


def test_config_from_dict():
    cfg = ExperimentConfig.from_dict({"n_pairs": 10, "seed": 3, "mode": "independent",
                                      "sweep": {"n_points": 4}})
    assert cfg.mode is Mode.INDEPENDENT and cfg.sweep.n_points == 4 and cfg.sweep.beta_end == PI
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"n_pairz": 10})


@pytest.mark.parametrize("dist", [qm_joint_distribution(0.0, PI / 8), lhv_joint_distribution(0.2, 1.0)])
def test_sample_joint_outcomes_frequencies(dist):
    x, y = sample_joint_outcomes(dist, N, substream(1, "joint"))
    freqs = [np.mean((x == a) & (y == b)) for a, b in ((1, 1), (1, -1), (-1, 1), (-1, -1))]
    for f, p in zip(freqs, dist.as_tuple()):
        assert abs(f - p) <= 4 * math.sqrt(p * (1 - p) / N) + 1e-12


def test_sample_joint_outcomes_degenerate():
    x, y = sample_joint_outcomes(qm_joint_distribution(0.0, 0.0), 1000, substream(2, "deg"))
    assert np.all(x == -y)


def test_mc_source_repeatable():
    src = mc_correlation_source("lhv", 5000, 8)
    assert src(0.1, 0.2) == src(0.1, 0.2)
    with pytest.raises(ValueError):
        mc_correlation_source("nope", 10, 1)(0.0, 0.0)


def test_pair_samples_length_mismatch():
    with pytest.raises(ValueError):
        PairSamples(np.zeros(2), np.zeros(3), np.zeros(2))
