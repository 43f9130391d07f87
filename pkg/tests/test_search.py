import math

import numpy as np
import pytest

from fbmac.channel import ChannelConfig, FeedbackCov, FeedbackModel
from fbmac.classic import no_feedback_region, ozarow_region, rho_star
from fbmac.errors import InvalidParams
from fbmac.presets import choice1_params, perfect_fb_eta_region
from fbmac.scheme import SchemeParams, power_usage, rate_bounds
from fbmac.search import SearchConfig, optimize, project_powers

from conftest import random_params

UNIT = ChannelConfig(1.0, 1.0, 1.0)


@pytest.fixture(scope="module")
def clean_run():
    return optimize(UNIT, SearchConfig(4, budget=1500, seed=3, restarts=3))


def test_clean_search_lands_between_preset_and_capacity(clean_run):
    closed, _ = perfect_fb_eta_region(4, UNIT)
    cap = ozarow_region(UNIT, rho_star(UNIT)).sum_rate
    assert closed.sum_rate - 2e-2 <= clean_run.objective <= cap
    assert clean_run.objective >= rate_bounds(choice1_params(4, UNIT).params, UNIT).sum_rate - 1e-12


def test_search_uses_all_power(clean_run):
    use = power_usage(clean_run.best, UNIT)
    assert (use.p1_used, use.p2_used) == pytest.approx((1.0, 1.0), abs=1e-6)


def test_trace_never_decreases(clean_run):
    objs = [o for _, o in clean_run.trace]
    evals = [e for e, _ in clean_run.trace]
    assert all(b > a for a, b in zip(objs, objs[1:]))
    assert all(b > a for a, b in zip(evals, evals[1:]))
    assert clean_run.trace[-1][1] == clean_run.objective
    assert clean_run.evaluations == 1500


def test_objective_is_reproducible_from_best(clean_run):
    t = rate_bounds(clean_run.best, UNIT)
    assert t.weighted(1.0, 1.0) == clean_run.objective


def test_search_is_deterministic():
    cfg = ChannelConfig(1.0, 2.0, 1.0, FeedbackCov(0.3, 0.3))
    sc = SearchConfig(3, weights=(1.0, 2.0), budget=300, seed=9, restarts=3)
    a, b = optimize(cfg, sc), optimize(cfg, sc)
    assert a.objective == b.objective
    assert a.best == b.best
    assert a.trace == b.trace


def test_single_evaluation_is_the_preset():
    cfg = ChannelConfig(1.0, 1.0, 1.0, FeedbackCov(0.5, 0.5))
    res = optimize(cfg, SearchConfig(3, budget=1, restarts=1))
    assert res.evaluations == 1
    preset = project_powers(choice1_params(3, cfg).params, cfg)
    assert res.objective == pytest.approx(rate_bounds(preset, cfg).sum_rate, abs=1e-12)
    again = optimize(cfg, SearchConfig(3, budget=1, restarts=1))
    assert again.best == res.best


def test_noisy_feedback_search_beats_no_feedback():
    cfg = ChannelConfig(1.0, 1.0, 1.0, FeedbackCov(100.0, 100.0))
    res = optimize(cfg, SearchConfig(2, budget=400, seed=1, restarts=2))
    assert res.objective >= no_feedback_region(cfg).sum_rate - 1e-12


@pytest.mark.parametrize(
    "model", [FeedbackModel.NOISY_PARTIAL, FeedbackModel.NOISY_RX_SI]
)
def test_search_for_other_feedback_models(model):
    cfg = ChannelConfig(1.0, 1.0, 1.0, FeedbackCov(0.0 if model.is_partial else 0.4, 0.4), model)
    res = optimize(cfg, SearchConfig(2, budget=200, restarts=2))
    if model.is_partial:
        assert not np.any(res.best.b1)
    use = power_usage(res.best, cfg)
    assert (use.p1_used, use.p2_used) == pytest.approx((1.0, 1.0), abs=1e-6)
    assert math.isfinite(res.objective)


def test_projection_hits_both_budgets(asym_cfg):
    rng = np.random.default_rng(60)
    for _ in range(30):
        p = project_powers(random_params(rng, 4, scale=0.4), asym_cfg)
        use = power_usage(p, asym_cfg)
        assert (use.p1_used, use.p2_used) == pytest.approx((asym_cfg.p1, asym_cfg.p2), rel=1e-9)


def test_projection_of_silent_transmitter(asym_cfg):
    p = project_powers(SchemeParams.zeros(3), asym_cfg)
    use = power_usage(p, asym_cfg)
    assert (use.p1_used, use.p2_used) == pytest.approx((asym_cfg.p1, asym_cfg.p2), rel=1e-12)


def test_projection_shrinks_explosive_feedback(asym_cfg):
    eta = 6
    b = np.tril(50.0 * np.ones((eta, eta)), -1)
    p = project_powers(SchemeParams(eta, np.ones(eta), np.ones(eta), b, b), asym_cfg)
    use = power_usage(p, asym_cfg)
    assert (use.p1_used, use.p2_used) == pytest.approx((asym_cfg.p1, asym_cfg.p2), rel=1e-9)


def test_config_validation():
    with pytest.raises(InvalidParams):
        SearchConfig(0)
    with pytest.raises(InvalidParams):
        SearchConfig(2, budget=2, restarts=3)
    with pytest.raises(InvalidParams):
        SearchConfig(2, restarts=0)
    with pytest.raises(InvalidParams):
        SearchConfig(2, weights=(0.0, 0.0))
    with pytest.raises(InvalidParams):
        SearchConfig(2, weights=(1.0, -1.0))
