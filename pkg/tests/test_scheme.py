import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fbmac.channel import ChannelConfig, FeedbackCov, kw_matrix
from fbmac.classic import no_feedback_region
from fbmac.errors import DimensionMismatch, InvalidParams
from fbmac.presets import choice1_params, symmetric_region
from fbmac.scheme import (
    SchemeParams,
    Variant,
    lmmse_matrix,
    power_usage,
    rate_bounds,
    rate_bounds_noisy,
    rate_bounds_partial,
    rate_bounds_si,
    simple_scheme_params,
    simple_scheme_rates,
)
from fbmac.search import project_powers

from conftest import random_params, random_psd
from oracles import scheme_rates_oracle

VARIANTS = [v.value for v in Variant]


def test_power_without_feedback():
    p = SchemeParams(2, [2.0, 1.0], [1.0, 3.0], np.zeros((2, 2)), np.zeros((2, 2)))
    use = power_usage(p, ChannelConfig(10.0, 10.0, 1.0))
    assert (use.p1_used, use.p2_used) == pytest.approx((2.5, 5.0), abs=1e-15)
    assert use.feasible


def test_power_with_feedback_by_hand():
    # X1[1] = a11' Xi1 + b (a10 Xi1 + a20 Xi2 + Z0 + W1_0)
    a10, a11, a20, b, n0, s1 = 1.0, 0.5, 2.0, -0.3, 1.5, 0.4
    p = SchemeParams(2, [a10, a11], [a20, 0.0], [[0, 0], [b, 0]], np.zeros((2, 2)))
    cfg = ChannelConfig(1.0, 1.0, n0, FeedbackCov(s1, 0.0))
    expect = (a10**2 + (a11 + b * a10) ** 2 + b * b * (a20**2 + n0 + s1)) / 2
    use = power_usage(p, cfg)
    assert use.p1_used == pytest.approx(expect, abs=1e-14)
    assert not use.feasible


@given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.1, 10))
def test_single_use_is_no_feedback(p1, p2, n):
    cfg = ChannelConfig(p1, p2, n)
    p = SchemeParams(1, [math.sqrt(p1)], [math.sqrt(p2)], [[0.0]], [[0.0]])
    got = rate_bounds(p, cfg).as_tuple()
    assert got == pytest.approx(no_feedback_region(cfg).as_tuple(), abs=1e-13)


def test_silent_transmitter_has_zero_rate(asym_cfg):
    rng = np.random.default_rng(1)
    p = random_params(rng, 3)
    p = SchemeParams(3, np.zeros(3), p.a2, p.b1, p.b2)
    assert rate_bounds(p, asym_cfg).r1_max == 0.0


@pytest.mark.parametrize("sigma", [0.0, 0.5, 3.0])
def test_two_use_preset_matches_symmetric_closed_form(sigma):
    cfg = ChannelConfig(2.0, 2.0, 1.0, FeedbackCov(sigma, sigma, 0.2))
    got = rate_bounds(choice1_params(2, cfg).params, cfg).as_tuple()
    assert got == pytest.approx(symmetric_region(cfg).as_tuple(), abs=1e-13)


def test_partial_equals_noisy_with_silent_b1(asym_cfg):
    rng = np.random.default_rng(2)
    for _ in range(20):
        p = random_params(rng, 4, partial=True)
        kw = random_psd(rng)
        kw_part = np.array([[0.0, 0.0], [0.0, kw[1, 1]]])
        assert rate_bounds_partial(p, asym_cfg, kw) == rate_bounds_noisy(p, asym_cfg, kw_part)


def test_partial_rejects_feedback_to_first(asym_cfg):
    with pytest.raises(InvalidParams):
        rate_bounds_partial(random_params(np.random.default_rng(0), 3), asym_cfg)


def test_side_information_is_free_without_feedback_noise():
    cfg = ChannelConfig(1.3, 0.7, 0.9)
    rng = np.random.default_rng(3)
    for _ in range(10):
        p = random_params(rng, 3)
        assert rate_bounds_si(p, cfg).as_tuple() == pytest.approx(rate_bounds_noisy(p, cfg).as_tuple(), abs=1e-13)


def test_side_information_never_hurts(asym_cfg):
    rng = np.random.default_rng(4)
    for _ in range(30):
        p = random_params(rng, 3)
        si, noisy = rate_bounds_si(p, asym_cfg), rate_bounds_noisy(p, asym_cfg)
        assert si.r1_max >= noisy.r1_max - 1e-12
        assert si.r2_max >= noisy.r2_max - 1e-12
        assert si.rsum_max >= noisy.rsum_max - 1e-12


@pytest.mark.parametrize("variant", VARIANTS)
def test_rates_match_time_domain_oracle(asym_cfg, variant):
    rng = np.random.default_rng(5)
    kw = kw_matrix(asym_cfg)
    for eta in (1, 2, 3, 5):
        p = random_params(rng, eta, partial=variant == "partial")
        c = lmmse_matrix(p, asym_cfg, variant)
        if eta == 1:
            # both outputs are multiples of one scalar; keep the larger one
            c = c[[int(np.argmax(np.abs(c[:, 0])))]]
        assert rate_bounds(p, asym_cfg, variant).as_tuple() == pytest.approx(
            scheme_rates_oracle(p, asym_cfg.n0, kw, c, variant), abs=1e-12
        )
        c = rng.normal(size=(2, eta)) if eta > 1 else rng.normal(size=(1, 1))
        assert rate_bounds(p.with_c(c), asym_cfg, variant).as_tuple() == pytest.approx(
            scheme_rates_oracle(p, asym_cfg.n0, kw, c, variant), abs=1e-12
        )


def test_invertible_recombination_of_decoder_outputs(asym_cfg):
    rng = np.random.default_rng(6)
    p = random_params(rng, 4)
    c = lmmse_matrix(p, asym_cfg)
    base = rate_bounds(p, asym_cfg).as_tuple()
    for _ in range(10):
        u = rng.normal(size=(2, 2)) + 2 * np.eye(2)
        assert rate_bounds(p.with_c(u @ c), asym_cfg).as_tuple() == pytest.approx(base, abs=1e-11)


@pytest.mark.parametrize("variant", VARIANTS)
def test_lmmse_decoder_is_best(asym_cfg, variant):
    rng = np.random.default_rng(7)
    p = random_params(rng, 4, partial=variant == "partial")
    best = rate_bounds(p, asym_cfg, variant)
    for _ in range(50):
        t = rate_bounds(p.with_c(rng.normal(size=(2, 4))), asym_cfg, variant)
        assert t.r1_max <= best.r1_max + 1e-12
        assert t.r2_max <= best.r2_max + 1e-12
        assert t.rsum_max <= best.rsum_max + 1e-12


def test_rank_one_decoder_uses_its_larger_row(asym_cfg):
    rng = np.random.default_rng(8)
    p = random_params(rng, 3)
    row = rng.normal(size=3)
    two = rate_bounds(p.with_c(np.vstack([row, 2.0 * row])), asym_cfg)
    one = rate_bounds(p.with_c(row[None, :]), asym_cfg)
    assert two.as_tuple() == pytest.approx(one.as_tuple(), abs=1e-13)


def test_zero_decoder_gives_zero_rates(asym_cfg):
    p = random_params(np.random.default_rng(9), 3)
    assert rate_bounds(p.with_c(np.zeros((2, 3))), asym_cfg).as_tuple() == (0.0, 0.0, 0.0)


def test_rates_fall_as_feedback_noise_grows():
    rng = np.random.default_rng(10)
    p = random_params(rng, 4)
    prev = None
    for s in (0.0, 0.1, 0.5, 1.0, 4.0, 20.0):
        t = rate_bounds(p, ChannelConfig(1.0, 1.0, 1.0, FeedbackCov(s, 1.5 * s, 0.3)))
        if prev is not None:
            assert t.r1_max <= prev.r1_max + 1e-13
            assert t.r2_max <= prev.r2_max + 1e-13
            assert t.rsum_max <= prev.rsum_max + 1e-13
        prev = t


@given(
    st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2),
    st.floats(-1, 1), st.floats(-1, 1),
)
def test_two_use_closed_form_matches_general(a11, a12, a21, a22, b1, b2):
    cfg = ChannelConfig(1.0, 1.0, 0.8, FeedbackCov(0.6, 0.3, -0.4))
    closed, use = simple_scheme_rates(a11, a12, a21, a22, b1, b2, cfg)
    p = simple_scheme_params(a11, a12, a21, a22, b1, b2)
    assert rate_bounds(p, cfg).as_tuple() == pytest.approx(closed.as_tuple(), abs=1e-12)
    general = power_usage(p, cfg)
    assert (use.p1_used, use.p2_used) == pytest.approx((general.p1_used, general.p2_used), abs=1e-12)


def test_params_validation():
    with pytest.raises(InvalidParams):
        SchemeParams(2, [1, 1], [1, 1], [[0, 1], [0, 0]], np.zeros((2, 2)))
    with pytest.raises(InvalidParams):
        SchemeParams(2, [1, 1], [1, 1], [[1, 0], [0, 0]], np.zeros((2, 2)))
    with pytest.raises(DimensionMismatch):
        SchemeParams(2, [1, 1, 1], [1, 1], np.zeros((2, 2)), np.zeros((2, 2)))
    with pytest.raises(DimensionMismatch):
        SchemeParams(2, [1, 1], [1, 1], np.zeros((2, 2)), np.zeros((2, 2)), np.ones((3, 2)))
    with pytest.raises(InvalidParams):
        SchemeParams(1, [math.nan], [1], [[0]], [[0]])
    with pytest.raises(InvalidParams):
        SchemeParams.zeros(0)
    with pytest.raises(InvalidParams):
        SchemeParams.zeros(65)


def test_params_json_round_trip():
    rng = np.random.default_rng(11)
    for c in (None, rng.normal(size=(2, 4))):
        p = random_params(rng, 4).with_c(c)
        back = SchemeParams.from_dict(json.loads(json.dumps(p.to_dict())))
        assert back == p


@pytest.mark.parametrize("variant", VARIANTS)
def test_rates_continuous_in_parameters(asym_cfg, variant):
    rng = np.random.default_rng(12)
    p = project_powers(random_params(rng, 3, scale=0.3, partial=variant == "partial"), asym_cfg)
    base = np.array(rate_bounds(p, asym_cfg, variant).as_tuple())
    for eps in (1e-4, 1e-6, 1e-8):
        q = SchemeParams(3, p.a1 * (1 + eps), p.a2 * (1 - eps), p.b1 * (1 + eps), p.b2 * (1 + eps))
        diff = np.abs(np.array(rate_bounds(q, asym_cfg, variant).as_tuple()) - base)
        assert np.max(diff) < 100 * eps
