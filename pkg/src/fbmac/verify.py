"""Named numerical checks of the analytic claims behind the package.

Each check builds its channel from a base configuration, optionally
overridden, and returns a :class:`VerificationOutcome`. The comparison kind
decides how ``measured`` is judged against ``expected``:

``abs``  ``|measured - expected| <= tolerance``
``le``   ``measured <= expected + tolerance``
``gt``   ``measured > expected + tolerance``
"""

import math
import time
from dataclasses import dataclass

import numpy as np

from .channel import ChannelConfig, FeedbackCov, FeedbackModel
from .classic import (
    carleial_grid_max,
    collapse_thresholds,
    cover_leung_boundary_point,
    fixed_point_map,
    no_feedback_region,
    ozarow_region,
    rho_star,
    willems_grid_max,
)
from .errors import UnknownCheck
from .geometry import contains, from_triple
from .innovation import innovation_rates
from .presets import (
    choice2_params,
    eqpow_partial_region,
    perfect_fb_eta_region,
    perfect_partial_region,
    solve_r,
    symmetric_region,
    time_sharing_partial_sum_rate,
)
from .scheme import (
    SchemeParams,
    Variant,
    power_usage,
    rate_bounds,
    rate_bounds_noisy,
    rate_bounds_partial,
    rate_bounds_si,
    simple_scheme_params,
    simple_scheme_rates,
)
from .splitting import split_for_rho

__all__ = ["CHECKS", "VerificationOutcome", "check_ids", "run_all", "run_verify"]

DEFAULT_BASE = {"p1": 1.0, "p2": 1.0, "n0": 1.0, "sigma1_sq": 1.0, "sigma2_sq": 1.0, "corr": 0.0}
SIGMA_LADDER = (0.1, 1.0, 10.0, 1e4, 1e8)
KW_LADDER = (1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 0.0)
ETA_LIMIT = 32
CHECK_SEED = 20240601


@dataclass(frozen=True)
class VerificationOutcome:
    check_id: str
    passed: bool
    measured: float
    expected: float
    tolerance: float
    runtime_ms: int
    claim: str
    kind: str = "abs"
    detail: str = ""

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} {self.check_id} measured={self.measured:.12g} expected={self.expected:.12g} "
            f"kind={self.kind} tol={self.tolerance:.3g} runtime_ms={self.runtime_ms} | {self.claim}"
        )


def _judge(kind, measured, expected, tol):
    if kind == "abs":
        return abs(measured - expected) <= tol
    if kind == "le":
        return measured <= expected + tol
    if kind == "gt":
        return measured > expected + tol
    raise ValueError(kind)


def _cfg(base, overrides, model=FeedbackModel.NOISY):
    d = dict(base)
    d.update(overrides or {})
    kw = FeedbackCov(d["sigma1_sq"], d["sigma2_sq"], d["corr"])
    return ChannelConfig(d["p1"], d["p2"], d["n0"], kw, model)


def _random_params(rng, eta, scale=0.6):
    a1 = rng.normal(size=eta)
    a2 = rng.normal(size=eta)
    b1 = np.tril(scale * rng.normal(size=(eta, eta)), -1)
    b2 = np.tril(scale * rng.normal(size=(eta, eta)), -1)
    return SchemeParams(eta, a1, a2, b1, b2)


def _random_psd(rng, scale=1.0):
    g = scale * rng.normal(size=(2, 2))
    return g @ g.T


def _rng(offset=0):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([CHECK_SEED, offset])))


# -- checks: each returns (measured, expected, tolerance, kind, detail) ------


def _rho_star_fixed_point(ov):
    cfg = _cfg({**DEFAULT_BASE, "p2": 5.0, "n0": 5.0}, ov)
    rs = rho_star(cfg)
    return abs(fixed_point_map(cfg, rs) - rs), 0.0, 1e-10, "abs", f"rho*={rs:.15g}"


def _rho_recursion_sign_flip(ov):
    cfg = _cfg(DEFAULT_BASE, ov)
    rs = rho_star(cfg)
    _, rhos = perfect_fb_eta_region(101, cfg)
    dev = max(abs(abs(r) - rs) for r in rhos)
    alternating = all(rhos[i] * rhos[i + 1] < 0 for i in range(len(rhos) - 1)) if rs > 0 else True
    measured = dev if alternating else math.inf
    return measured, 0.0, 1e-9, "abs", f"{len(rhos)} steps, alternating={alternating}"


def _first_use_log_ratio(cfg):
    p1, p2, n = cfg.p1, cfg.p2, cfg.n0
    r, rs = solve_r(cfg), rho_star(cfg)
    return abs(math.log((n + r * (p1 + p2)) / (n + p1 + p2 + 2.0 * math.sqrt(p1 * p2) * rs)))


def _eta_convergence(ov):
    cfg = _cfg(DEFAULT_BASE, ov)
    oz = ozarow_region(cfg, rho_star(cfg)).sum_rate
    t, _ = perfect_fb_eta_region(ETA_LIMIT, cfg)
    tol = 2.0 * 0.5 * _first_use_log_ratio(cfg) / ETA_LIMIT
    return oz - t.sum_rate, 0.0, tol, "abs", f"eta={ETA_LIMIT}"


def _noisy_fb_beneficial(ov):
    margins = []
    for s in SIGMA_LADDER:
        cfg = _cfg(DEFAULT_BASE, {**(ov or {}), "sigma1_sq": s, "sigma2_sq": s})
        margins.append(symmetric_region(cfg).sum_rate - no_feedback_region(cfg).sum_rate)
    return min(margins), 0.0, 0.0, "gt", "margins " + " ".join(f"{m:.3e}" for m in margins)


def _partial_fb_beneficial(ov):
    margins = []
    for s in SIGMA_LADDER:
        cfg = _cfg(DEFAULT_BASE, {**(ov or {}), "sigma1_sq": 0.0, "sigma2_sq": s})
        margins.append(eqpow_partial_region(cfg).sum_rate - no_feedback_region(cfg).sum_rate)
        uneq = cfg.with_(p2=2.0 * cfg.p2)
        margins.append(time_sharing_partial_sum_rate(uneq) - no_feedback_region(uneq).sum_rate)
    return min(margins), 0.0, 0.0, "gt", "equal-power and time-sharing margins over the sigma ladder"


def _cl_counterexample(ov):
    cfg = _cfg({**DEFAULT_BASE, "p2": 5.0, "n0": 5.0, "sigma1_sq": 0.0, "sigma2_sq": 0.0}, ov,
               FeedbackModel.PERFECT_PARTIAL)
    p1, p2, n = cfg.p1, cfg.p2, cfg.n0
    rbar1 = 0.25 * math.log1p(2.0 * p1 / n)
    rbar2 = perfect_partial_region(cfg).rsum_max - rbar1
    inside = contains(from_triple(perfect_partial_region(cfg)), (rbar1, rbar2), 1e-12)
    # rho1 that makes the Cover-Leung single-user bound equal rbar1
    rho1 = math.sqrt(1.0 - (math.exp(2.0 * rbar1) - 1.0) * n / p1)
    _, r2b = cover_leung_boundary_point(cfg, rho1)
    gap = rbar2 - r2b
    return (gap if inside else -math.inf), 0.0, 1e-4, "gt", f"point inside={inside}, rho1={rho1:.12g}"


def _collapse(grid_fn, ov):
    base = _cfg(DEFAULT_BASE, ov)
    s1, s2 = collapse_thresholds(base)
    cfg = base.with_kw(s1, s2, 0.0)
    rep = grid_fn(cfg)
    return rep.excess, 0.0, 1e-9, "le", f"{rep.n_points} grid points"


def _kw_monotonicity(ov):
    cfg0 = _cfg(DEFAULT_BASE, ov)
    rng = _rng(9)
    worst = 0.0
    for _ in range(50):
        eta = int(rng.integers(1, 5))
        p = _random_params(rng, eta)
        k_lo = _random_psd(rng)
        k_hi = k_lo + _random_psd(rng, 0.7)
        t_lo, t_hi = rate_bounds_noisy(p, cfg0, k_lo), rate_bounds_noisy(p, cfg0, k_hi)
        u_lo, u_hi = power_usage(p, cfg0, k_lo), power_usage(p, cfg0, k_hi)
        worst = max(
            worst,
            max(h - l for h, l in zip(t_hi.as_tuple(), t_lo.as_tuple())),
            u_lo.p1_used - u_hi.p1_used,
            u_lo.p2_used - u_hi.p2_used,
        )
    return worst, 0.0, 1e-10, "le", "50 random Loewner-ordered pairs"


def _formula_consistency(ov):
    cfg = _cfg(DEFAULT_BASE, ov)
    rng = _rng(10)
    errs = {"innovation": 0.0, "simple": 0.0, "partial": 0.0, "si": 0.0}
    for _ in range(40):
        eta = int(rng.integers(1, 5))
        p = _random_params(rng, eta)
        pp = SchemeParams.partial(eta, p.a1, p.a2, p.b2)
        for v, q in ((Variant.NOISY, p), (Variant.PARTIAL, pp), (Variant.SI, p)):
            a = np.array(innovation_rates(q, cfg, v)[0].as_tuple())
            b = np.array(rate_bounds(q, cfg, v).as_tuple())
            errs["innovation"] = max(errs["innovation"], float(np.max(np.abs(a - b))))
        part = cfg.with_(model=FeedbackModel.NOISY_PARTIAL)
        a = np.array(rate_bounds_partial(pp, part).as_tuple())
        b = np.array(rate_bounds_noisy(pp, cfg.with_kw(0.0, cfg.kw.sigma2_sq, 0.0)).as_tuple())
        errs["partial"] = max(errs["partial"], float(np.max(np.abs(a - b))))
        zero = cfg.with_kw(0.0, 0.0, 0.0)
        a = np.array(rate_bounds_si(p, zero).as_tuple())
        b = np.array(rate_bounds_noisy(p, zero).as_tuple())
        errs["si"] = max(errs["si"], float(np.max(np.abs(a - b))))
        x = rng.normal(size=6)
        closed, _ = simple_scheme_rates(*x, cfg)
        general = rate_bounds_noisy(simple_scheme_params(*x), cfg)
        errs["simple"] = max(
            errs["simple"], float(np.max(np.abs(np.subtract(closed.as_tuple(), general.as_tuple()))))
        )
    detail = " ".join(f"{k}={v:.2e}" for k, v in errs.items())
    return max(errs.values()), 0.0, 1e-8, "abs", detail


def _split_rho_consistency(ov):
    cfg = _cfg(DEFAULT_BASE, ov)
    rs = rho_star(cfg)
    worst = 0.0
    for rho in np.linspace(0.0, rs, 21)[1:]:
        sp = split_for_rho(cfg, float(rho))
        if sp.p1_dprime <= 0.0:
            continue
        sub = ChannelConfig(sp.p1_dprime, cfg.p2, sp.n_prime)
        worst = max(worst, abs(sp.rho_prime - rho_star(sub)))
    return worst, 0.0, 1e-9, "abs", "20 correlations in (0, rho*]"


def choice2_kw_ladder(cfg, eta=16, ladder=KW_LADDER):
    """Choice-II sum rate at ``K_W = sigma^2 I`` for each ``sigma^2`` in ``ladder``."""
    out = []
    for s in ladder:
        c = cfg.with_kw(s, s, 0.0)
        out.append(rate_bounds_noisy(choice2_params(eta, c).params, c).sum_rate)
    return out


def _continuity_in_kw(ov):
    cfg = _cfg(DEFAULT_BASE, ov)
    sums = choice2_kw_ladder(cfg)
    monotone = all(b >= a - 1e-12 for a, b in zip(sums, sums[1:]))
    gap = abs(sums[-2] - sums[-1])
    return (gap if monotone else math.inf), 0.0, 5e-3, "abs", f"monotone={monotone}, eta=16"


CHECKS = {
    "rho-star-fixed-point": (_rho_star_fixed_point, "rho* is a fixed point of the correlation map"),
    "rho-recursion-sign-flip": (_rho_recursion_sign_flip,
                                "starting at -rho* the error correlation keeps |rho| = rho*"),
    "eta-convergence-to-ozarow": (_eta_convergence,
                                  "perfect-feedback scheme sum rate approaches the Ozarow maximum"),
    "noisy-fb-beneficial": (_noisy_fb_beneficial, "noisy feedback beats the no-feedback sum capacity"),
    "partial-fb-beneficial": (_partial_fb_beneficial,
                              "partial feedback beats the no-feedback sum capacity"),
    "cl-counterexample": (_cl_counterexample,
                          "an achievable point lies outside the Cover-Leung region"),
    "carleial-collapse": (lambda ov: _collapse(carleial_grid_max, ov),
                          "Carleial region collapses to no feedback at the noise threshold"),
    "willems-collapse": (lambda ov: _collapse(willems_grid_max, ov),
                         "Willems region collapses to no feedback at the noise threshold"),
    "kw-monotonicity": (_kw_monotonicity, "more feedback noise never raises rates or lowers powers"),
    "formula-consistency": (_formula_consistency,
                            "innovation, closed-form and reduced rate formulas agree"),
    "split-rho-consistency": (_split_rho_consistency,
                              "split correlation equals rho* of the reduced channel"),
    "continuity-in-kw": (_continuity_in_kw,
                         "scheme sum rate increases to its perfect-feedback value as K_W shrinks"),
}


def check_ids():
    return sorted(CHECKS)


def run_verify(check_id, overrides=None):
    if check_id not in CHECKS:
        raise UnknownCheck(check_id)
    fn, claim = CHECKS[check_id]
    t0 = time.perf_counter()
    measured, expected, tol, kind, detail = fn(overrides)
    ms = int(round(1000.0 * (time.perf_counter() - t0)))
    return VerificationOutcome(
        check_id, _judge(kind, measured, expected, tol), float(measured), float(expected),
        float(tol), ms, claim, kind, detail,
    )


def run_all(overrides=None):
    """Every check, ordered by id."""
    return [run_verify(c, overrides) for c in check_ids()]
