"""Ready-made scheme parameters and the closed-form regions they induce.

All three constructions send a scaled LMMSE-style estimation error: at use
``l`` transmitter ``nu`` sends a multiple of ``Xi_nu - gamma^T V_nu^{l-1}``
scaled to power exactly ``P_nu``, with transmitter 2 flipping sign on every
other use. They differ in the regression used for ``gamma`` and in the
power of the first use.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import bisect

from .channel import FeedbackModel, kw_matrix
from .classic import RateTriple, rho_star
from .errors import SymmetryViolated
from .innovation import primitive_cov
from .scheme import SchemeParams

__all__ = [
    "Corollary",
    "PresetReport",
    "choice1_params",
    "choice2_params",
    "choice3_params_si",
    "corollary_regions",
    "equal_rate_point",
    "eqpow_partial_region",
    "partial_choice1_params",
    "perfect_fb_eta_region",
    "perfect_partial_region",
    "solve_r",
    "symmetric_region",
    "time_sharing_partial_sum_rate",
]


@dataclass(frozen=True)
class PresetReport:
    """Parameters plus the intermediate regression data that produced them.

    ``gamma_vectors[nu][l]`` is the regression vector used at use ``l + 1``
    (empty for the first use) and ``beta_sequence[nu][l]`` the variance of
    the corresponding estimation error before scaling.
    """

    params: SchemeParams
    gamma_vectors: tuple
    beta_sequence: tuple
    r: float | None = None


def _construct(eta, cfg, kw, first_scale, inflation, feedback_to=(True, True)):
    """Forward construction shared by all presets.

    ``inflation[nu]`` is added to the diagonal of ``K_V`` before solving for
    ``gamma``; zero gives the plain LMMSE regression.
    """
    n0 = cfg.n0
    powers = (cfg.p1, cfg.p2)
    d = 2 + 3 * eta
    sig = primitive_cov(eta, n0, kw)
    eye = np.eye(d)
    xi = eye[0:2]
    z = eye[2 : 2 + eta]
    w = (eye[2 + eta : 2 + 2 * eta], eye[2 + 2 * eta :])
    x = [np.zeros((eta, d)), np.zeros((eta, d))]
    v = [np.zeros((eta, d)), np.zeros((eta, d))]
    a = [np.zeros(eta), np.zeros(eta)]
    b = [np.zeros((eta, eta)), np.zeros((eta, eta))]
    gammas = ([], [])
    betas = ([], [])
    for l in range(eta):
        for nu in range(2):
            sign = -1.0 if (nu == 1 and l % 2 == 1) else 1.0
            if l == 0 or not feedback_to[nu]:
                scale = math.sqrt(first_scale * powers[nu]) if l == 0 else math.sqrt(powers[nu])
                a[nu][l] = sign * scale
                x[nu][l] = a[nu][l] * xi[nu]
                gammas[nu].append(np.zeros(0))
                betas[nu].append(1.0)
                continue
            past = v[nu][:l]
            kv = past @ sig @ past.T
            kvx = past @ sig @ xi[nu]
            g = np.linalg.solve(kv + inflation[nu] * np.eye(l), kvx)
            err = xi[nu] - g @ past
            dvar = float(err @ sig @ err)
            k = sign * math.sqrt(powers[nu] / dvar)
            a[nu][l] = k
            b[nu][l, :l] = -k * g
            x[nu][l] = k * err
            gammas[nu].append(g)
            betas[nu].append(dvar)
        y = x[0][l] + x[1][l] + z[l]
        v[0][l] = y + w[0][l]
        v[1][l] = y + w[1][l]
    params = SchemeParams(eta, a[0], a[1], b[0], b[1])
    return params, gammas, betas


def _inflation(cfg, kw):
    """Diagonal loading ``(s1 + s2 - 2 c s1 s2) P_nu / N`` for the noisy-feedback presets."""
    s1, s2 = kw[0, 0], kw[1, 1]
    c = s1 + s2 - 2.0 * kw[0, 1]
    return (c * cfg.p1 / cfg.n0, c * cfg.p2 / cfg.n0)


def choice1_params(eta, cfg):
    """Full-power first use, then scaled regression errors with loaded covariances."""
    kw = kw_matrix(cfg)
    params, g, bt = _construct(eta, cfg, kw, 1.0, _inflation(cfg, kw))
    return PresetReport(params, tuple(g), tuple(bt))


def partial_choice1_params(eta, cfg):
    """Transmitter 1 repeats ``sqrt(P1) Xi1``; transmitter 2 uses its feedback.

    The loading on transmitter 2's covariance is ``sigma2^2 P2 / N``.
    """
    kw = np.array([[0.0, 0.0], [0.0, kw_matrix(cfg)[1, 1]]])
    infl = (0.0, kw[1, 1] * cfg.p2 / cfg.n0)
    params, g, bt = _construct(eta, cfg, kw, 1.0, infl, feedback_to=(False, True))
    return PresetReport(params, tuple(g), tuple(bt))


def solve_r(cfg):
    """First-use power fraction making the first estimation errors correlate at ``-rho*``."""
    rs = rho_star(cfg)
    p1, p2, n = cfg.p1, cfg.p2, cfg.n0

    def f(r):
        return math.sqrt(r * r * p1 * p2 / ((r * p1 + n) * (r * p2 + n))) - rs

    if f(1.0) <= 0.0:
        return 1.0
    return float(bisect(f, 0.0, 1.0, xtol=1e-300, rtol=1e-15, maxiter=200))


def choice2_params(eta, cfg):
    """As :func:`choice1_params` but with first-use power ``r P_nu``."""
    kw = kw_matrix(cfg)
    r = solve_r(cfg)
    params, g, bt = _construct(eta, cfg, kw, r, _inflation(cfg, kw))
    return PresetReport(params, tuple(g), tuple(bt), r)


def choice3_params_si(eta, cfg):
    """Plain LMMSE regression on the noisy feedback, for a receiver that knows the feedback noise."""
    kw = cfg.kw.matrix() if cfg.model == FeedbackModel.NOISY_RX_SI else kw_matrix(cfg)
    params, g, bt = _construct(eta, cfg, kw, 1.0, (0.0, 0.0))
    return PresetReport(params, tuple(g), tuple(bt))


def perfect_fb_eta_region(eta, cfg):
    """Closed-form rates of the Choice-II scheme under perfect feedback.

    Returns
    -------
    triple : RateTriple
    rhos : list of float
        ``rho_1 .. rho_{eta-1}``, the correlations of the estimation errors
        after each use; ``rho_1 = -rho*`` and each next value follows the
        correlation update, so ``|rho_l| = rho*``.
    """
    p1, p2, n = cfg.p1, cfg.p2, cfg.n0
    r = solve_r(cfg)
    rs = rho_star(cfg)
    sq = math.sqrt(p1 * p2)
    r1 = 0.5 * math.log1p(r * p1 / n)
    r2 = 0.5 * math.log1p(r * p2 / n)
    rsum = 0.5 * math.log1p(r * (p1 + p2) / n)
    rhos = []
    rho = -rs
    for l in range(2, eta + 1):
        rhos.append(rho)
        q = 1.0 - rho * rho
        r1 += 0.5 * math.log1p(p1 * q / n)
        r2 += 0.5 * math.log1p(p2 * q / n)
        sgn = -1.0 if (l - 1) % 2 else 1.0
        rsum += 0.5 * math.log1p((p1 + p2 + 2.0 * sq * sgn * rho) / n)
        rho = (rho * n - sgn * sq * q) / (math.sqrt(p1 * q + n) * math.sqrt(p2 * q + n))
    k = 1.0 / eta
    return RateTriple(r1 * k, r2 * k, rsum * k), rhos


class Corollary(str, Enum):
    SYMMETRIC = "sym"
    EQUAL_RATE = "equal_rate"
    EQPOW_PARTIAL = "eqpow_partial"
    PERFECT_PARTIAL = "perfect_partial"


def _require(cond, msg):
    if not cond:
        raise SymmetryViolated(msg)


def _symmetric_terms(cfg):
    _require(cfg.p1 == cfg.p2, "symmetric region needs P1 == P2")
    _require(cfg.kw.sigma1_sq == cfg.kw.sigma2_sq, "symmetric region needs sigma1^2 == sigma2^2")
    p, n, s = cfg.p1, cfg.n0, cfg.kw.sigma1_sq
    q = p + n + s + (2.0 * p / n) * (s - cfg.kw.corr * s)
    return p, n, q


def symmetric_region(cfg):
    p, n, q = _symmetric_terms(cfg)
    first = 0.25 * math.log1p(2.0 * p / n)
    r = first + 0.25 * math.log1p(p * p / ((2.0 * p + n) * q))
    rsum = 2.0 * first + 0.25 * math.log1p(2.0 * p * p / ((2.0 * p + n) * q))
    return RateTriple(r, r, rsum)


def equal_rate_point(cfg):
    p, n, q = _symmetric_terms(cfg)
    return 0.25 * math.log1p(2.0 * p / n) + 0.125 * math.log1p(2.0 * p * p / ((2.0 * p + n) * q))


def eqpow_partial_region(cfg, p=None):
    """Equal-power partial feedback; ``p`` overrides the common power."""
    if p is None:
        _require(cfg.p1 == cfg.p2, "equal-power region needs P1 == P2")
        p = cfg.p1
    n, s = cfg.n0, cfg.kw.sigma2_sq
    g = p + n + s + (p / n) * s
    h = 2.0 * p + n + s + (p / n) * s
    c = p / (2.0 * p + n)
    first = 0.25 * math.log1p(2.0 * p / n)
    r1 = first + 0.25 * math.log1p(-c * p * (p / n) * s / (h * g))
    r2 = first + 0.25 * math.log1p(c * p / g)
    # sqrt(1 + x) - 1 written as x / (sqrt(1 + x) + 1) to keep precision for large sigma
    x = p * (p + n + s) / (g * g)
    sqrt1pm1 = x / (math.sqrt(1.0 + x) + 1.0)
    inner = 2.0 * p * p / (2.0 * p + n) ** 2 * sqrt1pm1 + c * c * (p + n) * (2.0 * p + n + s) / (h * g)
    rsum = 2.0 * first + 0.25 * math.log1p(inner)
    return RateTriple(r1, r2, rsum)


def perfect_partial_region(cfg):
    p1, p2, n = cfg.p1, cfg.p2, cfg.n0
    r1 = 0.25 * math.log1p(2.0 * p1 / n)
    r2 = 0.25 * math.log1p(p2 * (2.0 + p2 / (p1 + n)) / n)
    cross = 2.0 * math.sqrt(p1 * p2 * p1 / (p1 + n) * p2 / (p1 + p2 + n))
    rsum = 0.25 * math.log1p((p1 + p2) / n) + 0.25 * math.log1p(
        (p1 * (p2 + n) / (p1 + p2 + n) + p2 + cross) / n
    )
    return RateTriple(r1, r2, rsum)


def corollary_regions(cfg, which):
    """Closed-form regions of the preset schemes at two channel uses.

    ``which`` selects the symmetric noisy-feedback triple, its equal-rate
    point (returned as a float), the equal-power partial-feedback triple, or
    the perfect partial-feedback triple.
    """
    which = Corollary(which)
    if which == Corollary.SYMMETRIC:
        return symmetric_region(cfg)
    if which == Corollary.EQUAL_RATE:
        return equal_rate_point(cfg)
    if which == Corollary.EQPOW_PARTIAL:
        return eqpow_partial_region(cfg)
    _require(cfg.model == FeedbackModel.PERFECT_PARTIAL or cfg.kw.sigma2_sq == 0.0,
             "perfect partial-feedback region needs sigma2^2 == 0")
    return perfect_partial_region(cfg)


def time_sharing_partial_sum_rate(cfg):
    """Sum rate for unequal powers under partial feedback by time sharing.

    The stronger transmitter sends alone at power ``P1 + P2`` for a fraction
    ``|P1 - P2| / (P1 + P2)`` of the time; for the rest both transmitters
    run the equal-power partial-feedback scheme at the average power.
    """
    p1, p2, n = cfg.p1, cfg.p2, cfg.n0
    tot = p1 + p2
    lam_alone = abs(p1 - p2) / tot
    lam_both = 2.0 * min(p1, p2) / tot
    alone = 0.5 * math.log1p(tot / n)
    both = eqpow_partial_region(cfg, p=tot / 2.0)
    return lam_alone * alone + lam_both * both.sum_rate
