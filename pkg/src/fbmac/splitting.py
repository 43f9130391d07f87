"""Rate splitting: part of a message rides the feedback scheme, the rest is sent without feedback.

Also covers the perfect partial-feedback combinations of a Cover-Leung
layer with the feedback scheme.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from .channel import ChannelConfig, FeedbackModel, kw_matrix
from .classic import RateTriple, cover_leung_region, ozarow_region, rho_star
from .errors import PowerSplitInfeasible, RhoAboveRhoStar
from .linalg import log_det_ratio
from .presets import choice1_params, perfect_partial_region
from .scheme import SchemeParams, noise_cov, power_usage, rate_bounds_noisy

__all__ = [
    "PROP7_LABELS",
    "Rs1Result",
    "SplitFeasibility",
    "SplitForRho",
    "SplitPoint",
    "alpha_of_rho",
    "ozarow_corner_decomposition",
    "prop6_feasible",
    "prop7_feasible",
    "prop7_max_sum",
    "prop7_rhs",
    "rs1_best_split",
    "rs1_region",
    "rs2_region",
    "split_for_rho",
]


@dataclass(frozen=True)
class SplitPoint:
    r1_cs: float
    r1_nf: float
    r2: float

    @property
    def r1(self):
        return self.r1_cs + self.r1_nf


@dataclass(frozen=True)
class Rs1Result:
    """Rates with transmitter 1 split into a feedback part and a no-feedback part.

    ``inner`` bounds ``(R1_CS, R2, R1_CS + R2)`` for the feedback part;
    ``r1_nf_max`` bounds the no-feedback part.
    """

    inner: RateTriple
    r1_nf_max: float


def rs1_region(params, cfg, p1_prime):
    """Split transmitter 1's power into ``p1_prime`` without feedback and the rest with it.

    The feedback part sees the no-feedback layer as extra noise of variance
    ``p1_prime``.
    """
    if not 0.0 <= p1_prime <= cfg.p1:
        raise PowerSplitInfeasible(f"p1_prime={p1_prime} outside [0, {cfg.p1}]")
    kw = kw_matrix(cfg)
    inner_cfg = cfg.with_(p1=cfg.p1 - p1_prime, n0=cfg.n0 + p1_prime)
    use = power_usage(params, inner_cfg, kw)
    if not use.feasible:
        raise PowerSplitInfeasible(
            f"parameters use powers ({use.p1_used:.6g}, {use.p2_used:.6g}) "
            f"above ({inner_cfg.p1:.6g}, {inner_cfg.p2:.6g}) at noise {inner_cfg.n0:.6g}"
        )
    inner = rate_bounds_noisy(params, inner_cfg, kw)
    s = noise_cov(params, cfg, "noisy", kw)
    eta = params.eta
    r1_nf = log_det_ratio(p1_prime * np.eye(eta) + s, s) / (2.0 * eta)
    return Rs1Result(inner, max(r1_nf, 0.0))


def rs2_region(params, cfg, p2_prime):
    """Mirror of :func:`rs1_region` with transmitter 2 splitting its power.

    ``params`` are in the original user order; the result's ``inner`` is
    ``(R1, R2_CS, R1 + R2_CS)`` and ``r1_nf_max`` holds the bound on ``R2_NF``.
    """
    swapped = SchemeParams(params.eta, params.a2, params.a1, params.b2, params.b1)
    res = rs1_region(swapped, cfg.swapped(), p2_prime)
    t = res.inner
    return Rs1Result(RateTriple(t.r2_max, t.r1_max, t.rsum_max), res.r1_nf_max)


def combined_triple(res):
    """Pentagon of ``(R1_CS + R1_NF, R2)`` for independent bounds on the two parts."""
    t = res.inner
    return RateTriple(t.r1_max + res.r1_nf_max, t.r2_max, t.rsum_max + res.r1_nf_max)


def rs1_best_split(cfg, eta, weights=(1.0, 1.0), params_for=None, grid=64):
    """Best power split ``P1'`` for a weighted rate, over a grid then a bounded refinement.

    ``params_for(inner_cfg)`` builds scheme parameters for the feedback
    part; the default is the Choice-I preset. Returns ``(p1_prime, triple, value)``.
    """
    if params_for is None:
        params_for = lambda c: choice1_params(eta, c).params  # noqa: E731

    def value(q):
        inner_cfg = cfg.with_(p1=cfg.p1 - q, n0=cfg.n0 + q)
        if inner_cfg.p1 <= 0.0:
            return -math.inf, None
        res = rs1_region(params_for(inner_cfg), cfg, q)
        t = combined_triple(res)
        return t.weighted(*weights), t

    qs = np.linspace(0.0, cfg.p1, grid, endpoint=False)
    vals = [value(float(q))[0] for q in qs]
    k = int(np.argmax(vals))
    lo, hi = qs[max(k - 1, 0)], qs[min(k + 1, grid - 1)]
    best_q = float(qs[k])
    if hi > lo:
        r = minimize_scalar(lambda q: -value(q)[0], bounds=(lo, hi), method="bounded",
                            options={"xatol": 1e-10})
        if -r.fun > vals[k]:
            best_q = float(r.x)
    v, t = value(best_q)
    return best_q, t, v


def _alpha_gap(cfg, rho, alpha):
    p1, p2, n = cfg.p1, cfg.p2, cfg.n0
    lhs = (p1 + p2 + 2.0 * math.sqrt(p1 * p2) * rho + n) / (p1 * (1.0 - rho * rho) + n)
    rhs = 1.0 + p2 * (1.0 - rho * rho / (1.0 - alpha)) / (alpha * p1 + n)
    return rhs - lhs


def alpha_of_rho(cfg, rho):
    """Fraction of transmitter 1's power sent without feedback for correlation ``rho``.

    The right side of the defining equation decreases in ``alpha``; at
    ``rho = 0`` the root is the endpoint ``alpha = 1``.
    """
    rs = rho_star(cfg)
    if rho > rs + 1e-12:
        raise RhoAboveRhoStar(f"rho={rho} exceeds rho*={rs}")
    if rho <= 0.0:
        return 1.0
    f = lambda a: _alpha_gap(cfg, rho, a)  # noqa: E731
    hi = 1.0 - rho * rho
    if f(0.0) <= 0.0:
        return 0.0
    return float(bisect(f, 0.0, hi, xtol=1e-300, rtol=1e-15, maxiter=200))


@dataclass(frozen=True)
class SplitForRho:
    alpha: float
    p1_prime: float
    p1_dprime: float
    n_prime: float
    rho_prime: float


def split_for_rho(cfg, rho):
    alpha = alpha_of_rho(cfg, rho)
    p1p = alpha * cfg.p1
    rho_p = 0.0 if alpha >= 1.0 else rho / math.sqrt(1.0 - alpha)
    return SplitForRho(alpha, p1p, (1.0 - alpha) * cfg.p1, p1p + cfg.n0, rho_p)


def ozarow_corner_decomposition(cfg, rho):
    """Dominant corner of the first Ozarow rectangle written through the split.

    Returns ``(r1_nf, r1_cs, r2)``: the no-feedback part of ``R1``, the part
    carried with feedback at noise ``N'``, and ``R2``.
    """
    sp = split_for_rho(cfg, rho)
    sub = ChannelConfig(max(sp.p1_dprime, 0.0), cfg.p2, sp.n_prime)
    t = ozarow_region(sub, sp.rho_prime)
    return 0.5 * math.log1p(sp.p1_prime / cfg.n0), t.r1_max, t.r2_max


@dataclass(frozen=True)
class SplitFeasibility:
    feasible: bool
    slacks: np.ndarray


def prop6_feasible(cfg, splits, rho1, rho2, p1_prime, p2_prime, cs_region=None, tol=1e-12):
    """Cover-Leung layer at powers ``(P1', P2')`` plus the feedback scheme on the rest.

    ``splits`` is ``(r1_cl, r2_cl, r1_cs, r2_cs)``. The feedback layer sees
    the Cover-Leung layer as noise. ``cs_region`` maps a
    :class:`ChannelConfig` to a :class:`RateTriple`; the default is the
    two-use perfect partial-feedback triple.
    """
    r1_cl, r2_cl, r1_cs, r2_cs = splits
    n0 = cfg.n0
    cl = cover_leung_region(ChannelConfig(p1_prime, p2_prime, n0), rho1, rho2)
    n_cs = n0 + p1_prime + p2_prime + 2.0 * math.sqrt(p1_prime * p2_prime) * rho1 * rho2
    cs_cfg = ChannelConfig(
        cfg.p1 - p1_prime, cfg.p2 - p2_prime, n_cs, model=FeedbackModel.PERFECT_PARTIAL
    )
    cs = (cs_region or perfect_partial_region)(cs_cfg)
    slacks = np.array(
        [
            cl.r1_max - r1_cl,
            cl.r2_max - r2_cl,
            cl.rsum_max - r1_cl - r2_cl,
            cs.r1_max - r1_cs,
            cs.r2_max - r2_cs,
            cs.rsum_max - r1_cs - r2_cs,
        ]
    )
    ok = bool(np.all(slacks >= -tol) and min(splits) >= 0.0)
    return SplitFeasibility(ok, slacks)


PROP7_LABELS = (
    "R1ICS", "R2ICS", "R1ICS+R2ICS",
    "R1ICL1(a)", "R1ICL1(b)", "R2ICL1", "R1ICL1+R2ICL1",
    "R1ICL2(a)", "R1ICL2(b)", "R2ICL2", "R1ICL2+R2ICL2",
)
# columns: r1_ics, r2_ics, r1_icl1, r2_icl1, r1_icl2, r2_icl2
_PROP7_A = np.array(
    [
        [1, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0],
        [1, 1, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0],
        [0, 0, 1, 0, 0, 0],
        [0, 0, 0, 1, 0, 0],
        [0, 0, 1, 1, 0, 0],
        [0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, 1, 1],
    ],
    dtype=float,
)


def prop7_rhs(cfg, rho1, rho2, p1_prime, p2_prime):
    """The 11 right-hand sides, ordered as :data:`PROP7_LABELS`."""
    n = cfg.n0
    q1, q2 = p1_prime, p2_prime
    d1, d2 = cfg.p1 - q1, cfg.p2 - q2
    ql = lambda x: 0.25 * math.log1p(x)  # noqa: E731
    n1 = d1 + d2
    n2 = (
        d1 * (d2 + n) / (d1 + d2 + n)
        + d2
        + 2.0 * math.sqrt(d1 * d1 / (d1 + n) * d2 * d2 / (d1 + d2 + n))
    )
    a1, a2 = (1.0 - rho1 * rho1) * q1, (1.0 - rho2 * rho2) * q2
    coh = (math.sqrt(rho1 * rho1 * q1) + math.sqrt(rho2 * rho2 * q2)) ** 2
    pair = q1 + q2 + 2.0 * math.sqrt(q1 * q2 * rho1 * rho1 * rho2 * rho2)
    rhs = [
        ql(2.0 * d1 / n),
        ql(d2 * (2.0 + d2 / (d1 + n)) / n),
        ql((d1 + d2) / n) + ql(n2 / n),
        ql(a1 / (q1 + n)),
        ql(a1 / (n1 + n)) + ql(coh / (n1 + n + a1 + a2)),
        ql(a2 / (n1 + n)),
        ql(pair / (n1 + n)),
        ql(a1 / (q1 * n / (q1 + n) + n)),
        ql(a1 / (n2 + n)) + ql(coh / (n2 + n + a1 + a2)),
        ql(a2 / (n2 + n)),
        ql(pair / (n2 + n)),
    ]
    return np.array(rhs)


def prop7_feasible(cfg, rates, rho1, rho2, p1_prime, p2_prime, tol=1e-12):
    """``rates`` is ``(r1_ics, r2_ics, r1_icl1, r2_icl1, r1_icl2, r2_icl2)``."""
    x = np.asarray(rates, dtype=float)
    slacks = prop7_rhs(cfg, rho1, rho2, p1_prime, p2_prime) - _PROP7_A @ x
    return SplitFeasibility(bool(np.all(slacks >= -tol) and np.all(x >= 0)), slacks)


def prop7_max_sum(cfg, rho1, rho2, p1_prime, p2_prime):
    """Largest ``R1 + R2`` allowed by the 11 constraints (groups are independent)."""
    b = prop7_rhs(cfg, rho1, rho2, p1_prime, p2_prime)
    ics = min(b[0] + b[1], b[2])
    icl1 = min(min(b[3], b[4]) + b[5], b[6])
    icl2 = min(min(b[7], b[8]) + b[9], b[10])
    return ics + icl1 + icl2
