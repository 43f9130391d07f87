"""Closed-form baseline regions: no feedback, Ozarow, Cover-Leung, Carleial, Willems.

Rates are in nats per channel use.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .channel import ChannelConfig
from .errors import Condrho1Violated, RhoAboveRhoStar
from .lp import DualVertexLP

__all__ = [
    "CARLEIAL_LABELS",
    "CarleialParams",
    "FeasibilityReport",
    "GridMaxReport",
    "RateTriple",
    "WILLEMS_LABELS",
    "WillemsParams",
    "carleial_feasible",
    "carleial_grid_max",
    "carleial_rhs",
    "collapse_thresholds",
    "cover_leung_boundary_point",
    "cover_leung_region",
    "fixed_point_map",
    "no_feedback_region",
    "ozarow_rects",
    "ozarow_region",
    "rho_star",
    "rho_star_residual",
    "willems_feasible",
    "willems_grid_max",
    "willems_rhs",
]

_XTOL = 1e-300
_RTOL = 1e-15


def _hl(x):
    """``0.5 * log(1 + x)``, elementwise."""
    return 0.5 * np.log1p(x)


@dataclass(frozen=True)
class RateTriple:
    """Right-hand sides of ``R1 <= r1_max``, ``R2 <= r2_max``, ``R1+R2 <= rsum_max``."""

    r1_max: float
    r2_max: float
    rsum_max: float

    @property
    def sum_rate(self):
        """Largest achievable ``R1 + R2`` in the pentagon."""
        return min(self.rsum_max, self.r1_max + self.r2_max)

    def weighted(self, l1, l2):
        """Support value ``max l1 R1 + l2 R2`` over the pentagon."""
        r1, r2, rs = self.r1_max, self.r2_max, self.rsum_max
        # the two dominant corners of the pentagon and the axis points
        corners = (
            (min(r1, rs), max(0.0, min(r2, rs - min(r1, rs)))),
            (max(0.0, min(r1, rs - min(r2, rs))), min(r2, rs)),
        )
        return max(l1 * a + l2 * b for a, b in corners)

    def as_tuple(self):
        return (self.r1_max, self.r2_max, self.rsum_max)

    def to_bits(self):
        k = 1.0 / math.log(2.0)
        return RateTriple(self.r1_max * k, self.r2_max * k, self.rsum_max * k)


def no_feedback_region(cfg):
    p1, p2, n = cfg.p1, cfg.p2, cfg.n0
    return RateTriple(float(_hl(p1 / n)), float(_hl(p2 / n)), float(_hl((p1 + p2) / n)))


def rho_star_residual(cfg, rho):
    """Sum-rate side minus product side of the quartic defining ``rho*``.

    Negative below the root, positive above it.
    """
    p1, p2, n = cfg.p1, cfg.p2, cfg.n0
    lhs = n * (n + p1 + p2 + 2.0 * math.sqrt(p1 * p2) * rho)
    rhs = (n + p1 * (1.0 - rho * rho)) * (n + p2 * (1.0 - rho * rho))
    return lhs - rhs


def rho_star(cfg):
    """Input correlation at which the Ozarow pentagon becomes a rectangle.

    The left side of the quartic grows with ``rho`` and the right side
    shrinks, so the root in ``[0, 1]`` is unique and bisection brackets it.
    """
    f = lambda r: rho_star_residual(cfg, r)  # noqa: E731
    if f(0.0) >= 0.0:
        return 0.0
    return float(bisect(f, 0.0, 1.0, xtol=_XTOL, rtol=_RTOL, maxiter=200))


def fixed_point_map(cfg, rho):
    """The correlation update map whose fixed point is ``rho*``."""
    p1, p2, n = cfg.p1, cfg.p2, cfg.n0
    q = 1.0 - rho * rho
    num = math.sqrt(p1 * p2) * q - rho * n
    return num / (math.sqrt(p1 * q + n) * math.sqrt(p2 * q + n))


def ozarow_region(cfg, rho):
    p1, p2, n = cfg.p1, cfg.p2, cfg.n0
    q = 1.0 - rho * rho
    return RateTriple(
        float(_hl(p1 * q / n)),
        float(_hl(p2 * q / n)),
        float(_hl((p1 + p2 + 2.0 * math.sqrt(p1 * p2) * rho) / n)),
    )


def ozarow_rects(cfg, rho):
    """The two rectangles whose union over ``rho`` gives the Ozarow region.

    Rectangle 1 keeps the single-user bound of transmitter 1 and gives
    transmitter 2 the remainder of the sum bound; rectangle 2 is the mirror.
    """
    rs = rho_star(cfg)
    if rho > rs + 1e-12:
        raise RhoAboveRhoStar(f"rho={rho} exceeds rho*={rs}")
    t = ozarow_region(cfg, rho)
    rect1 = RateTriple(t.r1_max, t.rsum_max - t.r1_max, t.rsum_max)
    rect2 = RateTriple(t.rsum_max - t.r2_max, t.r2_max, t.rsum_max)
    return rect1, rect2


def cover_leung_region(cfg, rho1, rho2):
    p1, p2, n = cfg.p1, cfg.p2, cfg.n0
    return RateTriple(
        float(_hl(p1 * (1.0 - rho1 * rho1) / n)),
        float(_hl(p2 * (1.0 - rho2 * rho2) / n)),
        float(_hl((p1 + p2 + 2.0 * math.sqrt(p1 * p2) * rho1 * rho2) / n)),
    )


def cover_leung_boundary_point(cfg, rho1):
    """Boundary point ``(R1(rho1), R2(rho1))`` of the Cover-Leung region.

    ``R2`` maximizes, over ``rho2``, the smaller of a decreasing and an
    increasing term; the maximum sits where they cross.
    """
    p1, p2, n = cfg.p1, cfg.p2, cfg.n0
    if not 0.0 <= rho1 < 1.0 or p2 / n < rho1 * rho1 / (1.0 - rho1 * rho1):
        raise Condrho1Violated(f"rho1={rho1} violates P2/N >= rho1^2/(1-rho1^2)")
    r1 = float(_hl(p1 * (1.0 - rho1 * rho1) / n))
    base = p1 * (1.0 - rho1 * rho1) + n

    def first(r2):
        return float(_hl(p2 * (1.0 - r2 * r2) / n))

    def second(r2):
        return 0.5 * math.log((p1 + p2 + 2.0 * math.sqrt(p1 * p2) * rho1 * r2 + n) / base)

    gap = lambda r2: first(r2) - second(r2)  # noqa: E731
    if gap(0.0) <= 0.0:
        return r1, min(first(0.0), second(0.0))
    if gap(1.0) >= 0.0:
        return r1, min(first(1.0), second(1.0))
    r2 = bisect(gap, 0.0, 1.0, xtol=1e-15, rtol=_RTOL, maxiter=200)
    return r1, min(first(r2), second(r2))


# ---------------------------------------------------------------------------
# Split-rate regions. Both are unions of polytopes in the split rates; the
# best weighted rate for given parameters is a 4-variable LP.


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    slacks: np.ndarray
    labels: tuple


@dataclass(frozen=True)
class GridMaxReport:
    """Result of a grid maximization of a weighted rate.

    ``excess`` is the largest gap between the region's weighted rate and the
    no-feedback support in the same direction, over all weights and grid
    points; a region contained in the no-feedback region has ``excess <= 0``.
    """

    best_sum_rate: float
    no_fb_sum_rate: float
    excess: float
    argmax: tuple
    worst_weight: float
    n_points: int


def collapse_thresholds(cfg):
    """Feedback-noise variances above which Carleial and Willems regions add nothing."""
    p1, p2, n = cfg.p1, cfg.p2, cfg.n0
    return p1 * (1.5 + p2 / n), p2 * (1.5 + p1 / n)


@dataclass(frozen=True)
class CarleialParams:
    alpha1: float
    alpha2: float
    beta1: float
    beta2: float
    upsilon: float
    r10: float = 0.0
    r11: float = 0.0
    r20: float = 0.0
    r22: float = 0.0

    @property
    def rates(self):
        return (self.r10 + self.r11, self.r20 + self.r22)


CARLEIAL_LABELS = (
    "R10", "R20", "R11", "R22", "R10+R20", "R10+R22", "R20+R11",
    "R11+R22", "R1+R20", "R10+R2", "R1+R22", "R11+R2", "R1+R2",
)
# columns: r10, r11, r20, r22
_CARLEIAL_A = np.array(
    [
        [1, 0, 0, 0],
        [0, 0, 1, 0],
        [0, 1, 0, 0],
        [0, 0, 0, 1],
        [1, 0, 1, 0],
        [1, 0, 0, 1],
        [0, 1, 1, 0],
        [0, 1, 0, 1],
        [1, 1, 1, 0],
        [1, 0, 1, 1],
        [1, 1, 0, 1],
        [0, 1, 1, 1],
        [1, 1, 1, 1],
    ],
    dtype=float,
)


def carleial_rhs(cfg, alpha1, alpha2, beta1, beta2, upsilon):
    """The 13 right-hand sides, broadcast over array-valued parameters.

    Returns an array with a trailing axis of length 13 ordered as
    :data:`CARLEIAL_LABELS`.
    """
    p1, p2, n = cfg.p1, cfg.p2, cfg.n0
    s1, s2 = cfg.kw.sigma1_sq, cfg.kw.sigma2_sq
    a1, a2, b1, b2, u = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (alpha1, alpha2, beta1, beta2, upsilon))
    )
    # coherent part shared by both transmitters and the noise it sees
    coh = (1 - a1) * p1 + (1 - a2) * p2 + 2.0 * np.sqrt((1 - a1) * (1 - a2) * p1 * p2)
    d = n + a1 * p1 + a2 * p2
    full = _hl(coh / d)
    part = _hl(u * coh / d)
    cpart = _hl((1 - u) * coh / d)
    rows = [
        _hl(a1 * (1 - b1) * p1 / (a1 * b1 * p1 + n + s2)),
        _hl(a2 * (1 - b2) * p2 / (a2 * b2 * p2 + n + s1)),
        _hl(a1 * b1 * p1 / n),
        _hl(a2 * b2 * p2 / n),
        _hl((a1 * (1 - b1) * p1 + a2 * (1 - b2) * p2) / n) + full,
        _hl((a1 * (1 - b1) * p1 + a2 * b2 * p2) / n) + part,
        _hl((a1 * b1 * p1 + a2 * (1 - b2) * p2) / n) + cpart,
        _hl((a1 * b1 * p1 + a2 * b2 * p2) / n),
        _hl((a1 * p1 + a2 * (1 - b2) * p2) / n) + full,
        _hl((a1 * (1 - b1) * p1 + a2 * p2) / n) + full,
        _hl((a1 * p1 + a2 * b2 * p2) / n) + part,
        _hl((a1 * b1 * p1 + a2 * p2) / n) + cpart,
        _hl((p1 + p2 + 2.0 * np.sqrt((1 - a1) * (1 - a2) * p1 * p2)) / n),
    ]
    return np.stack(rows, axis=-1)


def carleial_feasible(cfg, params, tol=1e-12):
    b = carleial_rhs(cfg, params.alpha1, params.alpha2, params.beta1, params.beta2, params.upsilon)
    x = np.array([params.r10, params.r11, params.r20, params.r22])
    slacks = b - _CARLEIAL_A @ x
    ok = bool(np.all(slacks >= -tol) and np.all(x >= 0))
    return FeasibilityReport(ok, slacks, CARLEIAL_LABELS)


@dataclass(frozen=True)
class WillemsParams:
    delta1: float
    delta2: float
    rho1: float
    rho2: float
    r11: float = 0.0
    r10: float = 0.0
    r20: float = 0.0
    r22: float = 0.0

    @property
    def rates(self):
        return (self.r11 + self.r10, self.r20 + self.r22)


WILLEMS_LABELS = ("R11", "R10", "R20", "R22", "R11+R22", "R1+R2")
# columns: r11, r10, r20, r22
_WILLEMS_A = np.array(
    [
        [1, 0, 0, 0],
        [0, 1, 0, 0],
        [0, 0, 1, 0],
        [0, 0, 0, 1],
        [1, 0, 0, 1],
        [1, 1, 1, 1],
    ],
    dtype=float,
)


def willems_rhs(cfg, delta1, delta2, rho1, rho2):
    p1, p2, n = cfg.p1, cfg.p2, cfg.n0
    s1, s2 = cfg.kw.sigma1_sq, cfg.kw.sigma2_sq
    d1, d2, r1, r2 = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (delta1, delta2, rho1, rho2))
    )
    rows = [
        _hl(d1 * p1 / n),
        _hl((1 - d1) * p1 * (1 - r1 * r1) / (d1 * p1 + n + s2)),
        _hl((1 - d2) * p2 * (1 - r2 * r2) / (d2 * p2 + n + s1)),
        _hl(d2 * p2 / n),
        _hl((d1 * p1 + d2 * p2) / n),
        _hl((p1 + p2 + 2.0 * np.sqrt((1 - d1) * (1 - d2) * p1 * p2) * r1 * r2) / n),
    ]
    return np.stack(rows, axis=-1)


def willems_feasible(cfg, params, tol=1e-12):
    b = willems_rhs(cfg, params.delta1, params.delta2, params.rho1, params.rho2)
    x = np.array([params.r11, params.r10, params.r20, params.r22])
    slacks = b - _WILLEMS_A @ x
    ok = bool(np.all(slacks >= -tol) and np.all(x >= 0))
    return FeasibilityReport(ok, slacks, WILLEMS_LABELS)


def _split_objective(weight):
    """Objective over the split rates for ``weight*R1 + (1-weight)*R2``."""
    return np.array([weight, weight, 1.0 - weight, 1.0 - weight])


def _grid_max(cfg, rhs_fn, a, n_params, points, weights, chunk=200_000):
    axis = np.linspace(0.0, 1.0, points)
    mesh = np.meshgrid(*([axis] * n_params), indexing="ij")
    flat = [m.reshape(-1) for m in mesh]
    b = rhs_fn(cfg, *flat)
    nf = no_feedback_region(cfg)
    best_sum, excess, arg, worst_w = -np.inf, -np.inf, None, None
    for w in weights:
        solver = DualVertexLP(a, _split_objective(w))
        vals = np.concatenate(
            [solver.value(b[i : i + chunk]) for i in range(0, b.shape[0], chunk)]
        )
        k = int(np.argmax(vals))
        gap = float(vals[k]) - nf.weighted(w, 1.0 - w)
        if gap > excess:
            excess, worst_w = gap, float(w)
        if abs(w - 0.5) < 1e-12:
            best_sum = 2.0 * float(vals[k])
            arg = tuple(float(f[k]) for f in flat)
    if best_sum == -np.inf:
        best_sum = DualVertexLP(a, np.ones(4)).value(b).max()
    return GridMaxReport(best_sum, nf.rsum_max, excess, arg, worst_w, b.shape[0] * len(weights))


def carleial_grid_max(cfg, points=11, weights=None):
    """Grid maximum of the weighted Carleial rate.

    The grid spans ``(alpha1, alpha2, beta1, beta2, upsilon)`` with
    ``points`` values per axis; the sixth axis is the weight ``w`` of
    ``w*R1 + (1-w)*R2``. Split rates are optimized exactly for each grid
    point.
    """
    if weights is None:
        weights = np.linspace(0.0, 1.0, points)
    return _grid_max(cfg, carleial_rhs, _CARLEIAL_A, 5, points, weights)


def willems_grid_max(cfg, points=11, weights=(0.5,)):
    """Grid maximum of the Willems sum rate over ``(delta1, delta2, rho1, rho2)``."""
    return _grid_max(cfg, willems_rhs, _WILLEMS_A, 4, points, weights)
