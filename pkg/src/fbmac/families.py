"""Direction generators for the named regions, ready for :func:`union_frontier`."""

import math
from enum import Enum

import numpy as np

from .classic import RateTriple, no_feedback_region, ozarow_region, rho_star
from .geometry import unit_direction, best_corner, family_generator
from .presets import choice1_params, choice2_params, eqpow_partial_region, perfect_partial_region, symmetric_region
from .scheme import rate_bounds

__all__ = ["RegionName", "region_generator", "triple_generator"]


class RegionName(str, Enum):
    NO_FB = "no-fb"
    OZAROW = "ozarow"
    OZAROW_RECTS = "ozarow-rects"
    COVER_LEUNG = "cover-leung"
    CHOICE1 = "choice1"
    CHOICE2 = "choice2"
    SYMMETRIC = "symmetric"
    EQPOW_PARTIAL = "eqpow-partial"
    PERFECT_PARTIAL = "perfect-partial"


def triple_generator(t):
    return lambda theta: best_corner(t, *unit_direction(theta))


def _corners(r1, r2, rs):
    a = np.minimum(r1, rs)
    b = np.minimum(r2, rs)
    first = np.stack([a, np.clip(np.minimum(r2, rs - a), 0.0, None)], axis=-1)
    second = np.stack([np.clip(np.minimum(r1, rs - b), 0.0, None), b], axis=-1)
    return np.concatenate([first.reshape(-1, 2), second.reshape(-1, 2)])


def _point_cloud_generator(pts):
    """Best point of a fixed cloud per direction; ties go to the larger sum."""
    def gen(theta):
        l1, l2 = unit_direction(theta)
        score = pts @ np.array([l1, l2])
        top = score.max()
        cand = pts[score >= top - 1e-15 * max(1.0, abs(top))]
        p = cand[np.argmax(cand.sum(axis=1))]
        return float(p[0]), float(p[1])

    return gen


def _cover_leung_cloud(cfg, grid):
    p1, p2, n = cfg.p1, cfg.p2, cfg.n0
    r = np.linspace(0.0, 1.0, grid)
    r1g, r2g = np.meshgrid(r, r, indexing="ij")
    t1 = 0.5 * np.log1p(p1 * (1.0 - r1g**2) / n)
    t2 = 0.5 * np.log1p(p2 * (1.0 - r2g**2) / n)
    ts = 0.5 * np.log1p((p1 + p2 + 2.0 * math.sqrt(p1 * p2) * r1g * r2g) / n)
    return _corners(t1, t2, ts)


def _rect_generator(cfg, grid):
    """Union of the two rectangles per correlation, each contributing its corner."""
    rs = rho_star(cfg)

    def rect(rho, which):
        t = ozarow_region(cfg, min(rho, rs))
        if which == 0:
            return RateTriple(t.r1_max, t.rsum_max - t.r1_max, math.inf)
        return RateTriple(t.rsum_max - t.r2_max, t.r2_max, math.inf)

    subs = [family_generator(lambda s, w=w: rect(s, w), 0.0, rs, grid) for w in (0, 1)]

    def gen(theta):
        l1, l2 = unit_direction(theta)
        return max((g(theta) for g in subs), key=lambda p: (l1 * p[0] + l2 * p[1], p[0] + p[1]))

    return gen


def region_generator(name, cfg, eta=4, grid=257):
    """Generator for region ``name``; scheme regions use the preset at ``eta`` uses."""
    name = RegionName(name)
    if name == RegionName.NO_FB:
        return triple_generator(no_feedback_region(cfg))
    if name == RegionName.OZAROW:
        rs = rho_star(cfg)
        return family_generator(lambda r: ozarow_region(cfg, r), 0.0, rs, grid)
    if name == RegionName.OZAROW_RECTS:
        return _rect_generator(cfg, grid)
    if name == RegionName.COVER_LEUNG:
        return _point_cloud_generator(_cover_leung_cloud(cfg, grid))
    if name == RegionName.CHOICE1:
        return triple_generator(rate_bounds(choice1_params(eta, cfg).params, cfg))
    if name == RegionName.CHOICE2:
        return triple_generator(rate_bounds(choice2_params(eta, cfg).params, cfg))
    if name == RegionName.SYMMETRIC:
        return triple_generator(symmetric_region(cfg))
    if name == RegionName.EQPOW_PARTIAL:
        return triple_generator(eqpow_partial_region(cfg))
    return triple_generator(perfect_partial_region(cfg))
