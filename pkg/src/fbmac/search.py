"""Derivative-free search over scheme parameters for a weighted rate objective.

Free variables are the entries of ``a1``, ``a2`` and the strict lower
triangles of ``B1``, ``B2`` (``B2`` only, for partial feedback). The decoder
is always the LMMSE matrix. Every candidate is projected so both power
constraints hold with equality before it is scored.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import kw_matrix
from .errors import FbmacError, InvalidParams
from .presets import choice1_params, choice3_params_si, partial_choice1_params
from .scheme import SchemeParams, Variant, power_usage, rate_bounds

__all__ = ["SearchConfig", "SearchResult", "optimize", "project_powers"]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_PERTURB = 0.1
_MAX_SHRINK = 60


@dataclass(frozen=True)
class SearchConfig:
    eta: int
    weights: tuple = (1.0, 1.0)
    budget: int = 2000
    seed: int = 0
    restarts: int = 4

    def __post_init__(self):
        if self.eta < 1:
            raise InvalidParams("eta must be positive")
        if not self.budget >= self.restarts >= 1:
            raise InvalidParams("need budget >= restarts >= 1")
        if len(self.weights) != 2 or min(self.weights) < 0 or max(self.weights) <= 0:
            raise InvalidParams("weights must be two non-negative numbers, not both zero")


@dataclass
class SearchResult:
    best: SchemeParams
    objective: float
    trace: list = field(default_factory=list)
    evaluations: int = 0


def project_powers(params, cfg, kw=None):
    """Rescale ``a1, a2`` so both transmitters use exactly their power budget.

    The power of each transmitter is affine in ``(s1^2, s2^2)`` for fixed
    ``B``'s, so the scales solve a 2x2 linear system. When that has no
    positive solution the feedback matrices are halved and the solve is
    repeated.
    """
    kw = kw_matrix(cfg) if kw is None else kw
    p = params.with_c(None)
    if not np.any(p.a1):
        p = SchemeParams(p.eta, np.ones(p.eta), p.a2, p.b1, p.b2)
    if not np.any(p.a2):
        p = SchemeParams(p.eta, p.a1, np.ones(p.eta), p.b1, p.b2)
    target = np.array([cfg.p1, cfg.p2])
    for _ in range(_MAX_SHRINK):
        u0 = power_usage(p.scaled(0.0, 0.0), cfg, kw)
        u1 = power_usage(p.scaled(1.0, 0.0), cfg, kw)
        u2 = power_usage(p.scaled(0.0, 1.0), cfg, kw)
        c0 = np.array([u0.p1_used, u0.p2_used])
        m = np.array(
            [[u1.p1_used - c0[0], u2.p1_used - c0[0]], [u1.p2_used - c0[1], u2.p2_used - c0[1]]]
        )
        try:
            sq = np.linalg.solve(m, target - c0)
        except np.linalg.LinAlgError:
            sq = np.array([-1.0, -1.0])
        if np.all(sq > 0.0) and np.all(np.isfinite(sq)):
            return p.scaled(math.sqrt(sq[0]), math.sqrt(sq[1]))
        p = SchemeParams(p.eta, p.a1, p.a2, 0.5 * p.b1, 0.5 * p.b2)
    return SchemeParams(
        p.eta,
        p.a1 * math.sqrt(cfg.p1 / np.mean(p.a1**2)),
        p.a2 * math.sqrt(cfg.p2 / np.mean(p.a2**2)),
        np.zeros_like(p.b1),
        np.zeros_like(p.b2),
    )


class _Codec:
    """Flat vector <-> SchemeParams for the free entries."""

    def __init__(self, eta, with_b1):
        self.eta = eta
        self.with_b1 = with_b1
        self.tri = np.tril_indices(eta, -1)
        self.nt = len(self.tri[0])

    def encode(self, p):
        parts = [p.a1, p.a2]
        if self.with_b1:
            parts.append(p.b1[self.tri])
        parts.append(p.b2[self.tri])
        return np.concatenate(parts)

    def decode(self, x):
        eta, nt = self.eta, self.nt
        b1 = np.zeros((eta, eta))
        b2 = np.zeros((eta, eta))
        k = 2 * eta
        if self.with_b1:
            b1[self.tri] = x[k : k + nt]
            k += nt
        b2[self.tri] = x[k : k + nt]
        return SchemeParams(eta, x[:eta], x[eta : 2 * eta], b1, b2)


def _initial(eta, cfg, variant):
    if variant == Variant.PARTIAL:
        return partial_choice1_params(eta, cfg).params
    if variant == Variant.SI:
        return choice3_params_si(eta, cfg).params
    return choice1_params(eta, cfg).params


def _no_feedback_start(eta, cfg):
    alt = np.array([(-1.0) ** l for l in range(eta)])
    z = np.zeros((eta, eta))
    return SchemeParams(eta, math.sqrt(cfg.p1) * np.ones(eta), math.sqrt(cfg.p2) * alt, z, z)


class _Search:
    def __init__(self, cfg, sc, variant):
        self.cfg = cfg
        self.sc = sc
        self.variant = variant
        self.kw = kw_matrix(cfg)
        self.codec = _Codec(sc.eta, variant != Variant.PARTIAL)
        self.evals = 0
        self.best = None
        self.best_obj = -math.inf
        self.trace = []

    def score(self, params):
        try:
            t = rate_bounds(params, self.cfg, self.variant, self.kw)
        except (FbmacError, np.linalg.LinAlgError):
            return -math.inf
        return t.weighted(*self.sc.weights)

    def evaluate(self, x):
        """Project, score and log one candidate; returns ``(objective, projected vector)``."""
        p = project_powers(self.codec.decode(x), self.cfg, self.kw)
        obj = self.score(p)
        self.evals += 1
        if obj > self.best_obj:
            self.best_obj, self.best = obj, p
            self.trace.append((self.evals, obj))
        return obj, self.codec.encode(p)

    def left(self, stop):
        return self.evals < stop

    def refine(self, x, fx, stop):
        """Cyclic coordinate golden-section search within ``[x_i - h, x_i + h]``."""
        n = len(x)
        scale = np.maximum(np.abs(x), 0.05 * (np.max(np.abs(x)) or 1.0))
        h = 0.5 * scale
        while self.left(stop) and np.max(h) > 1e-9:
            improved = False
            for i in range(n):
                if not self.left(stop):
                    break
                x, fx, moved = self._line(x, fx, i, h[i], stop)
                improved |= moved
            if not improved:
                h = 0.5 * h
        return x, fx

    def _line(self, x, fx, i, h, stop):
        lo, hi = x[i] - h, x[i] + h
        c = hi - _GOLDEN * (hi - lo)
        d = lo + _GOLDEN * (hi - lo)
        best = (fx, x)

        def at(t):
            y = x.copy()
            y[i] = t
            return self.evaluate(y)

        if not self.left(stop):
            return x, fx, False
        fc, xc = at(c)
        if fc > best[0]:
            best = (fc, xc)
        if not self.left(stop):
            return best[1], best[0], best[0] > fx
        fd, xd = at(d)
        if fd > best[0]:
            best = (fd, xd)
        for _ in range(6):
            if not self.left(stop):
                break
            if fc >= fd:
                hi, d, fd = d, c, fc
                c = hi - _GOLDEN * (hi - lo)
                fc, xc = at(c)
                cand = (fc, xc)
            else:
                lo, c, fc = c, d, fd
                d = lo + _GOLDEN * (hi - lo)
                fd, xd = at(d)
                cand = (fd, xd)
            if cand[0] > best[0]:
                best = cand
        return best[1], best[0], best[0] > fx


def optimize(cfg, sc, variant=None):
    """Multistart coordinate search; deterministic for a given :class:`SearchConfig`.

    Restart 0 starts from the matching preset, restart 1 from a no-feedback
    point (``B = 0``), later restarts from the preset with Gaussian
    perturbations of 10% of each entry's magnitude drawn from a Philox stream
    keyed by ``(seed, restart)``. Restarts run in index order and share one
    evaluation counter, so ties keep the earliest restart.
    """
    variant = Variant.for_model(cfg.model) if variant is None else Variant(variant)
    s = _Search(cfg, sc, variant)
    base = _initial(sc.eta, cfg, variant)
    x0 = s.codec.encode(base)
    shares = [sc.budget // sc.restarts] * sc.restarts
    shares[0] += sc.budget - sum(shares)
    stop = 0
    for r, share in enumerate(shares):
        stop += share
        if r == 0:
            x = x0
        elif r == 1:
            x = s.codec.encode(_no_feedback_start(sc.eta, cfg))
        else:
            rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([sc.seed, r])))
            mag = np.maximum(np.abs(x0), 0.1 * np.sqrt(np.mean(x0 * x0)))
            x = x0 + _PERTURB * mag * rng.standard_normal(len(x0))
        fx, x = s.evaluate(x)
        if s.left(stop):
            s.refine(x, fx, stop)
    best = s.best if s.best is not None else project_powers(base, cfg, s.kw)
    return SearchResult(best, s.best_obj, s.trace, s.evals)
