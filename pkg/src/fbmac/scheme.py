"""Rates and powers of the concatenated linear-feedback scheme.

Each outer-code symbol pair ``(Xi1, Xi2)`` is sent over ``eta`` channel
uses. Transmitter ``nu`` sends ``X_nu = a_nu Xi_nu + B_nu V_nu`` where
``V_nu = Y + W_nu`` is its (noisy) feedback and ``B_nu`` is strictly lower
triangular. The receiver forms ``C (I - B1 - B2) Y``, which equals
``C (Ab xi + B1 W1 + B2 W2 + Z)``, and the outer code sees a memoryless
two-input channel whose mutual informations, divided by ``eta``, bound the
rates.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .channel import ChannelConfig, FeedbackModel, kw_matrix
from .classic import RateTriple
from .errors import DegenerateNoiseCov, DimensionMismatch, InvalidParams, NotPositiveDefinite
from .linalg import build_block_matrices, log_det_ratio

__all__ = [
    "DEFAULT_ETA_CAP",
    "PowerUsage",
    "SchemeParams",
    "Variant",
    "lmmse_matrix",
    "noise_cov",
    "power_usage",
    "rate_bounds",
    "rate_bounds_noisy",
    "rate_bounds_partial",
    "rate_bounds_si",
    "simple_scheme_params",
    "simple_scheme_rates",
]

DEFAULT_ETA_CAP = 64
_RANK_TOL = 1e-10


class Variant(str, Enum):
    NOISY = "noisy"
    PARTIAL = "partial"
    SI = "si"

    @classmethod
    def for_model(cls, model):
        model = FeedbackModel(model)
        if model.is_partial:
            return cls.PARTIAL
        if model == FeedbackModel.NOISY_RX_SI:
            return cls.SI
        return cls.NOISY


@dataclass(frozen=True, eq=False)
class SchemeParams:
    """Inner encoder and decoder parameters.

    ``c=None`` means the LMMSE decoder for whichever feedback variant the
    parameters are evaluated under.
    """

    eta: int
    a1: np.ndarray
    a2: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    c: np.ndarray | None = field(default=None)

    def __post_init__(self):
        eta = int(self.eta)
        if eta < 1:
            raise InvalidParams(f"eta must be positive, got {eta}")
        object.__setattr__(self, "eta", eta)
        for name in ("a1", "a2"):
            v = np.array(getattr(self, name), dtype=float).reshape(-1)
            if v.size != eta:
                raise DimensionMismatch(f"{name} has length {v.size}, expected {eta}")
            object.__setattr__(self, name, v)
        if eta > DEFAULT_ETA_CAP:
            raise InvalidParams(f"eta={eta} exceeds the cap of {DEFAULT_ETA_CAP}")
        for name in ("b1", "b2"):
            m = np.array(getattr(self, name), dtype=float)
            if m.size != eta * eta:
                raise DimensionMismatch(f"{name} must be {eta}x{eta}, got shape {m.shape}")
            m = m.reshape(eta, eta)
            if np.any(np.triu(m) != 0.0):
                raise InvalidParams(f"{name} must be strictly lower triangular (causal feedback)")
            object.__setattr__(self, name, m)
        if self.c is not None:
            c = np.atleast_2d(np.array(self.c, dtype=float))
            if c.shape[1] != eta or c.shape[0] not in (1, 2):
                raise DimensionMismatch(f"c must be 2x{eta}, got {c.shape}")
            object.__setattr__(self, "c", c)
        for name in ("a1", "a2", "b1", "b2"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise InvalidParams(f"{name} has non-finite entries")

    @classmethod
    def zeros(cls, eta):
        return cls(eta, np.zeros(eta), np.zeros(eta), np.zeros((eta, eta)), np.zeros((eta, eta)))

    @classmethod
    def partial(cls, eta, a1, a2, b2, c=None):
        """Parameters for feedback to transmitter 2 only (``B1 = 0``)."""
        return cls(eta, a1, a2, np.zeros((eta, eta)), b2, c)

    def blocks(self):
        return build_block_matrices(self.a1, self.a2, self.b1, self.b2)

    def with_c(self, c):
        return SchemeParams(self.eta, self.a1, self.a2, self.b1, self.b2, c)

    def scaled(self, s1, s2):
        """Scale transmitter 1's ``a1`` by ``s1`` and transmitter 2's ``a2`` by ``s2``."""
        return SchemeParams(self.eta, s1 * self.a1, s2 * self.a2, self.b1, self.b2, self.c)

    def to_dict(self):
        return {
            "eta": self.eta,
            "a1": self.a1.tolist(),
            "a2": self.a2.tolist(),
            "b1": self.b1.tolist(),
            "b2": self.b2.tolist(),
            "c": "lmmse" if self.c is None else self.c.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        c = d.get("c", "lmmse")
        return cls(
            int(d["eta"]),
            d["a1"],
            d["a2"],
            d["b1"],
            d["b2"],
            None if isinstance(c, str) else c,
        )

    def __eq__(self, other):
        if not isinstance(other, SchemeParams):
            return NotImplemented
        same_c = (self.c is None and other.c is None) or (
            self.c is not None and other.c is not None and np.array_equal(self.c, other.c)
        )
        return (
            self.eta == other.eta
            and same_c
            and all(
                np.array_equal(getattr(self, n), getattr(other, n)) for n in ("a1", "a2", "b1", "b2")
            )
        )

    __hash__ = None


@dataclass(frozen=True)
class PowerUsage:
    p1_used: float
    p2_used: float
    feasible: bool


def input_cov(params, cfg, kw=None):
    """Covariance of the stacked inputs ``[X1; X2]`` (size ``2 eta``)."""
    kw = kw_matrix(cfg) if kw is None else np.asarray(kw, dtype=float)
    bl = params.blocks()
    eta = params.eta
    t = np.linalg.inv(np.eye(2 * eta) - bl.bbb)
    inner = bl.ad @ bl.ad.T + cfg.n0 * (bl.bt @ bl.bt.T) + bl.bd @ np.kron(kw, np.eye(eta)) @ bl.bd.T
    return t @ inner @ t.T


def power_usage(params, cfg, kw=None, tol=None):
    """Average per-use power of each transmitter."""
    eta = params.eta
    cov = input_cov(params, cfg, kw)
    d = np.diag(cov)
    p1 = float(np.sum(d[:eta]) / eta)
    p2 = float(np.sum(d[eta:]) / eta)
    tol = 1e-9 * max(cfg.p1, cfg.p2) if tol is None else tol
    return PowerUsage(p1, p2, p1 <= cfg.p1 + tol and p2 <= cfg.p2 + tol)


def noise_cov(params, cfg, variant=Variant.NOISY, kw=None):
    """Covariance of the effective noise ``B1 W1 + B2 W2 + Z`` seen by the decoder.

    The terms are summed in a fixed order so that ``B1 = 0`` reproduces the
    partial-feedback expression bit for bit.
    """
    eta = params.eta
    n0 = cfg.n0
    s = n0 * np.eye(eta)
    variant = Variant(variant)
    if variant == Variant.SI:
        return s
    k = kw_matrix(cfg) if kw is None else np.asarray(kw, dtype=float)
    b1, b2 = params.b1, params.b2
    if variant == Variant.PARTIAL:
        return s + k[1, 1] * (b2 @ b2.T)
    return s + k[0, 0] * (b1 @ b1.T) + k[1, 1] * (b2 @ b2.T) + k[0, 1] * (b1 @ b2.T + b2 @ b1.T)


def lmmse_matrix(params, cfg, variant=Variant.NOISY, kw=None):
    """Decoder matrix that makes ``C (I - B1 - B2) Y`` the conditional mean of ``(Xi1, Xi2)``."""
    ab = params.blocks().ab
    s = noise_cov(params, cfg, variant, kw)
    m = ab @ ab.T + s
    return np.linalg.solve(m, ab).T


def _effective_decoder(c):
    """Apply the rank rule: full-rank C as is, rank one C by its larger row, zero C as None."""
    g = c @ c.T
    sv = np.linalg.svd(g, compute_uv=False)
    if sv[0] == 0.0:
        return None
    if c.shape[0] == 2 and sv[-1] < _RANK_TOL * sv[0]:
        norms = np.linalg.norm(c, axis=1)
        return c[[1 if norms[1] > norms[0] else 0]]
    return c


def _rates_from(params, c, s):
    c = _effective_decoder(c)
    if c is None:
        return RateTriple(0.0, 0.0, 0.0)
    a1, a2 = params.a1, params.a2
    ab = np.column_stack([a1, a2])
    den = c @ s @ c.T
    k = 1.0 / (2.0 * params.eta)
    try:
        r1 = k * log_det_ratio(c @ (np.outer(a1, a1) + s) @ c.T, den)
        r2 = k * log_det_ratio(c @ (np.outer(a2, a2) + s) @ c.T, den)
        rs = k * log_det_ratio(c @ (ab @ ab.T + s) @ c.T, den)
    except NotPositiveDefinite as exc:
        raise DegenerateNoiseCov(str(exc)) from exc
    return RateTriple(max(r1, 0.0), max(r2, 0.0), max(rs, 0.0))


def rate_bounds(params, cfg, variant=None, kw=None):
    """Rate triple for the given feedback variant (inferred from ``cfg.model`` if omitted)."""
    variant = Variant.for_model(cfg.model) if variant is None else Variant(variant)
    s = noise_cov(params, cfg, variant, kw)
    c = params.c
    if c is None:
        ab = params.blocks().ab
        c = np.linalg.solve(ab @ ab.T + s, ab).T
    if variant == Variant.SI:
        s = cfg.n0 * np.eye(params.eta)
    return _rates_from(params, c, s)


def rate_bounds_noisy(params, cfg, kw=None):
    return rate_bounds(params, cfg, Variant.NOISY, kw)


def rate_bounds_partial(params, cfg, kw=None):
    if np.any(params.b1 != 0.0):
        raise InvalidParams("partial feedback requires B1 = 0")
    return rate_bounds(params, cfg, Variant.PARTIAL, kw)


def rate_bounds_si(params, cfg, kw=None):
    """Rates when the receiver knows the feedback-noise realizations.

    Feedback noise drops out of the rates but still costs power; see
    :func:`power_usage`.
    """
    return rate_bounds(params, cfg, Variant.SI, kw)


def simple_scheme_params(a11, a12, a21, a22, b1, b2):
    """The two-use scheme as concatenated-scheme parameters.

    The second input subtracts ``b_nu`` times the first feedback output, so
    the lower-left entries of ``B_nu`` are ``-b_nu``.
    """
    return SchemeParams(
        2,
        [a11, a12],
        [a21, a22],
        [[0.0, 0.0], [-b1, 0.0]],
        [[0.0, 0.0], [-b2, 0.0]],
        np.eye(2),
    )


def simple_scheme_rates(a11, a12, a21, a22, b1, b2, cfg):
    """Closed-form rates and powers of the two-use scheme."""
    n0 = cfg.n0
    k = kw_matrix(cfg)
    d = b1 * b1 * k[0, 0] + b2 * b2 * k[1, 1] + 2.0 * b1 * b2 * k[0, 1] + n0
    r1 = 0.25 * math.log1p(a11 * a11 / n0 + a12 * a12 / d)
    r2 = 0.25 * math.log1p(a21 * a21 / n0 + a22 * a22 / d)
    cross = (a11 * a22 - a21 * a12) ** 2 / (n0 * d)
    rs = 0.25 * math.log1p((a11 * a11 + a21 * a21) / n0 + (a12 * a12 + a22 * a22) / d + cross)
    p1 = a11 * a11 + (a12 - b1 * a11) ** 2 + b1 * b1 * (a21 * a21 + n0 + k[0, 0])
    p2 = a21 * a21 + (a22 - b2 * a21) ** 2 + b2 * b2 * (a11 * a11 + n0 + k[1, 1])
    tol = 1e-9 * max(cfg.p1, cfg.p2)
    usage = PowerUsage(p1 / 2.0, p2 / 2.0, p1 / 2.0 <= cfg.p1 + tol and p2 / 2.0 <= cfg.p2 + tol)
    return RateTriple(r1, r2, rs), usage
