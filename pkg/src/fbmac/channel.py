"""Channel and feedback-model configuration."""

import json
import math
from dataclasses import asdict, dataclass, field, replace
from enum import Enum

import numpy as np

__all__ = ["ChannelConfig", "FeedbackCov", "FeedbackModel", "kw_matrix", "validate"]


class FeedbackModel(str, Enum):
    NO_FEEDBACK = "no_fb"
    PERFECT = "perfect_fb"
    NOISY = "noisy_fb"
    NOISY_PARTIAL = "noisy_partial_fb"
    PERFECT_PARTIAL = "perfect_partial_fb"
    NOISY_RX_SI = "noisy_fb_rx_si"

    @property
    def is_partial(self):
        return self in (FeedbackModel.NOISY_PARTIAL, FeedbackModel.PERFECT_PARTIAL)


@dataclass(frozen=True)
class FeedbackCov:
    """Feedback-noise covariance ``[[s1, c sqrt(s1 s2)], [c sqrt(s1 s2), s2]]``."""

    sigma1_sq: float = 0.0
    sigma2_sq: float = 0.0
    corr: float = 0.0

    @classmethod
    def isotropic(cls, sigma_sq, corr=0.0):
        return cls(sigma_sq, sigma_sq, corr)

    @classmethod
    def from_matrix(cls, k):
        k = np.asarray(k, dtype=float)
        s1, s2 = float(k[0, 0]), float(k[1, 1])
        denom = math.sqrt(s1 * s2)
        corr = float(k[0, 1]) / denom if denom > 0 else 0.0
        return cls(s1, s2, corr)

    def matrix(self):
        off = self.corr * math.sqrt(max(self.sigma1_sq, 0.0) * max(self.sigma2_sq, 0.0))
        return np.array([[self.sigma1_sq, off], [off, self.sigma2_sq]])

    @property
    def is_zero(self):
        return self.sigma1_sq == 0.0 and self.sigma2_sq == 0.0


@dataclass(frozen=True)
class ChannelConfig:
    """Powers ``p1, p2``, forward noise variance ``n0`` and the feedback model.

    Partial feedback always goes to transmitter 2; use :meth:`swapped` for the
    mirrored case.
    """

    p1: float
    p2: float
    n0: float
    kw: FeedbackCov = field(default_factory=FeedbackCov)
    model: FeedbackModel = FeedbackModel.NOISY

    def __post_init__(self):
        if not isinstance(self.model, FeedbackModel):
            object.__setattr__(self, "model", FeedbackModel(self.model))

    @classmethod
    def symmetric(cls, p, n0, sigma_sq=0.0, corr=0.0, model=FeedbackModel.NOISY):
        return cls(p, p, n0, FeedbackCov(sigma_sq, sigma_sq, corr), model)

    def with_(self, **changes):
        return replace(self, **changes)

    def with_kw(self, sigma1_sq, sigma2_sq, corr=0.0):
        return replace(self, kw=FeedbackCov(sigma1_sq, sigma2_sq, corr))

    def swapped(self):
        kw = FeedbackCov(self.kw.sigma2_sq, self.kw.sigma1_sq, self.kw.corr)
        return replace(self, p1=self.p2, p2=self.p1, kw=kw)

    def validate(self):
        return validate(self)

    def to_dict(self):
        d = asdict(self)
        d["model"] = self.model.value
        return d

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d):
        kw = d.get("kw") or {}
        return cls(
            p1=float(d["p1"]),
            p2=float(d["p2"]),
            n0=float(d["n0"]),
            kw=FeedbackCov(
                float(kw.get("sigma1_sq", 0.0)),
                float(kw.get("sigma2_sq", 0.0)),
                float(kw.get("corr", 0.0)),
            ),
            model=FeedbackModel(d.get("model", FeedbackModel.NOISY.value)),
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def validate(cfg):
    """Return a list of violation tags; an empty list means the config is valid."""
    out = []
    values = (cfg.p1, cfg.p2, cfg.n0, cfg.kw.sigma1_sq, cfg.kw.sigma2_sq, cfg.kw.corr)
    if not all(isinstance(v, (int, float)) and math.isfinite(v) for v in values):
        return ["NonFiniteValue"]
    if cfg.p1 <= 0:
        out.append("NonPositivePower1")
    if cfg.p2 <= 0:
        out.append("NonPositivePower2")
    if cfg.n0 <= 0:
        out.append("NonPositiveNoise")
    if cfg.kw.sigma1_sq < 0 or cfg.kw.sigma2_sq < 0:
        out.append("NegativeFeedbackVariance")
    if not -1.0 <= cfg.kw.corr <= 1.0:
        out.append("CorrOutOfRange")
    if cfg.model == FeedbackModel.PERFECT and not cfg.kw.is_zero:
        out.append("NonzeroNoiseForPerfectFB")
    if cfg.model == FeedbackModel.PERFECT_PARTIAL and cfg.kw.sigma2_sq != 0.0:
        out.append("NonzeroNoiseForPerfectPartialFB")
    return out


def kw_matrix(cfg):
    """Effective feedback-noise covariance for the configured model.

    Entries that the model ignores (e.g. ``sigma1_sq`` under partial
    feedback, everything under perfect or no feedback) are zeroed.
    """
    m = cfg.model
    if m in (FeedbackModel.NO_FEEDBACK, FeedbackModel.PERFECT, FeedbackModel.PERFECT_PARTIAL):
        return np.zeros((2, 2))
    if m == FeedbackModel.NOISY_PARTIAL:
        return np.array([[0.0, 0.0], [0.0, cfg.kw.sigma2_sq]])
    return cfg.kw.matrix()
