"""Exact joint covariance of the inner loop and a reproducible Monte-Carlo sampler."""

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from . import kernels
from .channel import kw_matrix
from .classic import RateTriple
from .errors import InvalidParams
from .innovation import linear_system
from .linalg import log_det
from .scheme import Variant, lmmse_matrix

__all__ = [
    "JointCov",
    "McReport",
    "RNG_ALGORITHM",
    "analytic_joint_cov",
    "joint_labels",
    "mc_sample",
    "mutual_information",
]

RNG_ALGORITHM = "Philox4x64-10"
MIN_SAMPLES = 1000


def joint_labels(eta):
    return (
        ["Xi1", "Xi2"]
        + [f"Y{l}" for l in range(1, eta + 1)]
        + [f"V1_{l}" for l in range(1, eta + 1)]
        + [f"V2_{l}" for l in range(1, eta + 1)]
        + ["Xihat1", "Xihat2"]
    )


@dataclass(frozen=True)
class JointCov:
    """Covariance over :func:`joint_labels`; ``input_power`` is ``(2, eta)`` per-use ``E X_nu^2``."""

    labels: list
    cov: np.ndarray
    input_power: np.ndarray

    def index(self, label):
        return self.labels.index(label)

    def block(self, rows, cols=None):
        cols = rows if cols is None else cols
        ri = [self.index(r) for r in rows]
        ci = [self.index(c) for c in cols]
        return self.cov[np.ix_(ri, ci)]


def _variant_kw(cfg, variant, kw):
    kw = kw_matrix(cfg) if kw is None else np.asarray(kw, dtype=float)
    if variant == Variant.PARTIAL:
        kw = np.array([[0.0, 0.0], [0.0, kw[1, 1]]])
    return kw


def _decoder(params, cfg, variant, kw):
    c = lmmse_matrix(params, cfg, variant, kw) if params.c is None else params.c
    if c.shape[0] == 1:
        c = np.vstack([c, np.zeros_like(c)])
    return c


def analytic_joint_cov(params, cfg, variant=None, kw=None):
    """Covariance of every loop signal, each written as a linear map of the primitives.

    The decoder input is ``(I - B1 - B2) Y``; with receiver side information
    the known feedback-noise terms ``B1 W1 + B2 W2`` are removed first.
    """
    variant = Variant.for_model(cfg.model) if variant is None else Variant(variant)
    kw = _variant_kw(cfg, variant, kw)
    ls = linear_system(params, cfg, kw)
    eta = params.eta
    clean = (np.eye(eta) - params.b1 - params.b2) @ ls.y
    if variant == Variant.SI:
        clean = clean - params.b1 @ ls.w1 - params.b2 @ ls.w2
    xhat = _decoder(params, cfg, variant, kw) @ clean
    rows = np.vstack([ls.xi, ls.y, ls.v1, ls.v2, xhat])
    cov = ls.cov(rows, rows)
    cov = 0.5 * (cov + cov.T)
    power = np.vstack(
        [np.diag(ls.cov(ls.x1, ls.x1)), np.diag(ls.cov(ls.x2, ls.x2))]
    )
    return JointCov(joint_labels(eta), cov, power)


def _cond_logdet(jc, target, given):
    k = jc.block(target)
    if given:
        g = jc.block(given)
        cross = jc.block(target, given)
        k = k - cross @ np.linalg.solve(g, cross.T)
    return log_det(0.5 * (k + k.T))


def mutual_information(jc, eta):
    """Per-use ``I(Xi1; Xihat | Xi2)``, ``I(Xi2; Xihat | Xi1)`` and ``I(Xi1, Xi2; Xihat)``.

    Computed from Schur complements of the joint covariance.
    """
    xh = ["Xihat1", "Xihat2"]
    k = jc.block(xh)
    ev = np.linalg.eigvalsh(k)
    if ev[-1] <= 0.0:
        return RateTriple(0.0, 0.0, 0.0)
    if ev[0] < 1e-10 * ev[-1]:
        # collinear outputs carry one statistic; keep the stronger one
        xh = [xh[int(k[1, 1] > k[0, 0])]]
    h_noise = _cond_logdet(jc, xh, ["Xi1", "Xi2"])
    r1 = _cond_logdet(jc, xh, ["Xi2"]) - h_noise
    r2 = _cond_logdet(jc, xh, ["Xi1"]) - h_noise
    rs = _cond_logdet(jc, xh, []) - h_noise
    k = 1.0 / (2.0 * eta)
    return RateTriple(k * r1, k * r2, k * rs)


@dataclass(frozen=True)
class McReport:
    n_samples: int
    seed: int
    labels: list
    empirical_cov: np.ndarray
    per_symbol_power: np.ndarray
    std_errors: np.ndarray
    rng: str = RNG_ALGORITHM
    partitions: int = 1
    backend: str = ""


def _gaussians(seed, partition, shape):
    """Standard normals from a Philox stream keyed by ``(seed, partition)``.

    Uniforms are mid-point 53-bit grid values, so the inverse CDF never sees 0 or 1.
    """
    bitgen = np.random.Philox(np.random.SeedSequence([seed, partition]))
    k = np.random.Generator(bitgen).integers(0, 1 << 53, size=shape, dtype=np.int64)
    return ndtri((k + 0.5) * (1.0 / (1 << 53)))


def _psd_sqrt(k):
    w, v = np.linalg.eigh(k)
    return v * np.sqrt(np.clip(w, 0.0, None))


def _partition_sizes(n, parts):
    base, extra = divmod(n, parts)
    return [base + (1 if p < extra else 0) for p in range(parts)]


def mc_sample(params, cfg, n_samples, seed, variant=None, kw=None, partitions=4):
    """Sample the loop ``n_samples`` times and report second moments.

    The signals are zero mean, so ``empirical_cov`` is the raw second
    moment. ``std_errors[i, j]`` is the sample deviation of ``s_i s_j``
    divided by ``sqrt(n)``. Each partition draws from its own stream keyed by
    ``(seed, partition)`` and the partial sums are added in partition order.
    """
    if n_samples < MIN_SAMPLES:
        raise InvalidParams(f"n_samples must be at least {MIN_SAMPLES}")
    if partitions < 1:
        raise InvalidParams("partitions must be positive")
    variant = Variant.for_model(cfg.model) if variant is None else Variant(variant)
    kw = _variant_kw(cfg, variant, kw)
    eta = params.eta
    c = _decoder(params, cfg, variant, kw)
    ldiff = np.eye(eta) - params.b1 - params.b2
    kw_root = _psd_sqrt(kw)
    sqrt_n = np.sqrt(cfg.n0)
    a1 = np.ascontiguousarray(params.a1, dtype=float)
    a2 = np.ascontiguousarray(params.a2, dtype=float)
    b1 = np.ascontiguousarray(params.b1, dtype=float)
    b2 = np.ascontiguousarray(params.b2, dtype=float)

    d = 4 + 3 * eta
    m1 = np.zeros((d, d))
    m2 = np.zeros((d, d))
    pw = np.zeros((2, eta))
    for p, m in enumerate(_partition_sizes(n_samples, partitions)):
        if m == 0:
            continue
        g = _gaussians(seed, p, (m, 2 + 3 * eta))
        xi = np.ascontiguousarray(g[:, :2])
        z = np.ascontiguousarray(sqrt_n * g[:, 2 : 2 + eta])
        wpair = np.stack([g[:, 2 + eta : 2 + 2 * eta], g[:, 2 + 2 * eta :]], axis=-1) @ kw_root.T
        w1 = np.ascontiguousarray(wpair[..., 0])
        w2 = np.ascontiguousarray(wpair[..., 1])
        x1, x2, y = kernels.feedback_loop(xi, z, w1, w2, a1, a2, b1, b2)
        clean = y @ ldiff.T
        if variant == Variant.SI:
            clean = clean - w1 @ b1.T - w2 @ b2.T
        s = np.hstack([xi, y, y + w1, y + w2, clean @ c.T])
        m1 += s.T @ s
        sq = s * s
        m2 += sq.T @ sq
        pw[0] += np.sum(x1 * x1, axis=0)
        pw[1] += np.sum(x2 * x2, axis=0)
    n = float(n_samples)
    mean = m1 / n
    var = np.clip(m2 / n - mean * mean, 0.0, None)
    return McReport(
        n_samples=int(n_samples),
        seed=int(seed),
        labels=joint_labels(eta),
        empirical_cov=mean,
        per_symbol_power=pw / n,
        std_errors=np.sqrt(var / n),
        partitions=partitions,
        backend=kernels.BACKEND,
    )
