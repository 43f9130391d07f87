"""Per-step (innovation) form of the scheme's rates.

Every signal in the inner loop is a linear map of the primitive Gaussians
``u = (Xi1, Xi2, Z_1..Z_eta, W1_1..W1_eta, W2_1..W2_eta)``. Rows of the
matrices below are those maps, so covariances are ``r Sigma_u s^T`` and
conditioning is a projection in that inner product.

At step ``l`` the receiver's innovation decomposes as
``I_l = k1 E1 + k2 E2 + W_perp + Z_l`` with ``E_nu`` the estimation error of
``Xi_nu`` given the past. Each step adds ``0.5 log(1 + signal / (Var W_perp + N))``
to the mutual information, and the totals divided by ``eta`` are the rates.
"""

import math
from dataclasses import dataclass

import numpy as np

from .channel import kw_matrix
from .classic import RateTriple
from .errors import DegenerateConditioning
from .scheme import Variant

__all__ = ["LinearSystem", "RecursionState", "innovation_rates", "linear_system"]


@dataclass(frozen=True)
class LinearSystem:
    """Linear maps from the primitives to every signal in the loop.

    Each attribute is an ``(eta, dim)`` array whose row ``l`` maps ``u`` to
    the signal at use ``l``.
    """

    x1: np.ndarray
    x2: np.ndarray
    y: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    w1: np.ndarray
    w2: np.ndarray
    xi: np.ndarray
    z: np.ndarray
    sigma_u: np.ndarray

    def cov(self, r, s):
        return r @ self.sigma_u @ s.T


def primitive_cov(eta, n0, kw):
    kw = np.asarray(kw, dtype=float)
    d = 2 + 3 * eta
    s = np.zeros((d, d))
    s[0, 0] = s[1, 1] = 1.0
    s[2 : 2 + eta, 2 : 2 + eta] = n0 * np.eye(eta)
    s[2 + eta :, 2 + eta :] = np.kron(kw, np.eye(eta))
    return s


def linear_system(params, cfg, kw=None):
    eta = params.eta
    kw = kw_matrix(cfg) if kw is None else np.asarray(kw, dtype=float)
    d = 2 + 3 * eta
    eye = np.eye(d)
    xi = eye[0:2]
    z = eye[2 : 2 + eta]
    w1 = eye[2 + eta : 2 + 2 * eta]
    w2 = eye[2 + 2 * eta :]
    x1 = np.zeros((eta, d))
    x2 = np.zeros((eta, d))
    y = np.zeros((eta, d))
    v1 = np.zeros((eta, d))
    v2 = np.zeros((eta, d))
    for l in range(eta):
        x1[l] = params.a1[l] * xi[0] + params.b1[l, :l] @ v1[:l]
        x2[l] = params.a2[l] * xi[1] + params.b2[l, :l] @ v2[:l]
        y[l] = x1[l] + x2[l] + z[l]
        v1[l] = y[l] + w1[l]
        v2[l] = y[l] + w2[l]
    return LinearSystem(x1, x2, y, v1, v2, w1, w2, xi, z, primitive_cov(eta, cfg.n0, kw))


@dataclass(frozen=True)
class RecursionState:
    """Per-step quantities; index ``l`` holds the values that drive use ``l + 1``."""

    alpha1: list
    alpha2: list
    rho: list
    kappa1: list
    kappa2: list
    var_w_perp: list


def _residualize(ls, rows, given):
    """Rows minus their projection onto the span of ``given`` (no-op if empty)."""
    if given.shape[0] == 0:
        return rows
    g = ls.cov(given, given)
    cross = ls.cov(rows, given)
    # pinv drops zero-variance conditioning directions (e.g. absent feedback noise)
    coef = cross @ np.linalg.pinv(g, rcond=1e-13, hermitian=True)
    return rows - coef @ given


def innovation_rates(params, cfg, variant=None, kw=None, tol=1e-12):
    """Rate triple of the scheme with LMMSE decoding, built step by step.

    Returns
    -------
    triple : RateTriple
    state : RecursionState
    """
    variant = Variant.for_model(cfg.model) if variant is None else Variant(variant)
    kw = kw_matrix(cfg) if kw is None else np.asarray(kw, dtype=float)
    if variant == Variant.PARTIAL:
        kw = np.array([[0.0, 0.0], [0.0, kw[1, 1]]])
    ls = linear_system(params, cfg, kw)
    eta, n0 = params.eta, cfg.n0
    sums = np.zeros(3)
    st = {k: [] for k in ("alpha1", "alpha2", "rho", "kappa1", "kappa2", "var_w_perp")}
    for l in range(eta):
        given = ls.y[:l]
        if variant == Variant.SI:
            given = np.vstack([given, ls.w1[:l], ls.w2[:l]])
        e = _residualize(ls, ls.xi, given)
        innov = _residualize(ls, ls.y[l : l + 1], given)[0]
        ke = ls.cov(e, e)
        a1, a2 = ke[0, 0], ke[1, 1]
        rho = ke[0, 1] / math.sqrt(a1 * a2) if a1 > 0 and a2 > 0 else 0.0
        if a1 <= 0 or a2 <= 0 or 1.0 - rho * rho < tol:
            raise DegenerateConditioning(
                f"estimation-error covariance is singular at use {l + 1} "
                f"(alpha=({a1:.3e}, {a2:.3e}), rho={rho:.15f})"
            )
        noisefree = innov - ls.z[l]
        kappa = np.linalg.solve(ke, ls.cov(e, noisefree[None, :])[:, 0])
        w_perp = noisefree - kappa @ e
        vw = max(float(ls.cov(w_perp[None, :], w_perp[None, :])[0, 0]), 0.0)
        k1, k2 = kappa
        den = vw + n0
        q = 1.0 - rho * rho
        sums += 0.5 * np.log1p(
            [
                k1 * k1 * a1 * q / den,
                k2 * k2 * a2 * q / den,
                (k1 * k1 * a1 + k2 * k2 * a2 + 2.0 * k1 * k2 * math.sqrt(a1 * a2) * rho) / den,
            ]
        )
        for key, val in zip(st, (a1, a2, rho, k1, k2, vw)):
            st[key].append(float(val))
    r = sums / eta
    return RateTriple(float(r[0]), float(r[1]), float(r[2])), RecursionState(**st)
