"""Dense matrix helpers shared by the rate and power formulas.

All logarithms are natural; conversion to bits happens only when results
are printed.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NotPositiveDefinite

__all__ = [
    "BlockMatrices",
    "PsdCheckReport",
    "build_block_matrices",
    "kron",
    "log_det",
    "log_det_ratio",
    "loewner_geq",
    "psd_check",
]


def _as_matrix(a, name):
    m = np.atleast_2d(np.asarray(a, dtype=float))
    if m.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def kron(a, b):
    """Kronecker product of two finite matrices."""
    return np.kron(_as_matrix(a, "A"), _as_matrix(b, "B"))


@dataclass(frozen=True)
class BlockMatrices:
    """Stacked forms of the inner-encoder parameters.

    Attributes
    ----------
    ab : ndarray, shape (eta, 2)
        ``[a1 | a2]``.
    ad : ndarray, shape (2 eta, 2)
        ``blockdiag(a1, a2)``.
    bb : ndarray, shape (eta, 2 eta)
        ``[B1 | B2]``.
    bt : ndarray, shape (2 eta, eta)
        ``[B1; B2]``.
    bd : ndarray, shape (2 eta, 2 eta)
        ``blockdiag(B1, B2)``.
    bbb : ndarray, shape (2 eta, 2 eta)
        ``[[B1, B1], [B2, B2]]``.
    """

    ab: np.ndarray
    ad: np.ndarray
    bb: np.ndarray
    bt: np.ndarray
    bd: np.ndarray
    bbb: np.ndarray

    @property
    def eta(self):
        return self.ab.shape[0]


def build_block_matrices(a1, a2, b1, b2):
    a1 = np.asarray(a1, dtype=float).reshape(-1)
    a2 = np.asarray(a2, dtype=float).reshape(-1)
    eta = a1.size
    if a2.size != eta:
        raise DimensionMismatch(f"a1 has length {eta} but a2 has length {a2.size}")
    b1 = np.asarray(b1, dtype=float)
    b2 = np.asarray(b2, dtype=float)
    for name, m in (("B1", b1), ("B2", b2)):
        if m.shape != (eta, eta):
            raise DimensionMismatch(f"{name} must be {eta}x{eta}, got {m.shape}")
    z = np.zeros(eta)
    zz = np.zeros((eta, eta))
    return BlockMatrices(
        ab=np.column_stack([a1, a2]),
        ad=np.column_stack([np.concatenate([a1, z]), np.concatenate([z, a2])]),
        bb=np.hstack([b1, b2]),
        bt=np.vstack([b1, b2]),
        bd=np.block([[b1, zz], [zz, b2]]),
        bbb=np.block([[b1, b1], [b2, b2]]),
    )


def log_det(m):
    """Log-determinant of a symmetric positive-definite matrix.

    Tries Cholesky first and falls back to a pivoted LDL^T factorization,
    which tolerates the rounding that makes nearly singular SPD matrices
    fail Cholesky.
    """
    m = _as_matrix(m, "M")
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"matrix must be square, got {m.shape}")
    if m.shape[0] == 0:
        return 0.0
    m = 0.5 * (m + m.T)
    try:
        c = np.linalg.cholesky(m)
        return 2.0 * float(np.sum(np.log(np.diag(c))))
    except np.linalg.LinAlgError:
        pass
    _, d, _ = scipy.linalg.ldl(m)
    # d is block diagonal with 1x1 and 2x2 blocks; its eigenvalues carry the sign
    eig = np.linalg.eigvalsh(d)
    if np.any(eig <= 0.0):
        raise NotPositiveDefinite(
            f"matrix is not positive definite (min pivot eigenvalue {eig.min():.3e})"
        )
    return float(np.sum(np.log(eig)))


def log_det_ratio(m1, m2):
    """Return ``log|M1| - log|M2|`` without forming either determinant."""
    m1 = _as_matrix(m1, "M1")
    m2 = _as_matrix(m2, "M2")
    if m1.shape != m2.shape:
        raise DimensionMismatch(f"shapes differ: {m1.shape} vs {m2.shape}")
    return log_det(m1) - log_det(m2)


@dataclass(frozen=True)
class PsdCheckReport:
    is_psd: bool
    min_eigenvalue: float
    tolerance_used: float


def _default_tol(*mats):
    scale = max((float(np.max(np.abs(np.diag(m)), initial=0.0)) for m in mats), default=0.0)
    return 1e-9 * scale


def psd_check(k, tol=None):
    k = _as_matrix(k, "K")
    if k.shape[0] != k.shape[1]:
        raise DimensionMismatch(f"matrix must be square, got {k.shape}")
    tol = _default_tol(k) if tol is None else float(tol)
    lam = float(np.linalg.eigvalsh(0.5 * (k + k.T))[0]) if k.size else 0.0
    return PsdCheckReport(lam >= -tol, lam, tol)


def loewner_geq(k1, k2, tol=None):
    """Check ``K1 - K2 >= 0`` in the Loewner order.

    The default tolerance is ``1e-9`` times the largest diagonal entry of
    either argument, so exactly singular covariances (correlation of +-1)
    pass.
    """
    k1 = _as_matrix(k1, "K1")
    k2 = _as_matrix(k2, "K2")
    if k1.shape != k2.shape:
        raise DimensionMismatch(f"shapes differ: {k1.shape} vs {k2.shape}")
    tol = _default_tol(k1, k2) if tol is None else float(tol)
    return psd_check(k1 - k2, tol)
