"""Pure-numpy kernels; used when the compiled extension is unavailable."""

import numpy as np


def min_dual_bound(b, vertices):
    """Row-wise ``min_v vertices[v] . b[i]``."""
    return np.min(b @ vertices.T, axis=1)


def feedback_loop(xi, z, w1, w2, a1, a2, b1, b2):
    """Propagate the causal inner encoders over a batch of samples.

    Returns the inputs ``x1, x2`` and outputs ``y``, each of shape (n, eta).
    """
    n, eta = z.shape
    x1 = np.empty((n, eta))
    x2 = np.empty((n, eta))
    y = np.empty((n, eta))
    v1 = np.empty((n, eta))
    v2 = np.empty((n, eta))
    for l in range(eta):
        x1[:, l] = a1[l] * xi[:, 0] + v1[:, :l] @ b1[l, :l]
        x2[:, l] = a2[l] * xi[:, 1] + v2[:, :l] @ b2[l, :l]
        y[:, l] = x1[:, l] + x2[:, l] + z[:, l]
        v1[:, l] = y[:, l] + w1[:, l]
        v2[:, l] = y[:, l] + w2[:, l]
    return x1, x2, y
