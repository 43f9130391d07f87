"""Exact value of small packing LPs with a fixed constraint matrix.

Split-rate regions (Carleial, Willems) have the form ``A x <= b`` with a
fixed nonnegative ``A`` and a right-hand side ``b >= 0`` that depends on
continuous parameters. The optimal weighted rate ``max c.x`` equals the
minimum of ``b.y`` over the vertices ``y`` of the dual polyhedron
``{y >= 0 : A^T y >= c}``; those vertices depend only on ``A`` and ``c``,
so they are enumerated once and the LP is then a matrix product per grid
point.
"""

from itertools import combinations

import numpy as np

from . import kernels

__all__ = ["DualVertexLP"]


class DualVertexLP:
    """Evaluate ``max {c.x : A x <= b, x >= 0}`` for many ``b``.

    Parameters
    ----------
    a : array_like, shape (m, n)
        Constraint matrix.
    c : array_like, shape (n,)
        Objective with at least one positive entry.
    """

    def __init__(self, a, c, tol=1e-12):
        self.a = np.asarray(a, dtype=float)
        self.c = np.asarray(c, dtype=float)
        self.vertices = self._enumerate(tol)

    def _enumerate(self, tol):
        m, n = self.a.shape
        found = []
        for k in range(1, n + 1):
            for rows in combinations(range(m), k):
                for cols in combinations(range(n), k):
                    sub = self.a[np.ix_(rows, cols)].T
                    if abs(np.linalg.det(sub)) < 1e-12:
                        continue
                    ys = np.linalg.solve(sub, self.c[list(cols)])
                    if np.any(ys < -tol):
                        continue
                    y = np.zeros(m)
                    y[list(rows)] = np.maximum(ys, 0.0)
                    if np.all(self.a.T @ y >= self.c - 1e-9):
                        found.append(y)
        if not found:
            raise ValueError("dual polyhedron has no vertices; the LP is unbounded")
        return np.unique(np.round(np.array(found), 12), axis=0)

    def value(self, b):
        """Optimal value for one right-hand side or a stack of them (rows)."""
        b = np.asarray(b, dtype=float)
        if b.ndim == 1:
            return float(np.min(self.vertices @ b))
        return kernels.min_dual_bound(np.ascontiguousarray(b), self.vertices)
