"""Independent reference computations used to check the package.

Each routine takes a different path from the package code: high-precision
root finding, cofactor determinants, generic LP solvers or brute-force scans.
"""

import itertools
import math

import mpmath
import numpy as np
from scipy.optimize import linprog

mpmath.mp.dps = 40

# tighter than the solver's 1e-7 defaults so results compare at 1e-9
_HIGHS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}


def det_cofactor(m):
    m = [list(map(float, row)) for row in m]
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = 0.0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        total += (-1) ** j * m[0][j] * det_cofactor(minor)
    return total


def kron_entrywise(a, b):
    a, b = np.asarray(a), np.asarray(b)
    out = np.zeros((a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]))
    for i, j, k, l in itertools.product(
        range(a.shape[0]), range(a.shape[1]), range(b.shape[0]), range(b.shape[1])
    ):
        out[i * b.shape[0] + k, j * b.shape[1] + l] = a[i, j] * b[k, l]
    return out


def rho_star_mp(p1, p2, n):
    """Root of the defining quartic in [0, 1] at 40 digits."""
    p1, p2, n = mpmath.mpf(p1), mpmath.mpf(p2), mpmath.mpf(n)

    def f(r):
        return n * (n + p1 + p2 + 2 * mpmath.sqrt(p1 * p2) * r) - (n + p1 * (1 - r * r)) * (
            n + p2 * (1 - r * r)
        )

    return float(mpmath.findroot(f, (mpmath.mpf(0), mpmath.mpf(1)), solver="anderson"))


def rho_star_scan(p1, p2, n, step=1e-6):
    """Bracket of the sign change of the quartic on a uniform grid."""
    g = np.arange(0.0, 1.0 + step, step)
    f = n * (n + p1 + p2 + 2.0 * math.sqrt(p1 * p2) * g) - (n + p1 * (1 - g * g)) * (n + p2 * (1 - g * g))
    i = int(np.nonzero(np.diff(np.sign(f)))[0][0])
    return g[i], g[i + 1]


def solve_r_mp(p1, p2, n):
    rs = mpmath.mpf(rho_star_mp(p1, p2, n))
    p1, p2, n = mpmath.mpf(p1), mpmath.mpf(p2), mpmath.mpf(n)
    g = lambda r: mpmath.sqrt(r * r * p1 * p2 / ((r * p1 + n) * (r * p2 + n))) - rs  # noqa: E731
    return float(mpmath.findroot(g, (mpmath.mpf("1e-6"), mpmath.mpf(1)), solver="anderson"))


def scan_root(f, lo, hi, n=200001):
    """Root of a monotone scalar function by dense scan plus linear interpolation."""
    x = np.linspace(lo, hi, n)
    y = np.array([f(v) for v in x])
    i = int(np.nonzero(np.diff(np.sign(y)))[0][0])
    return x[i] - y[i] * (x[i + 1] - x[i]) / (y[i + 1] - y[i])


def support_lp(t, direction):
    """Support of ``{R >= 0: R1 <= r1, R2 <= r2, R1 + R2 <= rs}`` via a generic LP solver."""
    res = linprog(
        -np.asarray(direction, dtype=float),
        A_ub=[[1, 0], [0, 1], [1, 1]],
        b_ub=[t.r1_max, t.r2_max, t.rsum_max],
        bounds=[(0, None), (0, None)],
        method="highs",
        options=_HIGHS,
    )
    return -res.fun


def lp_max(a, b, c):
    """``max c.x`` subject to ``a x <= b``, ``x >= 0`` via a generic LP solver."""
    res = linprog(-np.asarray(c, float), A_ub=a, b_ub=b, bounds=[(0, None)] * a.shape[1], method="highs",
                  options=_HIGHS)
    return -res.fun if res.status == 0 else -math.inf


def gaussian_mi(k, x_idx, y_idx, given=()):
    """``I(X; Y | G)`` in nats for jointly Gaussian variables with covariance ``k`` (mpmath)."""
    m = mpmath.matrix(k.tolist())

    def cond_logdet(idx, g):
        idx, g = list(idx), list(g)
        a = mpmath.matrix([[m[i, j] for j in idx] for i in idx])
        if g:
            gg = mpmath.matrix([[m[i, j] for j in g] for i in g])
            c = mpmath.matrix([[m[i, j] for j in g] for i in idx])
            a = a - c * mpmath.inverse(gg) * c.T
        return mpmath.log(mpmath.det(a))

    h_y = cond_logdet(y_idx, given)
    h_y_x = cond_logdet(y_idx, list(given) + list(x_idx))
    return float((h_y - h_y_x) / 2)


def scheme_signals(params, n0, kw):
    """Rows mapping ``(Xi1, Xi2, Z, W1, W2)`` to each signal, by running the loop one use at a time."""
    eta = params.eta
    d = 2 + 3 * eta
    eye = np.eye(d)
    xi, z, w1, w2 = eye[0:2], eye[2 : 2 + eta], eye[2 + eta : 2 + 2 * eta], eye[2 + 2 * eta :]
    y = np.zeros((eta, d))
    v1 = np.zeros((eta, d))
    v2 = np.zeros((eta, d))
    for l in range(eta):
        x1 = params.a1[l] * xi[0] + sum(params.b1[l, j] * v1[j] for j in range(l))
        x2 = params.a2[l] * xi[1] + sum(params.b2[l, j] * v2[j] for j in range(l))
        y[l] = x1 + x2 + z[l]
        v1[l] = y[l] + w1[l]
        v2[l] = y[l] + w2[l]
    sig = np.zeros((d, d))
    sig[0, 0] = sig[1, 1] = 1.0
    for l in range(eta):
        sig[2 + l, 2 + l] = n0
        for a in range(2):
            for b in range(2):
                sig[2 + (a + 1) * eta + l, 2 + (b + 1) * eta + l] = kw[a][b]
    return xi, y, w1, w2, sig


def scheme_rates_oracle(params, n0, kw, c, variant="noisy"):
    """``(r1, r2, rsum)`` from the decoder output ``C (I - B1 - B2) Y`` via mpmath Gaussian MI."""
    kw = np.asarray(kw, float)
    if variant == "partial":
        kw = np.array([[0.0, 0.0], [0.0, kw[1, 1]]])
    xi, y, w1, w2, sig = scheme_signals(params, n0, kw)
    ytil = y - params.b1 @ y - params.b2 @ y
    if variant == "si":
        ytil = ytil - params.b1 @ w1 - params.b2 @ w2
    rows = np.vstack([xi, np.asarray(c, float) @ ytil])
    k = rows @ sig @ rows.T
    out_idx = list(range(2, rows.shape[0]))
    eta = params.eta
    return (
        gaussian_mi(k, [0], out_idx, [1]) / eta,
        gaussian_mi(k, [1], out_idx, [0]) / eta,
        gaussian_mi(k, [0, 1], out_idx) / eta,
    )
