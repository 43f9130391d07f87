"""Two-dimensional rate regions: membership, support values and sampled frontiers."""

import csv
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.optimize import minimize_scalar

__all__ = [
    "Frontier",
    "RateRegion",
    "approx_subset",
    "best_corner",
    "contains",
    "family_generator",
    "from_triple",
    "read_frontier_csv",
    "support",
    "union_frontier",
    "unit_direction",
    "write_frontier_csv",
    "write_frontiers_svg",
]

DEFAULT_DIRECTIONS = 181


@dataclass(frozen=True)
class RateRegion:
    """Downward-closed region ``{R >= 0 : c1 R1 + c2 R2 <= v for each constraint}``."""

    constraints: tuple
    provenance: str = ""


def from_triple(t, provenance=""):
    return RateRegion(
        ((1.0, 0.0, t.r1_max), (0.0, 1.0, t.r2_max), (1.0, 1.0, t.rsum_max)), provenance
    )


def contains(reg, pt, tol=1e-12):
    r1, r2 = pt
    if r1 < -tol or r2 < -tol:
        return False
    return all(c1 * r1 + c2 * r2 <= v + tol for c1, c2, v in reg.constraints)


def _vertices(reg):
    lines = list(reg.constraints) + [(-1.0, 0.0, 0.0), (0.0, -1.0, 0.0)]
    pts = []
    for (a1, a2, av), (b1, b2, bv) in combinations(lines, 2):
        det = a1 * b2 - a2 * b1
        if abs(det) < 1e-15:
            continue
        x = (av * b2 - a2 * bv) / det
        y = (a1 * bv - av * b1) / det
        if contains(reg, (x, y), 1e-12):
            pts.append((max(x, 0.0), max(y, 0.0)))
    return pts


def support(reg, direction):
    """``max l1 R1 + l2 R2`` over the region, by enumerating polygon vertices."""
    l1, l2 = direction
    if l1 < 0 or l2 < 0 or (l1 == 0 and l2 == 0):
        raise ValueError("direction must be non-negative and non-zero")
    return max(l1 * x + l2 * y for x, y in _vertices(reg))


def best_corner(t, l1, l2):
    """Dominant pentagon corner maximizing ``l1 R1 + l2 R2`` (ties go to the larger sum)."""
    r1, r2, rs = t.r1_max, t.r2_max, t.rsum_max
    a = min(r1, rs)
    b = min(r2, rs)
    corners = ((a, max(0.0, min(r2, rs - a))), (max(0.0, min(r1, rs - b)), b))
    return max(corners, key=lambda p: (l1 * p[0] + l2 * p[1], p[0] + p[1]))


def unit_direction(theta_deg):
    th = math.radians(theta_deg)
    return max(math.cos(th), 0.0), max(math.sin(th), 0.0)


def family_generator(triple_of, lo, hi, grid=257):
    """Generator for the union of pentagons ``triple_of(s)``, ``s`` in ``[lo, hi]``.

    Scans a grid and polishes the best cell with a bounded scalar search.
    """
    ss = np.linspace(lo, hi, grid)
    triples = [triple_of(float(s)) for s in ss]

    def gen(theta_deg):
        l1, l2 = unit_direction(theta_deg)
        score = lambda t: float(np.dot((l1, l2), best_corner(t, l1, l2)))  # noqa: E731
        vals = [score(t) for t in triples]
        k = int(np.argmax(vals))
        best_s, best_v = float(ss[k]), vals[k]
        a, b = ss[max(k - 1, 0)], ss[min(k + 1, grid - 1)]
        if b > a:
            res = minimize_scalar(
                lambda s: -score(triple_of(s)), bounds=(a, b), method="bounded",
                options={"xatol": 1e-12},
            )
            if -res.fun > best_v:
                best_s = float(res.x)
        return best_corner(triple_of(best_s), l1, l2)

    return gen


@dataclass(frozen=True)
class Frontier:
    """Pareto-maximal points sorted by ``R1`` ascending (``R2`` strictly decreasing).

    ``directions`` holds, for each point, the first direction (degrees) whose
    generator call produced it.
    """

    points: tuple
    directions: tuple = ()
    label: str = ""

    def as_array(self):
        return np.array(self.points, dtype=float).reshape(-1, 2)

    @classmethod
    def from_points(cls, pts, directions=None, label="", tol=1e-13):
        pts = [tuple(map(float, p)) for p in pts]
        dirs = list(directions) if directions is not None else [float("nan")] * len(pts)
        order = sorted(range(len(pts)), key=lambda i: (-pts[i][0], -pts[i][1]))
        keep = []
        best_r2 = -math.inf
        for i in order:
            if pts[i][1] > best_r2 + tol:
                if keep and abs(pts[keep[-1]][0] - pts[i][0]) <= tol:
                    # same R1 up to rounding: the higher point wins
                    keep[-1] = i
                else:
                    keep.append(i)
                best_r2 = pts[i][1]
        keep.reverse()
        return cls(tuple(pts[i] for i in keep), tuple(dirs[i] for i in keep), label)


def union_frontier(generator, directions=DEFAULT_DIRECTIONS, label=""):
    """Sample ``generator`` at ``directions`` angles spanning 0 to 90 degrees."""
    if directions < 3:
        raise ValueError("need at least 3 directions")
    angles = np.linspace(0.0, 90.0, directions)
    pts = [generator(float(a)) for a in angles]
    return Frontier.from_points(pts, [float(a) for a in angles], label)


def _envelope(b):
    pts = b.as_array()
    xs, ys = pts[:, 0], pts[:, 1]

    def f(x):
        if x <= xs[0]:
            return ys[0]
        return float(np.interp(x, xs, ys))

    return f, xs[-1]


def approx_subset(a, b, tol=1e-9):
    """Whether every point of ``a`` lies under ``b``'s interpolated frontier.

    Returns ``(ok, max_violation)``; the violation of a point is how far it
    sticks out above the envelope or past ``b``'s largest ``R1``.
    """
    if not a.points or not b.points:
        raise ValueError("frontiers must be non-empty")
    f, xmax = _envelope(b)
    worst = 0.0
    for x, y in a.points:
        v = max(y - f(min(x, xmax)), x - xmax)
        worst = max(worst, v)
    return worst <= tol, worst


def write_frontier_csv(frontier, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["direction_deg", "r1", "r2"])
        for d, (r1, r2) in zip(frontier.directions, frontier.points):
            w.writerow([f"{d:.12g}", f"{r1:.12g}", f"{r2:.12g}"])


def read_frontier_csv(path, label=None):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    pts = [(float(r["r1"]), float(r["r2"])) for r in rows]
    dirs = [float(r["direction_deg"]) for r in rows]
    return Frontier.from_points(pts, dirs, label if label is not None else str(path))


_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def write_frontiers_svg(frontiers, path, title=""):
    """Plot frontiers (rates converted to bits) on a fixed 800x800 canvas."""
    ln2 = math.log(2.0)
    size, pad = 800, 70
    xmax = max((p[0] for f in frontiers for p in f.points), default=1.0) / ln2
    ymax = max((p[1] for f in frontiers for p in f.points), default=1.0) / ln2
    span = max(xmax, ymax, 1e-12) * 1.05
    scale = (size - 2 * pad) / span

    def xy(r1, r2):
        return pad + r1 / ln2 * scale, size - pad - r2 / ln2 * scale

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<line x1="{pad}" y1="{size - pad}" x2="{size - pad}" y2="{size - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{size - pad}" x2="{pad}" y2="{pad}" stroke="black"/>',
        f'<text x="{size / 2}" y="{size - 20}" text-anchor="middle" font-size="16">R1 [bits/use]</text>',
        f'<text x="20" y="{size / 2}" font-size="16" transform="rotate(-90 20 {size / 2})" '
        'text-anchor="middle">R2 [bits/use]</text>',
    ]
    for k in range(6):
        v = span * k / 5
        x, y = xy(v * ln2, 0.0)
        out.append(f'<text x="{x:.1f}" y="{size - pad + 18}" font-size="12" text-anchor="middle">{v:.3g}</text>')
        x, y = xy(0.0, v * ln2)
        out.append(f'<text x="{pad - 8}" y="{y:.1f}" font-size="12" text-anchor="end">{v:.3g}</text>')
    if title:
        out.append(f'<text x="{size / 2}" y="30" font-size="18" text-anchor="middle">{title}</text>')
    for i, fr in enumerate(frontiers):
        color = _COLORS[i % len(_COLORS)]
        pts = list(fr.points)
        if pts:
            pts = [(0.0, pts[0][1])] + pts + [(pts[-1][0], 0.0)]
        coords = " ".join("{:.2f},{:.2f}".format(*xy(*p)) for p in pts)
        out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>')
        ly = pad + 20 * i
        out.append(f'<line x1="{size - pad - 180}" y1="{ly}" x2="{size - pad - 150}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{size - pad - 145}" y="{ly + 4}" font-size="13">{fr.label}</text>')
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")
