"""Independent reference computations used only by the tests.

None of these share code paths with the package: distances, kernel values
and integrals are re-derived from scratch here.
"""
from __future__ import annotations

import math

import mpmath
import numpy as np


def circ(x: float, y: float) -> float:
    g = abs(x - y)
    return min(g, 1.0 - g)


def adjacent(x: float, y: float, r1: float, r2: float) -> int:
    return int(r2 < circ(x, y) < r1)


def literal_counts(xs, r1, r2):
    """Triple loop over ordered triples of distinct indices, pure Python."""
    n = len(xs)
    a = [[0 if i == j else adjacent(xs[i], xs[j], r1, r2) for j in range(n)] for i in range(n)]
    tri = paths = 0
    for i in range(n):
        for j in range(n):
            if j == i or not a[i][j]:
                continue
            for k in range(n):
                if k == i or k == j:
                    continue
                paths += a[j][k]
                tri += a[j][k] * a[k][i]
    return tri, paths


def linear_scan_arc_count(points, lo, length, exclude_positions=()):
    """Points p with 0 < (p - lo) mod 1 < length."""
    def inside(p):
        off = (p - lo) % 1.0
        return 0.0 < off < length

    total = sum(inside(p) for p in points)
    return total - sum(inside(p) for p in exclude_positions)


def annulus_overlap(delta: float, r1: float, r2: float) -> float:
    """Length of N(0) intersected with N(delta), N(x) the two arcs around x."""
    arcs = [(-r1, -r2), (r2, r1)]
    total = 0.0
    for k in (-1, 0, 1):
        for a1, b1 in arcs:
            for a2, b2 in arcs:
                lo = max(a1, a2 + delta + k)
                hi = min(b1, b2 + delta + k)
                total += max(0.0, hi - lo)
    return total


def exact_sigma2(r1: float, r2: float) -> float:
    """E[h(X1,X2,X3) h(X1,X2,X4)] by exact piecewise integration.

    With X1 = 0 and X2 = u, E[h | u] = A(u) I(u) - c (2 p A(u) + I(u)) where
    I is the annulus overlap length, piecewise linear in u.  Its square is
    integrated by 3-point Gauss-Legendre between consecutive kinks.
    """
    c = (r1 - 2 * r2) ** 2 / (4 * (r1 - r2) ** 2)
    p = 2 * (r1 - r2)
    ends = [-r1, -r2, r2, r1]
    kinks = {0.0, 0.5, r1, r2}
    for e in ends:
        for f in ends:
            for k in (-1, 0, 1):
                t = e - f + k
                if 0.0 < t < 0.5:
                    kinks.add(t)
    kinks = sorted(kinks)
    nodes, weights = np.polynomial.legendre.leggauss(3)
    total = 0.0
    for a, b in zip(kinks[:-1], kinks[1:]):
        for x, w in zip(nodes, weights):
            d = 0.5 * (a + b) + 0.5 * (b - a) * x
            adj = 1.0 if r2 < d < r1 else 0.0
            over = annulus_overlap(d, r1, r2)
            g = adj * over - c * (2 * p * adj + over)
            total += w * 0.5 * (b - a) * g * g
    return 2.0 * total


def polygon_moments(r1: float, r2: float) -> dict[str, float]:
    """Conditional moments given X1 as exact polygon areas (needs r1 <= 1/4).

    Coordinates are offsets (du, dv) of X2, X3 from X1 in [-1/2, 1/2)^2.
    """
    from shapely.geometry import Polygon, box
    from shapely.ops import unary_union

    square = box(-0.5, -0.5, 0.5, 0.5)
    strip_u = unary_union([box(r2, -0.5, r1, 0.5), box(-r1, -0.5, -r2, 0.5)])
    strip_v = unary_union([box(-0.5, r2, 0.5, r1), box(-0.5, -r1, 0.5, -r2)])

    def band(a, b):
        # a < du - dv < b
        return Polygon([(-2, -2 - a), (2, 2 - a), (2, 2 - b), (-2, -2 - b)])

    diag = unary_union([band(r2, r1), band(-r1, -r2)]).intersection(square)
    return {
        "triangle": strip_u.intersection(strip_v).intersection(diag).area,
        "path_center_1": strip_u.intersection(strip_v).area,
        "path_center_2": strip_u.intersection(diag).area,
        "path_center_3": strip_v.intersection(diag).area,
    }


def nested_mc_sigma2(r1, r2, samples, rng):
    """Monte Carlo of E[h(0,U,V) h(0,U,W)] with the first point pinned at 0."""
    c = (r1 - 2 * r2) ** 2 / (4 * (r1 - r2) ** 2)

    def a(x, y):
        g = np.abs(x - y)
        d = np.where(g > 0.5, 1.0 - g, g)
        return ((d > r2) & (d < r1)).astype(float)

    u, v, w = rng.random((3, samples))
    a12 = a(0.0, u)
    h3 = a12 * a(0.0, v) * a(u, v) - c * (a12 * a(0.0, v) + a12 * a(u, v) + a(0.0, v) * a(u, v))
    h4 = a12 * a(0.0, w) * a(u, w) - c * (a12 * a(0.0, w) + a12 * a(u, w) + a(0.0, w) * a(u, w))
    y = h3 * h4
    return y.mean(), y.std(ddof=1) / math.sqrt(samples)


def normal_cdf_series(z: float, digits: int = 60) -> float:
    """Phi(z) from the Maclaurin series of erf in high precision."""
    with mpmath.workdps(digits):
        x = mpmath.mpf(z) / mpmath.sqrt(2)
        term = x
        total = x
        k = 0
        while abs(term) > mpmath.mpf(10) ** (-digits + 5) or k < 5:
            k += 1
            term *= -x * x / k
            total += term / (2 * k + 1)
        erf = 2 / mpmath.sqrt(mpmath.pi) * total
        return float((1 + erf) / 2)
