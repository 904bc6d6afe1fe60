"""Pure numpy implementations of the hot kernels.

These mirror ``_core.pyx`` operation for operation so that both backends make
identical floating-point comparisons and return identical integers.
"""
from __future__ import annotations

import numpy as np

NAME = "python"

# cap on edges materialized at once by count_sorted
_EDGE_CHUNK = 1 << 21


def mod1(a):
    r = a - np.floor(a)
    return np.where(r >= 1.0, r - 1.0, r)


def count_open(s: np.ndarray, a, length):
    """Number of sorted points strictly inside the arcs ``(a, a + length)`` mod 1."""
    n = s.size
    b = a + length
    wrap = b > 1.0
    up = np.searchsorted(s, a, side="right")
    lb = np.searchsorted(s, np.where(wrap, b - 1.0, b), side="left")
    return np.where(wrap, n - up + lb, lb - up).astype(np.int64)


def in_open(p, a, length):
    b = a + length
    wrap = b > 1.0
    return np.where(wrap, (p > a) | (p < b - 1.0), (a < p) & (p < b))


def _arc_table(s: np.ndarray, r1: float, r2: float):
    """Start, end and rank data for the two neighbor arcs of every sorted node.

    For an arc starting at ``a`` its end is ``e = a + L`` reduced into [0, 1);
    ``up`` is the number of points <= a and ``lo`` the number < e.
    """
    length = r1 - r2
    table = {}
    for key, a in (("p", mod1(s + r2)), ("n", mod1(s - r1))):
        b = a + length
        e = np.where(b > 1.0, b - 1.0, b)
        table[key] = (
            a,
            e,
            np.searchsorted(s, a, side="right").astype(np.int64),
            np.searchsorted(s, e, side="left").astype(np.int64),
        )
    return table


def _piece_count(n, x, y, a, e, up, lo):
    """Points strictly inside the arc from ``a`` to ``e`` minus the endpoints x, y.

    Piece lengths never exceed 1/2, so ``e`` far behind ``a`` means a wrap and
    ``e`` at or slightly behind ``a`` means an empty (rounded-away) piece.
    """
    plain = e > a
    wrap = (a - e) >= 0.5
    cnt = np.where(plain, lo - up, np.where(wrap, n - up + lo, 0))
    for p in (x, y):
        inside = np.where(plain, (a < p) & (p < e), wrap & ((p > a) | (p < e)))
        cnt = cnt - inside
    return cnt


def count_sorted(s: np.ndarray, r1: float, r2: float):
    """Degrees (in sorted order) and the sum over edges of common-neighbor counts."""
    s = np.ascontiguousarray(s, dtype=np.float64)
    n = s.size
    length = r1 - r2
    table = _arc_table(s, r1, r2)
    a_p, e_p, up_p, lo_p = table["p"]
    a_n, e_n, up_n, lo_n = table["n"]
    c_pos = np.where(e_p > a_p, lo_p - up_p, n - up_p + lo_p)
    c_neg = np.where(e_n > a_n, lo_n - up_n, n - up_n + lo_n)
    deg = (
        c_pos
        + c_neg
        - in_open(s, a_p, length)
        - in_open(s, a_n, length)
    )
    common = 0
    lo = 0
    while lo < n:
        # grow the node block until it holds about _EDGE_CHUNK edges
        csum = np.cumsum(c_pos[lo:])
        hi = lo + max(1, int(np.searchsorted(csum, _EDGE_CHUNK, side="right")))
        k = c_pos[lo:hi]
        rows = np.repeat(np.arange(lo, hi), k)
        offs = np.arange(k.sum()) - np.repeat(np.cumsum(k) - k, k)
        cols = (up_p[rows] + offs) % n
        keep = cols != rows
        rows, cols = rows[keep], cols[keep]
        x, y = s[rows], s[cols]
        for ka in ("p", "n"):
            a1, e1, u1, l1 = (v[rows] for v in table[ka])
            for kb in ("p", "n"):
                a2, e2, u2, l2 = (v[cols] for v in table[kb])
                t = mod1(a2 - a1)
                m1 = t < length
                if m1.any():
                    common += int(
                        _piece_count(n, x[m1], y[m1], a2[m1], e1[m1], u2[m1], l1[m1]).sum()
                    )
                m2 = t + length - 1.0 > 0.0
                if m2.any():
                    common += int(
                        _piece_count(n, x[m2], y[m2], a1[m2], e2[m2], u1[m2], l2[m2]).sum()
                    )
        lo = hi
    return deg.astype(np.int64), common


def _edge(xa, xb, r1, r2):
    gap = np.abs(xa - xb)
    d = np.minimum(gap, 1.0 - gap)
    return (d > r2) & (d < r1)


def kernel_category_counts(u: np.ndarray, r1: float, r2: float) -> np.ndarray:
    """3x3 table of kernel categories for quadruples stored as rows of ``u``.

    Category of a triple: 0 for at most one edge, 1 for exactly two edges
    (one 2-path), 2 for a triangle.  Entry ``[a, b]`` counts quadruples whose
    triples (1,2,3) and (1,2,4) fall in categories a and b.
    """
    x1, x2, x3, x4 = u
    e12 = _edge(x1, x2, r1, r2).astype(np.int64)
    k3 = e12 + _edge(x1, x3, r1, r2) + _edge(x2, x3, r1, r2)
    k4 = e12 + _edge(x1, x4, r1, r2) + _edge(x2, x4, r1, r2)
    c3 = np.clip(k3 - 1, 0, 2)
    c4 = np.clip(k4 - 1, 0, 2)
    return np.bincount(3 * c3 + c4, minlength=9).reshape(3, 3).astype(np.int64)
