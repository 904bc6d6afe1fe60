"""Exact ordered triangle and 2-path counts.

``count_graph`` runs in O((n + m) log n): degrees come from two arc queries
per node, and each edge's common neighbors from at most four arc queries on
the intersection of the two endpoints' annuli.  ``brute_force_counts`` is the
O(n^3) oracle working on the dense adjacency matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import _backend, _fallback
from .model import AnnulusParams, PositionSet


@dataclass(frozen=True, eq=False)
class GraphCounts:
    ordered_triangles: int
    ordered_paths: int
    degrees: np.ndarray

    def __eq__(self, other) -> bool:
        if not isinstance(other, GraphCounts):
            return NotImplemented
        return (
            self.ordered_triangles == other.ordered_triangles
            and self.ordered_paths == other.ordered_paths
            and np.array_equal(self.degrees, other.degrees)
        )

    @property
    def triangles(self) -> int:
        return self.ordered_triangles // 6

    @property
    def paths(self) -> int:
        return self.ordered_paths // 2

    @property
    def edges(self) -> int:
        return int(self.degrees.sum()) // 2

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.degrees.size else 0

    def to_json(self, params: AnnulusParams) -> dict:
        return {
            "n": params.n,
            "r1": params.r1,
            "r2": params.r2,
            "ordered_triangles": self.ordered_triangles,
            "ordered_paths": self.ordered_paths,
            "max_degree": self.max_degree,
        }


def _paths_from_degrees(deg: np.ndarray) -> int:
    deg = deg.astype(np.int64)
    return int((deg * (deg - 1)).sum())


@dataclass(frozen=True)
class Arc:
    """Open arc starting at ``lo`` and running ``length`` counterclockwise."""

    lo: float
    length: float

    @property
    def hi(self) -> float:
        return float(_fallback.mod1(self.lo + self.length))

    def contains(self, p: float) -> bool:
        return bool(_fallback.in_open(p, self.lo, self.length))


@dataclass(frozen=True)
class ArcSet:
    arcs: tuple[Arc, ...] = ()

    def __post_init__(self) -> None:
        if len(self.arcs) > 4:
            raise ValueError("an ArcSet holds at most four arcs")

    def __iter__(self):
        return iter(self.arcs)

    def __len__(self) -> int:
        return len(self.arcs)

    @property
    def total_length(self) -> float:
        return sum(a.length for a in self.arcs)

    def contains(self, p: float) -> bool:
        return any(a.contains(p) for a in self.arcs)

    def intersect(self, other: "ArcSet") -> "ArcSet":
        """Pairwise intersection; valid when every arc is at most half the circle."""
        pieces = []
        for a in self.arcs:
            for b in other.arcs:
                pieces.extend(_intersect(a, b))
        return ArcSet(tuple(pieces))


def _intersect(a: Arc, b: Arc) -> list[Arc]:
    # b's start seen from a's start; at most one piece when both lengths <= 1/2
    t = float(_fallback.mod1(b.lo - a.lo))
    out = []
    if t < a.length:
        out.append(Arc(b.lo, min(a.length - t, b.length)))
    if t + b.length - 1.0 > 0.0:
        out.append(Arc(a.lo, min(t + b.length - 1.0, a.length)))
    return [p for p in out if p.length > 0.0]


def neighbor_arcs(x: float, params: AnnulusParams) -> ArcSet:
    """Arcs ``(x + r2, x + r1)`` and ``(x - r1, x - r2)`` taken mod 1."""
    length = params.r1 - params.r2
    return ArcSet(
        (
            Arc(float(_fallback.mod1(x + params.r2)), length),
            Arc(float(_fallback.mod1(x - params.r1)), length),
        )
    )


def count_in_arcs(ps: PositionSet, arcs: ArcSet, exclude: Iterable[int] = ()) -> int:
    s = ps.sorted_positions
    total = 0
    for arc in arcs:
        total += int(_fallback.count_open(s, arc.lo, arc.length))
    for idx in set(exclude):
        p = ps.positions[idx]
        total -= sum(arc.contains(p) for arc in arcs)
    return total


def count_graph(ps: PositionSet, params: AnnulusParams, backend=None) -> GraphCounts:
    """Exact counts for the annulus graph on ``ps``.

    ``backend`` may be ``"cython"`` or ``"python"``; default is the import-time
    choice.
    """
    kernels = _backend.kernels if backend is None else _backend.load(backend)
    deg_sorted, common = kernels.count_sorted(ps.sorted_positions, params.r1, params.r2)
    deg = np.empty(ps.n, dtype=np.int64)
    deg[ps.sorted_order] = deg_sorted
    deg.flags.writeable = False
    # each triangle is seen once from each of its three edges
    return GraphCounts(2 * int(common), _paths_from_degrees(deg), deg)


def brute_force_counts(adj: np.ndarray) -> GraphCounts:
    """Literal sums over ordered triples of distinct indices."""
    a = np.asarray(adj, dtype=np.int64)
    n = a.shape[0]
    idx = np.arange(n)
    distinct_jk = idx[:, None] != idx[None, :]
    tri = 0
    paths = 0
    for i in range(n):
        mask = distinct_jk.copy()
        mask[i, :] = False
        mask[:, i] = False
        # A_ij A_jk A_ki and A_ij A_jk over j, k
        slab = a[i, :, None] * a
        tri += int((slab * a[None, :, i] * mask).sum())
        paths += int((slab * mask).sum())
    deg = a.sum(axis=1)
    deg.flags.writeable = False
    return GraphCounts(tri, paths, deg)
