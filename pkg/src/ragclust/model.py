"""Random annulus graph model on the circle of circumference 1.

Nodes are i.i.d. uniform points on [0, 1); nodes i and j are adjacent iff
their circle distance lies strictly between ``r2`` and ``r1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

from .exceptions import CapExceeded, InvalidParams, RegimeViolation

DEFAULT_ADJACENCY_CAP = 2000
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class AnnulusParams:
    """Model triple ``(n, r1, r2)``.

    Construction validates ``n >= 1`` and ``0 <= r2 < r1 <= 0.5``.
    """

    n: int
    r1: float
    r2: float

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise InvalidParams(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "r1", float(self.r1))
        object.__setattr__(self, "r2", float(self.r2))
        if not (math.isfinite(self.r1) and math.isfinite(self.r2)):
            raise InvalidParams("r1 and r2 must be finite")
        if not 0.0 <= self.r2 < self.r1 <= 0.5:
            raise InvalidParams(
                f"need 0 <= r2 < r1 <= 0.5 (r1 > r2 is required), got r1={self.r1}, r2={self.r2}"
            )

    @classmethod
    def from_lambda(cls, n: int, r1: float, lam: float) -> "AnnulusParams":
        """Parameterize by the ratio ``lam = r1 / r2`` (``lam = inf`` gives r2 = 0)."""
        if not lam > 1.0:
            raise InvalidParams(f"lambda must exceed 1 so that r1 > r2, got {lam}")
        return cls(n, r1, 0.0 if math.isinf(lam) else r1 / lam)

    @property
    def clt_regime(self) -> bool:
        """True iff 2*r2 < r1, the only case in which triangles can form."""
        return 2.0 * self.r2 < self.r1

    @property
    def edge_probability(self) -> float:
        return 2.0 * (self.r1 - self.r2)

    def require_clt_regime(self) -> None:
        if not self.clt_regime:
            raise RegimeViolation(
                f"need 2*r2 < r1 for the limit theorem, got r1={self.r1}, r2={self.r2}"
            )


@dataclass(frozen=True)
class RngSeed:
    """Key of a counter-based random stream."""

    master_seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        for name in ("master_seed", "stream_id"):
            value = getattr(self, name)
            if not 0 <= value <= _MASK64:
                raise ValueError(f"{name} must fit in 64 unsigned bits, got {value}")

    def generator(self) -> np.random.Generator:
        key = np.array([self.master_seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True, eq=False)
class PositionSet:
    positions: np.ndarray
    sorted_order: np.ndarray = field(repr=False)

    @classmethod
    def from_positions(cls, positions) -> "PositionSet":
        pos = np.array(positions, dtype=np.float64).reshape(-1)
        if pos.size and (pos.min() < 0.0 or pos.max() >= 1.0):
            raise ValueError("positions must lie in [0, 1)")
        order = np.argsort(pos, kind="stable")
        pos.flags.writeable = False
        order.flags.writeable = False
        return cls(pos, order)

    @property
    def n(self) -> int:
        return int(self.positions.size)

    @property
    def sorted_positions(self) -> np.ndarray:
        return self.positions[self.sorted_order]

    def rotated(self, shift: float) -> "PositionSet":
        """Copy with every point moved by ``shift`` around the circle."""
        pos = (self.positions + shift) % 1.0
        pos[pos >= 1.0] -= 1.0
        return PositionSet.from_positions(pos)


def sample_positions(params: AnnulusParams, seed: RngSeed) -> PositionSet:
    return PositionSet.from_positions(seed.generator().random(params.n))


def circle_distance(x, y):
    """Distance on the circle of circumference 1; works elementwise on arrays."""
    gap = np.abs(np.subtract(x, y))
    return np.minimum(gap, 1.0 - gap)


def edge_indicator(x, y, params: AnnulusParams):
    d = circle_distance(x, y)
    out = (d > params.r2) & (d < params.r1)
    return int(out) if np.ndim(out) == 0 else out.astype(np.int8)


def build_adjacency(
    ps: PositionSet, params: AnnulusParams, cap: int = DEFAULT_ADJACENCY_CAP
) -> np.ndarray:
    if ps.n > cap:
        raise CapExceeded(f"n={ps.n} exceeds the dense adjacency cap {cap}; use count_graph")
    x = ps.positions
    adj = edge_indicator(x[:, None], x[None, :], params)
    np.fill_diagonal(adj, 0)
    return adj


def edge_list(ps: PositionSet, params: AnnulusParams) -> np.ndarray:
    """All edges as an ``(m, 2)`` array of original indices with ``i < j``, sorted."""
    s = ps.sorted_positions
    n = ps.n
    if n < 2:
        return np.zeros((0, 2), dtype=np.int64)
    ext = np.concatenate([s, s + 1.0])
    # candidates in the positive direction; exact predicate filters rounding
    lo = np.searchsorted(ext, s + params.r2, side="left")
    hi = np.searchsorted(ext, s + params.r1, side="right")
    lo = np.maximum(lo, np.arange(n) + 1)
    hi = np.minimum(hi, np.arange(n) + n)
    k = np.maximum(hi - lo, 0)
    a = np.repeat(np.arange(n), k)
    b = (np.arange(k.sum()) - np.repeat(np.cumsum(k) - k, k) + np.repeat(lo, k)) % n
    keep = edge_indicator(s[a], s[b], params).astype(bool)
    i = ps.sorted_order[a[keep]]
    j = ps.sorted_order[b[keep]]
    pairs = np.stack([np.minimum(i, j), np.maximum(i, j)], axis=1)
    pairs = np.unique(pairs, axis=0)
    return pairs


def write_edge_list(fh: TextIO, ps: PositionSet, params: AnnulusParams, seed: int) -> int:
    fh.write(f"# rag n={params.n} r1={params.r1!r} r2={params.r2!r} seed={seed}\n")
    edges = edge_list(ps, params)
    np.savetxt(fh, edges, fmt="%d %d")
    return len(edges)


def write_positions_csv(fh: TextIO, ps: PositionSet) -> None:
    fh.write("index,position\n")
    for i, p in enumerate(ps.positions):
        fh.write(f"{i},{p:.17g}\n")


def read_positions_csv(fh: TextIO) -> PositionSet:
    header = fh.readline().strip()
    if header != "index,position":
        raise ValueError(f"unexpected positions header {header!r}")
    rows = [line.split(",") for line in fh if line.strip()]
    values = [0.0] * len(rows)
    for idx, pos in rows:
        values[int(idx)] = float(pos)
    return PositionSet.from_positions(values)
