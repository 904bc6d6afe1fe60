"""Limit-theorem quantities for the clustering coefficient.

The centred triple kernel is

    h(x1, x2, x3) = A12*A13*A23 - c * (A12*A13 + A21*A23 + A31*A32),
    c = (r1 - 2*r2)**2 / (4 * (r1 - r2)**2),

and the variance constant is ``sigma2 = E[h(X1,X2,X3) h(X1,X2,X4)]``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Literal, Optional

import numpy as np

from . import _backend
from .counting import GraphCounts
from .exceptions import EmptySample, NonpositiveSigma, RegimeViolation
from .model import AnnulusParams, RngSeed, circle_distance

_MC_CHUNK = 1 << 20
_CUBATURE_BLOCK = 256


@dataclass(frozen=True)
class KernelParams:
    r1: float
    r2: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.r2 < self.r1 <= 0.5:
            raise ValueError(f"need 0 <= r2 < r1 <= 0.5, got r1={self.r1}, r2={self.r2}")
        if not 2.0 * self.r2 < self.r1:
            raise RegimeViolation(
                f"need 2*r2 < r1 for the limit theorem, got r1={self.r1}, r2={self.r2}"
            )

    @classmethod
    def from_params(cls, params: AnnulusParams) -> "KernelParams":
        return cls(params.r1, params.r2)

    @property
    def c(self) -> float:
        return (self.r1 - 2.0 * self.r2) ** 2 / (4.0 * (self.r1 - self.r2) ** 2)

    @property
    def limit(self) -> float:
        return 3.0 * self.c

    def kernel_values(self) -> np.ndarray:
        """Kernel value for no 2-path, exactly one 2-path, and a triangle."""
        c = self.c
        return np.array([0.0, -c, 1.0 - 3.0 * c])


@dataclass(frozen=True)
class SigmaEstimate:
    value: float
    std_error: float
    method: Literal["monte_carlo", "cubature"]
    samples_or_grid: int

    def to_json(self) -> dict:
        return asdict(self)


def clustering_coefficient(counts: GraphCounts) -> Optional[float]:
    """Ordered triangles over ordered 2-paths; ``None`` when there are no 2-paths."""
    if counts.ordered_paths == 0:
        return None
    return counts.ordered_triangles / counts.ordered_paths


def asymptotic_limit(kp: KernelParams) -> float:
    """``(3/4) (r1 - 2 r2)^2 / (r1 - r2)^2``, the limit of the clustering coefficient."""
    return kp.limit


def limit_from_lambda(lam: float) -> float:
    """The limit written in terms of ``lam = r1 / r2`` (``inf`` for r2 = 0)."""
    if math.isinf(lam):
        return 0.75
    if not lam > 2.0:
        raise RegimeViolation(f"need lambda > 2, got {lam}")
    return 0.75 * (lam - 2.0) ** 2 / (lam - 1.0) ** 2


def _adj(x, y, r1: float, r2: float):
    d = circle_distance(x, y)
    return ((d > r2) & (d < r1)).astype(np.float64)


def kernel_h(x1, x2, x3, kp: KernelParams):
    a12 = _adj(x1, x2, kp.r1, kp.r2)
    a13 = _adj(x1, x3, kp.r1, kp.r2)
    a23 = _adj(x2, x3, kp.r1, kp.r2)
    h = a12 * a13 * a23 - kp.c * (a12 * a13 + a12 * a23 + a13 * a23)
    return float(h) if np.ndim(h) == 0 else h


def sigma2_monte_carlo(kp: KernelParams, num_samples: int, seed: RngSeed) -> SigmaEstimate:
    """Plain Monte Carlo over i.i.d. uniform quadruples.

    The product ``h(X1,X2,X3) h(X1,X2,X4)`` takes at most nine values, so the
    sampler only tallies integer category counts; the estimate is then exact
    arithmetic on those counts and does not depend on the kernel backend.
    """
    if num_samples < 10_000:
        raise ValueError(f"num_samples must be at least 10^4, got {num_samples}")
    gen = seed.generator()
    table = np.zeros((3, 3), dtype=np.int64)
    remaining = int(num_samples)
    while remaining:
        m = min(_MC_CHUNK, remaining)
        table += _backend.kernels.kernel_category_counts(gen.random((4, m)), kp.r1, kp.r2)
        remaining -= m
    vals = kp.kernel_values()
    prod = np.outer(vals, vals)
    n = int(num_samples)
    mean = math.fsum((table * prod).ravel().tolist()) / n
    var = math.fsum((table * (prod - mean) ** 2).ravel().tolist()) / (n - 1)
    return SigmaEstimate(mean, math.sqrt(var / n), "monte_carlo", n)


def _cells(grid: int, breaks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Midpoints and widths of the uniform grid refined by ``breaks`` (rows)."""
    uniform = np.broadcast_to(np.arange(grid + 1) / grid, breaks.shape[:-1] + (grid + 1,))
    edges = np.sort(np.concatenate([uniform, np.mod(breaks, 1.0)], axis=-1), axis=-1)
    return 0.5 * (edges[..., 1:] + edges[..., :-1]), np.diff(edges, axis=-1)


def _offsets(kp: KernelParams) -> np.ndarray:
    return np.array([kp.r1, -kp.r1, kp.r2, -kp.r2])


def _outer_breaks(kp: KernelParams) -> np.ndarray:
    # adjacency to the anchor jumps at +-r; the annulus overlap length kinks
    # wherever two arc endpoints meet
    off = _offsets(kp)
    return np.concatenate([off, (off[:, None] - off[None, :]).ravel(), [0.5]])


def _outer_nodes(grid: int, kp: KernelParams) -> tuple[np.ndarray, np.ndarray]:
    """Two-point Gauss nodes on each refined outer cell.

    Between breakpoints the inner integral is linear in the outer offset, so
    its square is quadratic and two nodes per cell integrate it exactly.
    """
    mid, width = _cells(grid, _outer_breaks(kp)[None, :])
    mid, width = mid[0], width[0]
    keep = width > 0.0
    mid, width = mid[keep], width[keep]
    half_gap = width / (2.0 * math.sqrt(3.0))
    nodes = np.stack([mid - half_gap, mid + half_gap], axis=1).ravel()
    return nodes, np.repeat(0.5 * width, 2)


def conditional_terms(x1: float, kp: KernelParams, grid: int):
    """Outer nodes and the inner integrals of the four kernel terms.

    With the first point held at ``x1`` and the second at offset ``d`` from
    it, returns ``(weights, terms)`` where ``terms`` has rows
    ``int A12 A13 A23 dv, int A12 A13 dv, int A21 A23 dv, int A31 A32 dv``
    at each outer node.  The inner axis is the uniform ``grid`` refined by the
    integrand's discontinuities, so each midpoint sits inside one constant
    piece and the inner sums are exact.
    """
    if grid < 1:
        raise ValueError("grid must be positive")
    off = _offsets(kp)
    du, wu = _outer_nodes(grid, kp)
    terms = np.empty((4, du.size))
    for lo in range(0, du.size, _CUBATURE_BLOCK):
        d = du[lo : lo + _CUBATURE_BLOCK]
        breaks = np.concatenate(
            [np.broadcast_to(off, (d.size, 4)), d[:, None] + off[None, :]], axis=1
        )
        dv, wv = _cells(grid, breaks)
        u = np.mod(x1 + d, 1.0)[:, None]
        v = np.mod(x1 + dv, 1.0)
        a12 = _adj(x1, u, kp.r1, kp.r2)
        a13 = _adj(x1, v, kp.r1, kp.r2)
        a23 = _adj(u, v, kp.r1, kp.r2)
        terms[0, lo : lo + d.size] = (wv * a12 * a13 * a23).sum(axis=1)
        terms[1, lo : lo + d.size] = (wv * a12 * a13).sum(axis=1)
        terms[2, lo : lo + d.size] = (wv * a12 * a23).sum(axis=1)
        terms[3, lo : lo + d.size] = (wv * a13 * a23).sum(axis=1)
    return wu, terms


def conditional_moments(x1: float, kp: KernelParams, grid: int) -> dict[str, float]:
    """``E[. | X1 = x1]`` of the triangle term and the three 2-path terms."""
    wu, terms = conditional_terms(x1, kp, grid)
    names = ("triangle", "path_center_1", "path_center_2", "path_center_3")
    return {k: math.fsum((wu * row).tolist()) for k, row in zip(names, terms)}


def mean_h_conditional(x1: float, kp: KernelParams, grid: int) -> float:
    m = conditional_moments(x1, kp, grid)
    return m["triangle"] - kp.c * (
        m["path_center_1"] + m["path_center_2"] + m["path_center_3"]
    )


def sigma2_cubature(kp: KernelParams, grid: int) -> SigmaEstimate:
    """Cubature of ``E[h(0,U,V) h(0,U,W)]`` with the first point pinned at 0.

    Given ``U = u`` the factors in V and W are independent, so the product
    rule over (u, v, w) collapses to ``sum_u w_u g(u)^2`` with
    ``g(u) = sum_v w_v h(0, u, v)``.  The result is exact up to rounding
    whenever the breakpoint refinement captures every discontinuity.
    """
    if grid < 100:
        raise ValueError(f"grid must be at least 100, got {grid}")
    wu, terms = conditional_terms(0.0, kp, grid)
    g = terms[0] - kp.c * terms[1:].sum(axis=0)
    value = math.fsum((wu * g * g).tolist())
    return SigmaEstimate(value, 0.0, "cubature", int(grid))


def standardized_statistic(cn: float, params: AnnulusParams, sigma: SigmaEstimate) -> float:
    kp = KernelParams.from_params(params)
    if not sigma.value > 0.0:
        raise NonpositiveSigma(f"sigma^2 estimate must be positive, got {sigma.value}")
    scale = 2.0 * math.sqrt(2.0) * (params.r1 - params.r2) ** 2 * params.n
    return scale / (3.0 * math.sqrt(sigma.value)) * (cn - kp.limit)


def normal_cdf(z):
    """Standard normal CDF through the complementary error function."""
    if np.ndim(z) == 0:
        return 0.5 * math.erfc(-float(z) / math.sqrt(2.0))
    return 0.5 * np.vectorize(math.erfc, otypes=[float])(-np.asarray(z, float) / math.sqrt(2.0))


def ks_distance(samples) -> float:
    """Two-sided Kolmogorov-Smirnov distance to N(0, 1)."""
    x = np.sort(np.asarray(samples, dtype=np.float64).ravel())
    if x.size == 0:
        raise EmptySample("ks_distance needs at least one sample")
    if not np.all(np.isfinite(x)):
        raise ValueError("samples must be finite")
    n = x.size
    cdf = normal_cdf(x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n)))
