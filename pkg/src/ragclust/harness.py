"""Reproducible multi-replicate experiments.

Replicate ``k`` of a run samples its positions from the stream
``RngSeed(master_seed, k)``, so a record depends only on the ``ExperimentSpec`` and ``k``
and never on scheduling.  Workers are threads; the compiled kernels release
the GIL.
"""
from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Literal, Optional, Sequence

import numpy as np

from ._io import dumps_json, fmt_float
from .counting import count_graph
from .exceptions import InvalidParams, TooManyExclusions
from .model import AnnulusParams, RngSeed, sample_positions
from .stats import (
    KernelParams,
    SigmaEstimate,
    clustering_coefficient,
    ks_distance,
    sigma2_cubature,
    sigma2_monte_carlo,
    standardized_statistic,
)

log = logging.getLogger(__name__)

# desk-scale stand-ins for r1 = o(1) and n r1 = omega(1)
MAX_R1 = 0.1
MIN_N_R1 = 20.0
MAX_EXCLUDED_FRACTION = 0.10

# stream reserved for Monte Carlo sigma estimates; replicate streams count up from 0
SIGMA_STREAM = (1 << 64) - 1

DEFAULT_GRID = 400
DEFAULT_MC_SAMPLES = 10**8

QUANTILE_LEVELS = (0.01, 0.05, 0.25, 0.50, 0.75, 0.95, 0.99)
RECORD_HEADER = "replicate,seed,cn,ordered_triangles,ordered_paths,standardized,duration_ms"


def default_threads() -> int:
    env = os.environ.get("RAG_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class ExperimentSpec:
    params: AnnulusParams
    replicates: int
    master_seed: int = 1
    sigma_method: Literal["cubature", "monte_carlo"] = "cubature"
    sigma_budget: Optional[int] = None
    output_path: Optional[str] = None
    record_timing: bool = False

    def __post_init__(self) -> None:
        if self.replicates < 1:
            raise InvalidParams(f"replicates must be >= 1, got {self.replicates}")
        if self.sigma_method not in ("cubature", "monte_carlo"):
            raise InvalidParams(f"unknown sigma method {self.sigma_method!r}")
        RngSeed(self.master_seed)

    @property
    def budget(self) -> int:
        if self.sigma_budget is not None:
            return self.sigma_budget
        return DEFAULT_GRID if self.sigma_method == "cubature" else DEFAULT_MC_SAMPLES

    def check_clt_regime(self) -> None:
        """Reject parameters outside the limit theorem's desk-scale surrogate."""
        p = self.params
        KernelParams.from_params(p)
        if p.r1 > MAX_R1:
            raise InvalidParams(f"CLT runs need r1 <= {MAX_R1} (r1 = o(1)), got {p.r1}")
        if p.n * p.r1 < MIN_N_R1:
            raise InvalidParams(
                f"CLT runs need n*r1 >= {MIN_N_R1:g} (n r1 = omega(1)), got {p.n * p.r1:g}"
            )


@dataclass(frozen=True)
class ExperimentRecord:
    replicate_index: int
    seed: int
    stream_id: int
    cn: Optional[float]
    ordered_triangles: int
    ordered_paths: int
    standardized: Optional[float]
    duration_ms: float = field(compare=False)

    def csv_row(self, timing: bool) -> str:
        return ",".join(
            [
                str(self.replicate_index),
                str(self.seed),
                fmt_float(self.cn),
                str(self.ordered_triangles),
                str(self.ordered_paths),
                fmt_float(self.standardized),
                fmt_float(self.duration_ms) if timing else "",
            ]
        )


@dataclass(frozen=True)
class CltSummary:
    sample_count: int
    excluded_count: int
    mean: Optional[float]
    variance: Optional[float]
    ks_distance: Optional[float]
    quantiles: dict

    @property
    def sd(self) -> Optional[float]:
        return None if self.variance is None else math.sqrt(self.variance)

    def to_json(self) -> dict:
        return {
            "sample_count": self.sample_count,
            "excluded_count": self.excluded_count,
            "mean": self.mean,
            "variance": self.variance,
            "sd": self.sd,
            "ks_distance": self.ks_distance,
            "quantiles": self.quantiles,
        }

    def verdict(self) -> dict[str, bool]:
        """Checks against the finite-sample bands.

        KS uses the Kolmogorov 1% critical value 1.63/sqrt(R); mean and sd
        bands are +-0.2 at R = 300, scaled by sqrt(300/R).
        """
        if self.sample_count == 0:
            return {"ks": False, "mean": False, "sd": False}
        r = self.sample_count
        band = 0.2 * math.sqrt(300.0 / r)
        return {
            "ks": self.ks_distance <= 1.63 / math.sqrt(r),
            "mean": abs(self.mean) <= band,
            "sd": self.sd is not None and abs(self.sd - 1.0) <= band,
        }


def summarize(records: Sequence[ExperimentRecord]) -> CltSummary:
    z = np.array([r.standardized for r in records if r.standardized is not None], dtype=float)
    excluded = len(records) - z.size
    if z.size == 0:
        return CltSummary(0, excluded, None, None, None, {})
    var = float(np.var(z, ddof=1)) if z.size > 1 else 0.0
    qs = np.quantile(z, QUANTILE_LEVELS)
    return CltSummary(
        int(z.size),
        excluded,
        float(np.mean(z)),
        var,
        ks_distance(z),
        {f"{lvl:.2f}": float(q) for lvl, q in zip(QUANTILE_LEVELS, qs)},
    )


def estimate_sigma(spec: ExperimentSpec) -> SigmaEstimate:
    kp = KernelParams.from_params(spec.params)
    if spec.sigma_method == "cubature":
        return sigma2_cubature(kp, spec.budget)
    return sigma2_monte_carlo(kp, spec.budget, RngSeed(spec.master_seed, SIGMA_STREAM))


def run_replicate(
    spec: ExperimentSpec,
    k: int,
    sigma: Optional[SigmaEstimate],
    stream_id: Optional[int] = None,
) -> ExperimentRecord:
    """One sampled graph: counts, clustering coefficient, standardized value.

    ``sigma=None`` skips standardization (used outside the CLT regime).
    """
    if not 0 <= k < spec.replicates:
        raise IndexError(f"replicate {k} outside 0..{spec.replicates - 1}")
    stream = k if stream_id is None else stream_id
    t0 = time.perf_counter()
    ps = sample_positions(spec.params, RngSeed(spec.master_seed, stream))
    counts = count_graph(ps, spec.params)
    cn = clustering_coefficient(counts)
    z = None
    if cn is not None and sigma is not None:
        z = standardized_statistic(cn, spec.params, sigma)
    elapsed = (time.perf_counter() - t0) * 1e3
    return ExperimentRecord(
        k, spec.master_seed, stream, cn, counts.ordered_triangles, counts.ordered_paths, z, elapsed
    )


def _run_all(spec, sigma, threads, streams=None) -> list[ExperimentRecord]:
    ks = range(spec.replicates)
    streams = list(ks) if streams is None else list(streams)
    workers = max(1, int(threads or 1))
    if workers == 1:
        records = [run_replicate(spec, k, sigma, s) for k, s in zip(ks, streams)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda k, s: run_replicate(spec, k, sigma, s), ks, streams))
    records.sort(key=lambda r: r.replicate_index)
    for r in records:
        if r.cn is None:
            log.info("replicate %d excluded: no 2-paths, clustering coefficient undefined",
                     r.replicate_index)
    return records


def write_records(path, records: Iterable[ExperimentRecord], timing: bool = False) -> None:
    lines = [RECORD_HEADER] + [r.csv_row(timing) for r in records]
    Path(path).write_text("\n".join(lines) + "\n")


def write_summary(path, summary: CltSummary, spec: ExperimentSpec, sigma: SigmaEstimate) -> None:
    payload = {
        "n": spec.params.n,
        "r1": spec.params.r1,
        "r2": spec.params.r2,
        "replicates": spec.replicates,
        "master_seed": spec.master_seed,
        "sigma": sigma.to_json(),
        **summary.to_json(),
        "verdict": summary.verdict(),
    }
    Path(path).write_text(dumps_json(payload))


def run_clt_experiment(
    spec: ExperimentSpec, threads: Optional[int] = None
) -> tuple[CltSummary, list[ExperimentRecord], SigmaEstimate]:
    """Run every replicate, write the records file if requested, and summarize.

    Raises ``TooManyExclusions`` (after writing records) when more than 10%
    of replicates have no 2-paths.
    """
    spec.check_clt_regime()
    sigma = estimate_sigma(spec)
    records = _run_all(spec, sigma, threads)
    summary = summarize(records)
    if spec.output_path:
        write_records(spec.output_path, records, spec.record_timing)
    log.info("%d of %d replicates excluded", summary.excluded_count, spec.replicates)
    if summary.excluded_count > MAX_EXCLUDED_FRACTION * spec.replicates:
        raise TooManyExclusions(
            f"{summary.excluded_count} of {spec.replicates} replicates had no 2-paths; "
            "parameters are outside the theorem's effective regime"
        )
    return summary, records, sigma


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    limit: float
    replicates: int
    excluded: int
    mean_cn: float
    mean_abs_dev: float
    sd_abs_dev: float
    sd_cn: float


def run_convergence_experiment(
    base: ExperimentSpec, n_values: Sequence[int], threads: Optional[int] = None
) -> list[ConvergenceRow]:
    """Mean absolute deviation of C_n from its limit at each node count.

    Row ``i`` replicate ``k`` uses stream ``(i << 32) | k`` so that rows do
    not share position prefixes.
    """
    specs = [replace(base, params=replace(base.params, n=int(n))) for n in n_values]
    for s in specs:
        s.check_clt_regime()
    limit = KernelParams.from_params(base.params).limit
    rows = []
    for i, spec in enumerate(specs):
        streams = [(i << 32) | k for k in range(spec.replicates)]
        records = _run_all(spec, None, threads, streams)
        cn = np.array([r.cn for r in records if r.cn is not None], dtype=float)
        excluded = len(records) - cn.size
        if excluded > MAX_EXCLUDED_FRACTION * spec.replicates:
            raise TooManyExclusions(f"n={spec.params.n}: {excluded} replicates excluded")
        dev = np.abs(cn - limit)
        rows.append(
            ConvergenceRow(
                spec.params.n,
                limit,
                int(cn.size),
                excluded,
                float(cn.mean()),
                float(dev.mean()),
                float(dev.std(ddof=1)) if cn.size > 1 else 0.0,
                float(cn.std(ddof=1)) if cn.size > 1 else 0.0,
            )
        )
    return rows


@dataclass(frozen=True)
class SigmaScalingRow:
    r1: float
    r2: float
    method: str
    sigma2: float
    std_error: float
    ratio: float
    ratio_se: float


def run_sigma_scaling(
    lam: float,
    r1_values: Sequence[float],
    budget: int = DEFAULT_GRID,
    method: Literal["cubature", "monte_carlo"] = "cubature",
    seed: RngSeed = RngSeed(0, SIGMA_STREAM),
) -> list[SigmaScalingRow]:
    """sigma2 and sigma2 / r1^3 along r2 = r1 / lam."""
    if not lam > 2.0:
        raise InvalidParams(f"lambda must exceed 2, got {lam}")
    rows = []
    for r1 in r1_values:
        if not 0.0 < r1 <= MAX_R1:
            raise InvalidParams(f"sigma scaling needs 0 < r1 <= {MAX_R1}, got {r1}")
        kp = KernelParams(float(r1), float(r1) / lam)
        if method == "cubature":
            est = sigma2_cubature(kp, budget)
        else:
            est = sigma2_monte_carlo(kp, budget, seed)
        cube = kp.r1**3
        rows.append(
            SigmaScalingRow(kp.r1, kp.r2, method, est.value, est.std_error,
                            est.value / cube, est.std_error / cube)
        )
    return rows
