"""Seeded Monte Carlo over the largest-eigenvalue statistics.

A run repeats R times: draw a batch of uniforms, build the matrix the mode
asks for, take its largest eigenvalue, apply the centering that matches the
limit law. Replication r uses seeds derived from (master_seed, r) in
disjoint domains for the batch and the edges, so results are independent of
execution order and worker count; BLAS threading is pinned to one thread
inside the runner for bit-identical parallel runs.
"""
from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from .errors import DomainError, ExperimentError, GspmError, SizeError
from .kernels import GraphonView, SpectralKernel, builtin_kernel, read_kernel_file
from .limits import (
    LimitLaw,
    StatisticSpec,
    apply_statistic,
    graph_limit_law,
    kernel_limit_law,
    law_moments,
    sample_limit_law,
)
from .rng import derive_seed
from .sampling import (
    DIAG_INCLUDED,
    DIAG_ZEROED,
    SampleBatch,
    build_adjacency_matrix,
    build_kernel_matrix,
    sample_uniform,
)
from .spectra import top_k_eigen

MODE_KERNEL_ZEROED = "kernel-zeroed"
MODE_KERNEL_DIAG = "kernel-diag"
MODE_GRAPH = "graph"
MODES = (MODE_KERNEL_ZEROED, MODE_KERNEL_DIAG, MODE_GRAPH)

# disjoint seed-derivation domains
_DOMAIN_BATCH = 0xB47C
_DOMAIN_EDGES = 0xED6E
_DOMAIN_LIMIT = 0x11F7


@dataclass
class ExperimentConfig:
    """Everything a run needs; serializable to/from a single JSON object."""

    kernel_name: str | None = None
    kernel_file: str | None = None
    mode: str = MODE_KERNEL_ZEROED
    n: int = 100
    replications: int = 500
    master_seed: int = 0
    limit_samples: int = 100_000
    histogram_bins: int = 40
    clamp: bool = False
    ks_threshold: float = 0.15

    def __post_init__(self):
        if (self.kernel_name is None) == (self.kernel_file is None):
            raise DomainError("exactly one of kernel_name / kernel_file is required")
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.n < 2:
            raise SizeError(f"n must be >= 2, got {self.n}")
        if self.replications < 1:
            raise SizeError(f"replications must be >= 1, got {self.replications}")
        if self.limit_samples < 1000:
            raise SizeError(
                f"limit_samples must be >= 1000, got {self.limit_samples}"
            )
        if self.histogram_bins < 1:
            raise SizeError(f"histogram_bins must be >= 1, got {self.histogram_bins}")
        if not 0 < self.ks_threshold <= 1:
            raise DomainError(
                f"ks_threshold must be in (0, 1], got {self.ks_threshold}"
            )

    def to_dict(self) -> dict:
        d = {
            "kernel": self.kernel_name or {"file": self.kernel_file},
            "mode": self.mode,
            "n": self.n,
            "replications": self.replications,
            "master_seed": self.master_seed,
            "limit_samples": self.limit_samples,
            "histogram_bins": self.histogram_bins,
            "clamp": self.clamp,
            "ks_threshold": self.ks_threshold,
        }
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise DomainError("experiment config must be a JSON object")
        known = {
            "kernel",
            "mode",
            "n",
            "replications",
            "master_seed",
            "limit_samples",
            "histogram_bins",
            "clamp",
            "ks_threshold",
        }
        unknown = set(d) - known
        if unknown:
            raise DomainError(f"unknown config keys: {sorted(unknown)}")
        kernel = d.get("kernel")
        name = None
        path = None
        if isinstance(kernel, str):
            name = kernel
        elif isinstance(kernel, dict) and "file" in kernel:
            path = kernel["file"]
        else:
            raise DomainError("config 'kernel' must be a name or {\"file\": path}")
        return cls(
            kernel_name=name,
            kernel_file=path,
            mode=d.get("mode", MODE_KERNEL_ZEROED),
            n=int(d.get("n", 100)),
            replications=int(d.get("replications", 500)),
            master_seed=int(d.get("master_seed", 0)),
            limit_samples=int(d.get("limit_samples", 100_000)),
            histogram_bins=int(d.get("histogram_bins", 40)),
            clamp=bool(d.get("clamp", False)),
            ks_threshold=float(d.get("ks_threshold", 0.15)),
        )

    @classmethod
    def from_json_file(cls, path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                return cls.from_dict(json.load(fh))
            except json.JSONDecodeError as exc:
                raise DomainError(f"invalid config JSON: {exc}") from exc


def resolve_kernel(
    config: ExperimentConfig,
) -> tuple[SpectralKernel, GraphonView | None]:
    """Kernel (and graphon view for graph mode) named by the config."""
    if config.kernel_name is not None:
        kernel = builtin_kernel(config.kernel_name)
    else:
        kernel, _ = read_kernel_file(config.kernel_file)
    if config.mode == MODE_GRAPH:
        view = GraphonView(kernel, "clamp" if config.clamp else "strict")
        return kernel, view
    return kernel, None


def config_law(config: ExperimentConfig) -> tuple[LimitLaw, StatisticSpec]:
    """The limit law and statistic the config's mode calls for."""
    kernel, view = resolve_kernel(config)
    if config.mode == MODE_GRAPH:
        return graph_limit_law(view)
    diag = DIAG_INCLUDED if config.mode == MODE_KERNEL_DIAG else DIAG_ZEROED
    return kernel_limit_law(kernel, diag)


@dataclass(frozen=True, eq=False)
class ExperimentRun:
    """Result payload: one statistic and raw eigenvalue per replication."""

    statistics: np.ndarray
    lambda1_raw: np.ndarray
    rep_seeds: tuple[int, ...]
    config: ExperimentConfig
    law: LimitLaw
    statistic: StatisticSpec
    wall_time: float


def _replicate(kernel, view, config, r):
    rep_seed = derive_seed(config.master_seed, _DOMAIN_BATCH, r)
    try:
        batch = sample_uniform(config.n, rep_seed)
        if config.mode == MODE_GRAPH:
            edge_seed = derive_seed(config.master_seed, _DOMAIN_EDGES, r)
            matrix = build_adjacency_matrix(view, batch, edge_seed)
        elif config.mode == MODE_KERNEL_DIAG:
            matrix = build_kernel_matrix(kernel, batch, DIAG_INCLUDED)
        else:
            matrix = build_kernel_matrix(kernel, batch, DIAG_ZEROED)
        lam = top_k_eigen(matrix, 1)[0].value
    except GspmError as exc:
        raise ExperimentError(
            f"replication {r}: {exc}", replication=r
        ) from exc
    return rep_seed, lam


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentRun:
    """Run all replications; identical output for any worker count.

    wall_time is the one field that is not reproducible; everything else is
    a pure function of (config, master_seed).
    """
    if workers < 1:
        raise SizeError(f"workers must be >= 1, got {workers}")
    kernel, view = resolve_kernel(config)
    law, spec = config_law(config)
    start = time.perf_counter()
    reps = range(config.replications)
    with threadpool_limits(limits=1):
        if workers == 1:
            results = [_replicate(kernel, view, config, r) for r in reps]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(
                    pool.map(lambda r: _replicate(kernel, view, config, r), reps)
                )
    seeds = tuple(seed for seed, _ in results)
    raw = np.array([lam for _, lam in results])
    stats = np.array(
        [apply_statistic(spec, lam, config.n, kernel.lambda1) for lam in raw]
    )
    return ExperimentRun(
        statistics=stats,
        lambda1_raw=raw,
        rep_seeds=seeds,
        config=config,
        law=law,
        statistic=spec,
        wall_time=time.perf_counter() - start,
    )


def compute_T_statistics(
    kernel: SpectralKernel, batch: SampleBatch, lambda1_raw: float
) -> tuple[float, float]:
    """Diagnostic decomposition statistics of the largest eigenvalue.

    T1 = (lambda_1 / lambda1_raw) * sum_l lambda_l * sum_i phi_1(U_i)^2 phi_l(U_i)^2
    over every component, and
    T2 = (lambda_1 / lambda1_raw) * sum_{l >= 2} w_l * (sum_i phi_1(U_i) phi_l(U_i))^2
    with w_l = lambda_1 lambda_l / (lambda_1 - lambda_l) over the non-top
    components (negative ones included).
    """
    if lambda1_raw <= 0:
        raise DomainError(f"lambda1_raw must be > 0, got {lambda1_raw}")
    lam1 = kernel.lambda1
    phi1_vals = kernel.phi1(batch.values)
    phi1_sq = phi1_vals**2
    t1 = 0.0
    t2 = 0.0
    for idx, (lam, phi) in enumerate(kernel.components):
        vals = phi(batch.values)
        t1 += lam * float(phi1_sq @ (vals**2))
        if idx > 0:
            w = lam1 * lam / (lam1 - lam)
            t2 += w * float(phi1_vals @ vals) ** 2
    scale = lam1 / lambda1_raw
    return scale * t1, scale * t2


def ks_distance(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov sup-distance between empirical CDFs."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise SizeError("ks_distance needs non-empty samples")
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / a.size
    cdf_b = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.max(np.abs(cdf_a - cdf_b)))


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    """Empirical-vs-limit comparison: KS distance, moments, histograms."""

    ks_distance: float
    ks_threshold: float
    empirical_mean: float
    empirical_variance: float
    law_mean: float
    law_variance: float
    bin_edges: np.ndarray
    empirical_counts: np.ndarray
    limit_counts: np.ndarray

    @property
    def ks_pass(self) -> bool:
        return self.ks_distance <= self.ks_threshold

    @property
    def passed(self) -> bool:
        return self.ks_pass

    def to_dict(self) -> dict:
        return {
            "ks_distance": self.ks_distance,
            "ks_threshold": self.ks_threshold,
            "ks_pass": self.ks_pass,
            "passed": self.passed,
            "empirical_mean": self.empirical_mean,
            "empirical_variance": self.empirical_variance,
            "law_mean": self.law_mean,
            "law_variance": self.law_variance,
            "bin_edges": self.bin_edges.tolist(),
            "empirical_counts": self.empirical_counts.tolist(),
            "limit_counts": self.limit_counts.tolist(),
        }


def compare(run: ExperimentRun, law: LimitLaw, limit_seed: int) -> ComparisonReport:
    """Draw limit samples and score the run against them.

    The limit stream is seeded in a domain disjoint from the replication
    seeds, so empirical and reference samples never share randomness.
    """
    limit = sample_limit_law(
        law, run.config.limit_samples, derive_seed(limit_seed, _DOMAIN_LIMIT)
    )
    stats = run.statistics
    lo = float(min(stats.min(), limit.min()))
    hi = float(max(stats.max(), limit.max()))
    if lo == hi:
        lo -= 0.5
        hi += 0.5
    edges = np.linspace(lo, hi, run.config.histogram_bins + 1)
    emp_counts, _ = np.histogram(stats, bins=edges)
    lim_counts, _ = np.histogram(limit, bins=edges)
    mean, variance = law_moments(law)
    return ComparisonReport(
        ks_distance=ks_distance(stats, limit),
        ks_threshold=run.config.ks_threshold,
        empirical_mean=float(stats.mean()),
        empirical_variance=float(stats.var(ddof=1)) if stats.size > 1 else 0.0,
        law_mean=mean,
        law_variance=variance,
        bin_edges=edges,
        empirical_counts=emp_counts,
        limit_counts=lim_counts,
    )


def run_to_csv(run: ExperimentRun, path) -> None:
    """One row per replication: rep, seed, lambda1_raw, statistic."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("rep,seed,lambda1_raw,statistic\n")
        for r in range(len(run.statistics)):
            fh.write(
                f"{r},{run.rep_seeds[r]},"
                f"{float(run.lambda1_raw[r])!r},{float(run.statistics[r])!r}\n"
            )


def histogram_csv(report: ComparisonReport, path, which: str) -> None:
    """Two columns: bin center, count. which selects empirical or limit."""
    counts = {
        "empirical": report.empirical_counts,
        "limit": report.limit_counts,
    }[which]
    centers = 0.5 * (report.bin_edges[:-1] + report.bin_edges[1:])
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("bin_center,count\n")
        for c, v in zip(centers, counts):
            fh.write(f"{float(c)!r},{int(v)}\n")
