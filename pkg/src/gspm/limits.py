"""Asymptotic laws for the largest eigenvalue and the statistics they describe.

Two regimes, decided by whether the top eigenfunction phi_1 is constant:

* non-degenerate: sqrt(n) (lambda_1(M_n)/n - lambda_1) is asymptotically
  N(0, lambda_1^2 Var(phi_1^2(U))), sampled here as a plain Gaussian;
* degenerate: lambda_1(M_n) - (n-1) lambda_1 converges to the weighted
  chi-squared combination sum_l w_l (Z_l^2 - 1) + s over the remaining
  spectrum, with w_l = lambda_1 lambda_l / (lambda_1 - lambda_l) and
  s = sum_l lambda_l^2 / (lambda_1 - lambda_l).

Keeping the diagonal K(U_i, U_i) in the degenerate case absorbs one extra
lambda_1 into the centering: lambda_1(M_n) - n lambda_1 converges to the
uncentered sum_l w_l Z_l^2 (shift 0). Adjacency sampling adds an independent
N(alpha, sigma^2) edge-noise term on top of the degenerate law.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    GraphonRangeError,
    InvalidKernelError,
    SizeError,
)
from .kernels import (
    GraphonView,
    SpectralKernel,
    is_degenerate,
    validate_assumptions,
)
from .quadrature import QuadratureRule, gauss_legendre, integrate_1d, integrate_2d
from .rng import normal_generator

VARIANT_GAUSSIAN = "gaussian"
VARIANT_CHISQ = "weighted-chisq"
VARIANT_GRAPH = "graph-degenerate"

CENTER_LLN = "lln-normal"
CENTER_SHIFT = "degenerate-shift"
CENTER_DIAG = "diag-shift"

NYSTROM_TRUNCATION = 64
TAIL_GUARD = 1e-3


@dataclass(frozen=True)
class LimitLaw:
    """One of three limit laws.

    gaussian: N(mean, variance), weights/shift unused.
    weighted-chisq: sum_l weights[l] * (Z_l^2 - 1) + shift when centered,
        sum_l weights[l] * Z_l^2 + shift when not.
    graph-degenerate: the centered weighted-chisq part plus an independent
        N(mean, variance); here mean and variance play the roles of alpha
        and sigma^2.
    """

    variant: str
    mean: float = 0.0
    variance: float = 0.0
    weights: tuple[float, ...] = ()
    shift: float = 0.0
    centered: bool = True

    def __post_init__(self):
        if self.variant not in (VARIANT_GAUSSIAN, VARIANT_CHISQ, VARIANT_GRAPH):
            raise DomainError(f"unknown law variant {self.variant!r}")
        if self.variance < 0:
            raise DomainError("variance must be >= 0")
        if not np.all(np.isfinite(self.weights)):
            raise DomainError("weights must be finite")

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "mean": self.mean,
            "variance": self.variance,
            "weights": list(self.weights),
            "shift": self.shift,
            "centered": self.centered,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LimitLaw":
        return cls(
            variant=d["variant"],
            mean=float(d.get("mean", 0.0)),
            variance=float(d.get("variance", 0.0)),
            weights=tuple(float(w) for w in d.get("weights", ())),
            shift=float(d.get("shift", 0.0)),
            centered=bool(d.get("centered", True)),
        )


@dataclass(frozen=True)
class StatisticSpec:
    """How a raw largest eigenvalue at size n becomes the studied scalar."""

    centering: str
    description: str


def apply_statistic(
    spec: StatisticSpec, lambda1_raw: float, n: int, lambda1_K: float
) -> float:
    if n < 2:
        raise SizeError(f"need n >= 2, got {n}")
    if spec.centering == CENTER_LLN:
        return float(np.sqrt(n) * (lambda1_raw / n - lambda1_K))
    if spec.centering == CENTER_SHIFT:
        return float(lambda1_raw - (n - 1) * lambda1_K)
    if spec.centering == CENTER_DIAG:
        return float(lambda1_raw - n * lambda1_K)
    raise DomainError(f"unknown centering {spec.centering!r}")


def var_phi1_squared(
    kernel: SpectralKernel, rule: QuadratureRule | None = None
) -> float:
    """Var(phi_1^2(U)) = int phi_1^4 - (int phi_1^2)^2 by quadrature."""
    rule = rule or gauss_legendre()
    phi1 = kernel.phi1
    fourth = integrate_1d(lambda x: phi1(x) ** 4, rule)
    second = integrate_1d(lambda x: phi1(x) ** 2, rule)
    return float(fourth - second**2)


def gaussian_variance(
    kernel: SpectralKernel, rule: QuadratureRule | None = None
) -> float:
    """lambda_1^2 Var(phi_1^2(U)), the non-degenerate limit variance."""
    return kernel.lambda1**2 * var_phi1_squared(kernel, rule)


def _chisq_terms(lambda1: float, others) -> tuple[tuple[float, ...], float]:
    weights = []
    shift = 0.0
    for lam in others:
        gap = lambda1 - lam
        if gap <= 0 or abs(gap) < 1e-12 * max(1.0, abs(lambda1)):
            raise InvalidKernelError(
                f"eigenvalue {lam} too close to lambda_1 = {lambda1}; no spectral gap"
            )
        weights.append(lambda1 * lam / gap)
        shift += lam**2 / gap
    return tuple(weights), float(shift)


def chisq_weights(kernel: SpectralKernel) -> tuple[tuple[float, ...], float]:
    """Weights w_l and shift s of the degenerate law over the non-top spectrum.

    Finite rank makes the sums exact: eigenvalues absent from the expansion
    are 0 and contribute nothing.
    """
    lams = kernel.eigenvalues()
    return _chisq_terms(lams[0], lams[1:])


def chisq_law_from_spectrum(
    eigenvalues,
    diagonal_mode: str = "zeroed",
    truncation_rank: int = NYSTROM_TRUNCATION,
) -> LimitLaw:
    """Degenerate law from an estimated (not stored) spectrum.

    Estimated spectra carry a full grid of eigenvalues, most of them noise,
    so the list is truncated to the largest truncation_rank by modulus. The
    diagonal-included variant needs a summable spectrum; a visible relative
    |lambda| tail (> 1e-3) means truncation is not trustworthy and the
    spectrum is rejected.
    """
    lams = [float(x) for x in eigenvalues]
    if not lams:
        raise InvalidKernelError("empty spectrum")
    lambda1 = max(lams)
    rest = sorted((x for x in lams if x != lambda1), key=abs, reverse=True)
    if len(rest) == len(lams):
        raise InvalidKernelError("spectrum has no unique largest eigenvalue")
    total = sum(abs(x) for x in rest)
    kept = rest[:truncation_rank]
    if diagonal_mode == "included" and total > 0:
        # summability guard: what truncation discards, and whether the kept
        # sequence has visibly died out by the truncation point
        tail = (total - sum(abs(x) for x in kept)) / total
        last = abs(kept[-1]) / total if len(kept) == truncation_rank else 0.0
        if tail > TAIL_GUARD or last > TAIL_GUARD:
            raise InvalidKernelError(
                "spectrum does not visibly converge; refusing the diagonal-included law"
            )
    weights, shift = _chisq_terms(lambda1, kept)
    if diagonal_mode == "included":
        return LimitLaw(
            variant=VARIANT_CHISQ, weights=weights, shift=0.0, centered=False
        )
    return LimitLaw(variant=VARIANT_CHISQ, weights=weights, shift=shift, centered=True)


def kernel_limit_law(
    kernel: SpectralKernel, diagonal_mode: str = "zeroed"
) -> tuple[LimitLaw, StatisticSpec]:
    """Limit law and matching statistic for a sampled kernel matrix.

    Non-degenerate kernels get the Gaussian law with the sqrt(n) LLN
    statistic regardless of the diagonal (the diagonal's O(1) contribution
    vanishes under the 1/n scaling). Degenerate kernels get the weighted
    chi-squared law: centered terms with shift s when the diagonal is
    zeroed, uncentered terms (shift 0) with n lambda_1 centering when it is
    kept.
    """
    if diagonal_mode not in ("zeroed", "included"):
        raise DomainError(f"unknown diagonal_mode {diagonal_mode!r}")
    report = validate_assumptions(kernel)
    if not (report.gap_ok and report.orthonormality_ok):
        raise InvalidKernelError(
            "kernel fails structural assumptions: "
            f"gap_ok={report.gap_ok}, orthonormality_ok={report.orthonormality_ok}"
        )
    if not is_degenerate(kernel):
        law = LimitLaw(
            variant=VARIANT_GAUSSIAN, mean=0.0, variance=gaussian_variance(kernel)
        )
        return law, StatisticSpec(
            CENTER_LLN, "sqrt(n) * (lambda_1/n - lambda_1(K))"
        )
    weights, shift = chisq_weights(kernel)
    if diagonal_mode == "included":
        law = LimitLaw(
            variant=VARIANT_CHISQ, weights=weights, shift=0.0, centered=False
        )
        return law, StatisticSpec(CENTER_DIAG, "lambda_1 - n * lambda_1(K)")
    law = LimitLaw(variant=VARIANT_CHISQ, weights=weights, shift=shift, centered=True)
    return law, StatisticSpec(CENTER_SHIFT, "lambda_1 - (n-1) * lambda_1(K)")


def graph_limit_law(
    graphon: GraphonView, rule: QuadratureRule | None = None
) -> tuple[LimitLaw, StatisticSpec]:
    """Limit law and statistic for adjacency matrices sampled from a graphon.

    Degenerate graphons add the independent edge-noise Gaussian
    N(alpha, sigma^2) on top of the weighted chi-squared law, with

        alpha  = (1/lambda_1) int int (phi_1(x)^2 + phi_1(y)^2)/2 * W(1-W)
        sigma^2 = 2 int int phi_1(x)^2 phi_1(y)^2 * W(1-W)

    computed by quadrature through the view (so clamp mode integrates the
    actual edge probabilities). Non-degenerate graphons share the kernel
    Gaussian law.
    """
    rule = rule or gauss_legendre()
    kernel = graphon.kernel
    if graphon.range_mode == "strict":
        lo, hi = graphon.grid_range()
        if lo < -1e-12 or hi > 1.0 + 1e-12:
            raise GraphonRangeError(
                f"graphon range [{lo:.4f}, {hi:.4f}] leaves [0, 1]; "
                "use clamp mode to clip"
            )
    if not is_degenerate(kernel):
        law = LimitLaw(
            variant=VARIANT_GAUSSIAN, mean=0.0, variance=gaussian_variance(kernel, rule)
        )
        return law, StatisticSpec(
            CENTER_LLN, "sqrt(n) * (lambda_1/n - lambda_1(W))"
        )
    weights, shift = chisq_weights(kernel)
    phi1 = kernel.phi1
    lambda1 = kernel.lambda1

    def edge_var(x, y):
        w = graphon.evaluate(x, y)
        return w * (1.0 - w)

    alpha = (
        integrate_2d(
            lambda x, y: 0.5 * (phi1(x) ** 2 + phi1(y) ** 2) * edge_var(x, y), rule
        )
        / lambda1
    )
    sigma2 = 2.0 * integrate_2d(
        lambda x, y: (phi1(x) ** 2) * (phi1(y) ** 2) * edge_var(x, y), rule
    )
    law = LimitLaw(
        variant=VARIANT_GRAPH,
        mean=float(alpha),
        variance=float(sigma2),
        weights=weights,
        shift=shift,
        centered=True,
    )
    return law, StatisticSpec(CENTER_SHIFT, "lambda_1 - (n-1) * lambda_1(W)")


def sample_limit_law(law: LimitLaw, count: int, seed: int) -> np.ndarray:
    """count i.i.d. draws from the law, deterministic per seed."""
    if count < 1:
        raise SizeError(f"count must be >= 1, got {count}")
    gen = normal_generator(seed)
    if law.variant == VARIANT_GAUSSIAN:
        return law.mean + np.sqrt(law.variance) * gen.standard_normal(count)
    r = len(law.weights)
    w = np.asarray(law.weights)
    if r:
        z = gen.standard_normal((count, r))
        sq = z**2 - 1.0 if law.centered else z**2
        samples = sq @ w + law.shift
    else:
        samples = np.full(count, law.shift)
    if law.variant == VARIANT_GRAPH:
        samples = samples + law.mean + np.sqrt(law.variance) * gen.standard_normal(count)
    return samples


def law_moments(law: LimitLaw) -> tuple[float, float]:
    """Exact (mean, variance) of the law."""
    w = np.asarray(law.weights)
    chisq_var = float(2.0 * np.sum(w**2))
    if law.variant == VARIANT_GAUSSIAN:
        return law.mean, law.variance
    if law.variant == VARIANT_CHISQ:
        mean = law.shift if law.centered else float(np.sum(w)) + law.shift
        return mean, chisq_var
    return law.shift + law.mean, chisq_var + law.variance
