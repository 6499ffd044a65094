"""Finite-rank symmetric kernels on [0,1]^2 and graphon views of them.

A kernel is stored through its spectral expansion

    K(x, y) = sum_j lambda_j phi_j(x) phi_j(y) + sum_j lambda'_j phi'_j(x) phi'_j(y)

with positive eigenvalues lambda_1 > lambda_2 > ... > 0 and negative ones
lambda'_1 < lambda'_2 < ... < 0, all eigenfunctions orthonormal in L2[0,1].
The largest eigenvalue must be separated from the rest (spectral gap), and
degeneracy means the top eigenfunction is constant.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .basis import (
    KIND_CALLABLE,
    KIND_LEGENDRE,
    BasisFunction,
    callable_basis,
    shifted_legendre,
)
from .errors import DomainError, InvalidKernelError
from .quadrature import QuadratureRule, gauss_legendre, integrate_1d

GRID_SIZE = 512
ORTHONORMALITY_TOL = 1e-8
DEGENERACY_TOL = 1e-9


def validation_grid(size: int = GRID_SIZE) -> np.ndarray:
    """Uniform grid on [0, 1] (endpoints included) used by all grid checks."""
    return np.linspace(0.0, 1.0, size)


Component = tuple[float, BasisFunction]


@dataclass(frozen=True, eq=False)
class SpectralKernel:
    """Immutable finite-rank kernel; construct via make_spectral_kernel."""

    positive_components: tuple[Component, ...]
    negative_components: tuple[Component, ...]
    lipschitz_bound: float
    sup_bound: float
    _mean_cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def lambda1(self) -> float:
        return self.positive_components[0][0]

    @property
    def phi1(self) -> BasisFunction:
        return self.positive_components[0][1]

    @property
    def lambda2(self) -> float:
        """Second-largest eigenvalue of the operator (0 if rank-1 positive part)."""
        if len(self.positive_components) > 1:
            return self.positive_components[1][0]
        return 0.0

    @property
    def spectral_gap(self) -> float:
        return self.lambda1 - self.lambda2

    @property
    def components(self) -> tuple[Component, ...]:
        return self.positive_components + self.negative_components

    @property
    def rank(self) -> int:
        return len(self.components)

    def eigenvalues(self) -> tuple[float, ...]:
        """All nonzero eigenvalues, positives first (descending), then negatives (ascending)."""
        return tuple(lam for lam, _ in self.components)

    def evaluate(self, x, y):
        """K(x, y), vectorized over broadcastable arrays in [0, 1]."""
        xa = np.asarray(x, dtype=float)
        ya = np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast(xa, ya).shape)
        for lam, phi in self.components:
            out = out + lam * (phi(xa) * phi(ya))
        if out.ndim == 0:
            return float(out)
        return out

    def pairwise(self, xs: np.ndarray) -> np.ndarray:
        """Full matrix K(x_i, x_j) for a vector of points."""
        xs = np.asarray(xs, dtype=float)
        lams = np.array([lam for lam, _ in self.components])
        basis = np.stack([phi(xs) for _, phi in self.components])
        return (basis.T * lams) @ basis


def _check_domain(value: float, name: str) -> float:
    v = float(value)
    if not 0.0 <= v <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {v}")
    return v


def eval_kernel(kernel: SpectralKernel, x: float, y: float) -> float:
    """Scalar kernel evaluation with domain checks."""
    return kernel.evaluate(_check_domain(x, "x"), _check_domain(y, "y"))


def _gram_defect(functions: Sequence[BasisFunction], rule: QuadratureRule) -> float:
    """max |<phi_i, phi_j> - delta_ij| over all stored basis pairs."""
    vals = np.stack([phi(rule.nodes) for phi in functions])
    gram = (vals * rule.weights) @ vals.T
    return float(np.max(np.abs(gram - np.eye(len(functions)))))


def _legendre_only(components: Sequence[Component]) -> bool:
    return all(phi.kind == KIND_LEGENDRE for _, phi in components)


def _default_bounds(components: Sequence[Component]) -> tuple[float, float]:
    """Closed-form sup and Lipschitz bounds for pure Legendre expansions.

    sup |phi_k| = sqrt(2k+1) and sup |phi_k'| = sqrt(2k+1) k (k+1), both
    attained at the endpoints, so termwise triangle inequalities give valid
    (and at the corners tight) bounds.
    """
    sup = 0.0
    grad = 0.0
    for lam, phi in components:
        k = phi.degree
        sup += abs(lam) * (2 * k + 1)
        grad += abs(lam) * (2 * k + 1) * k * (k + 1)
    return sup, float(np.sqrt(2.0) * grad)


def _measured_bounds(components: Sequence[Component]) -> tuple[float, float]:
    """Grid-measured bounds (with headroom) for kernels with callable parts."""
    xs = validation_grid()
    lams = np.array([lam for lam, _ in components])
    basis = np.stack([phi(xs) for _, phi in components])
    grid = (basis.T * lams) @ basis
    sup = float(np.max(np.abs(grid)))
    h = float(xs[1] - xs[0])
    lip = float(np.max(np.abs(np.diff(grid, axis=0)))) / h
    return sup * (1.0 + 1e-6), lip * 1.5 + 1e-12


def make_spectral_kernel(
    positive_components: Sequence[Component],
    negative_components: Sequence[Component] = (),
    sup_bound: float | None = None,
    lipschitz_bound: float | None = None,
    rule: QuadratureRule | None = None,
) -> SpectralKernel:
    """Validate and freeze a spectral kernel.

    Checks the eigenvalue ordering of the expansion, the spectral gap, and
    pairwise orthonormality of all eigenfunctions (by quadrature, tolerance
    1e-8). Missing bounds are filled with closed-form values for Legendre
    expansions and measured ones otherwise.

    Raises
    ------
    InvalidKernelError
        If any structural assumption fails.
    """
    pos = tuple((float(lam), phi) for lam, phi in positive_components)
    neg = tuple((float(lam), phi) for lam, phi in negative_components)
    if not pos:
        raise InvalidKernelError("kernel needs at least one positive component")
    pvals = [lam for lam, _ in pos]
    if any(lam <= 0 for lam in pvals):
        raise InvalidKernelError("positive eigenvalues must be > 0")
    if any(a <= b for a, b in zip(pvals, pvals[1:])):
        raise InvalidKernelError("positive eigenvalues must be strictly decreasing")
    nvals = [lam for lam, _ in neg]
    if any(lam >= 0 for lam in nvals):
        raise InvalidKernelError("negative eigenvalues must be < 0")
    if any(a >= b for a, b in zip(nvals, nvals[1:])):
        raise InvalidKernelError("negative eigenvalues must be strictly increasing")
    lambda2 = pvals[1] if len(pvals) > 1 else 0.0
    if not pvals[0] - lambda2 > 0:
        raise InvalidKernelError("spectral gap must be positive")
    rule = rule or gauss_legendre()
    defect = _gram_defect([phi for _, phi in pos + neg], rule)
    if defect > ORTHONORMALITY_TOL:
        raise InvalidKernelError(
            f"basis functions not orthonormal: defect {defect:.3e} > {ORTHONORMALITY_TOL}"
        )
    all_comps = pos + neg
    if _legendre_only(all_comps):
        sup_default, lip_default = _default_bounds(all_comps)
    else:
        sup_default, lip_default = _measured_bounds(all_comps)
    return SpectralKernel(
        positive_components=pos,
        negative_components=neg,
        sup_bound=float(sup_bound) if sup_bound is not None else sup_default,
        lipschitz_bound=(
            float(lipschitz_bound) if lipschitz_bound is not None else lip_default
        ),
    )


def builtin_kernel(name: str) -> SpectralKernel:
    """The two bundled rank-3 example kernels.

    W1 has a non-constant top eigenfunction (Gaussian fluctuation regime);
    W2 has a constant one (degenerate regime). Both expand in the shifted
    Legendre basis.
    """
    if name == "W1":
        comps = [
            (1.0 / 2.0, shifted_legendre(1)),
            (1.0 / 9.0, shifted_legendre(2)),
            (1.0 / 30.0, shifted_legendre(3)),
        ]
    elif name == "W2":
        comps = [
            (1.0 / 5.0, shifted_legendre(0)),
            (1.0 / 9.0, shifted_legendre(1)),
            (1.0 / 30.0, shifted_legendre(2)),
        ]
    else:
        raise InvalidKernelError(f"unknown built-in kernel {name!r} (use W1 or W2)")
    return make_spectral_kernel(comps)


def constant_kernel(c: float) -> SpectralKernel:
    """K(x, y) = c, the rank-1 degenerate kernel c * phi_0 x phi_0.

    c = 0 is allowed as the empty graphon (every edge probability zero);
    it carries no spectral gap, so limit-law construction rejects it.
    """
    if c == 0.0:
        return SpectralKernel(
            positive_components=((0.0, shifted_legendre(0)),),
            negative_components=(),
            sup_bound=0.0,
            lipschitz_bound=0.0,
        )
    return make_spectral_kernel([(c, shifted_legendre(0))])


@dataclass(frozen=True, eq=False)
class GraphonView:
    """A kernel reinterpreted as an edge-probability function.

    range_mode "strict" requires values in [0, 1] wherever probabilities are
    actually formed; "clamp" clips out-of-range values and records how much
    was clipped.
    """

    kernel: SpectralKernel
    range_mode: str = "strict"

    def __post_init__(self):
        if self.range_mode not in ("strict", "clamp"):
            raise InvalidKernelError(
                f"range_mode must be 'strict' or 'clamp', got {self.range_mode!r}"
            )

    def evaluate(self, x, y):
        """Edge probability W(x, y); clipped to [0, 1] in clamp mode."""
        vals = self.kernel.evaluate(x, y)
        if self.range_mode == "clamp":
            return float(np.clip(vals, 0.0, 1.0)) if np.ndim(vals) == 0 else np.clip(vals, 0.0, 1.0)
        return vals

    def grid_range(self, size: int = GRID_SIZE) -> tuple[float, float]:
        """(min, max) of the raw kernel over the validation grid."""
        xs = validation_grid(size)
        grid = self.kernel.pairwise(xs)
        return float(grid.min()), float(grid.max())


def degree_function(
    kernel: SpectralKernel, x, rule: QuadratureRule | None = None
):
    """d_K(x) = integral of K(x, y) dy, via cached component means.

    The means m_j = integral of phi_j are computed once per quadrature rule
    and reused, so repeated calls cost one basis evaluation.
    """
    rule = rule or gauss_legendre()
    means = kernel._mean_cache.get(rule.order)
    if means is None:
        means = np.array(
            [integrate_1d(phi, rule) for _, phi in kernel.components]
        )
        kernel._mean_cache[rule.order] = means
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0) or np.any(xa > 1.0):
        raise DomainError("x must lie in [0, 1]")
    lams = np.array([lam for lam, _ in kernel.components])
    vals = np.stack([phi(xa) for _, phi in kernel.components])
    out = (lams * means) @ vals.reshape(len(lams), -1)
    out = out.reshape(xa.shape)
    return float(out) if out.ndim == 0 else out


def is_degenerate(kernel: SpectralKernel, tol: float = DEGENERACY_TOL) -> bool:
    """Whether the top eigenfunction is constant (checked on the grid)."""
    if tol <= 0:
        raise DomainError(f"tol must be > 0, got {tol}")
    xs = validation_grid()
    vals = kernel.phi1(xs)
    return bool(np.max(np.abs(vals - kernel.phi1(0.5))) <= tol)


@dataclass(frozen=True)
class ValidationReport:
    """Grid/quadrature diagnostics for the structural kernel assumptions.

    Never raised from; pass/fail is carried by the flags so callers can
    report violations (e.g. a graphon escaping [0, 1]) without crashing.
    """

    sup_measured: float
    sup_declared: float
    sup_ok: bool
    lipschitz_measured: float
    lipschitz_declared: float
    lipschitz_ok: bool
    spectral_gap: float
    gap_ok: bool
    orthonormality_defect: float
    orthonormality_ok: bool
    range_min: float
    range_max: float
    range_ok: bool
    strict_graphon: bool

    @property
    def passed(self) -> bool:
        core = (
            self.sup_ok and self.lipschitz_ok and self.gap_ok and self.orthonormality_ok
        )
        if self.strict_graphon:
            return core and self.range_ok
        return core

    def to_dict(self) -> dict:
        d = {}
        for k in self.__dataclass_fields__:
            v = getattr(self, k)
            d[k] = bool(v) if isinstance(v, (bool, np.bool_)) else float(v)
        d["passed"] = bool(self.passed)
        return d


def validate_assumptions(
    obj: SpectralKernel | GraphonView, rule: QuadratureRule | None = None
) -> ValidationReport:
    """Measure every structural assumption on the 512x512 grid.

    Accepts either a bare kernel or a graphon view; the range check is
    informational for kernels and binding (via `passed`) only for strict
    graphon views.
    """
    if isinstance(obj, GraphonView):
        kernel = obj.kernel
        strict_graphon = obj.range_mode == "strict"
    else:
        kernel = obj
        strict_graphon = False
    rule = rule or gauss_legendre()
    xs = validation_grid()
    grid = kernel.pairwise(xs)
    h = float(xs[1] - xs[0])
    sup_measured = float(np.max(np.abs(grid)))
    lip_measured = float(np.max(np.abs(np.diff(grid, axis=0)))) / h
    defect = _gram_defect([phi for _, phi in kernel.components], rule)
    rng_min = float(grid.min())
    rng_max = float(grid.max())
    slack = 1.0 + 1e-9
    return ValidationReport(
        sup_measured=sup_measured,
        sup_declared=kernel.sup_bound,
        sup_ok=sup_measured <= kernel.sup_bound * slack + 1e-12,
        lipschitz_measured=lip_measured,
        lipschitz_declared=kernel.lipschitz_bound,
        lipschitz_ok=lip_measured <= kernel.lipschitz_bound * slack + 1e-12,
        spectral_gap=kernel.spectral_gap,
        gap_ok=kernel.spectral_gap > 0,
        orthonormality_defect=defect,
        orthonormality_ok=defect <= ORTHONORMALITY_TOL,
        range_min=rng_min,
        range_max=rng_max,
        range_ok=rng_min >= -1e-12 and rng_max <= 1.0 + 1e-12,
        strict_graphon=strict_graphon,
    )


def kernel_to_json(kernel: SpectralKernel, graphon: bool = False) -> dict:
    """JSON-serializable description (Legendre components only)."""

    def enc(components):
        out = []
        for lam, phi in components:
            if phi.kind != KIND_LEGENDRE:
                raise InvalidKernelError(
                    "only shifted-legendre components can be serialized"
                )
            out.append(
                {"eigenvalue": lam, "basis": KIND_LEGENDRE, "degree": phi.degree}
            )
        return out

    return {
        "components": enc(kernel.positive_components),
        "negative_components": enc(kernel.negative_components),
        "sup_bound": kernel.sup_bound,
        "lipschitz_bound": kernel.lipschitz_bound,
        "graphon": bool(graphon),
    }


def kernel_from_json(obj: dict) -> tuple[SpectralKernel, bool]:
    """Parse a kernel description; returns (kernel, graphon flag)."""
    if not isinstance(obj, dict):
        raise InvalidKernelError("kernel description must be a JSON object")

    def dec(entries, label):
        comps = []
        for e in entries:
            if not isinstance(e, dict) or "eigenvalue" not in e:
                raise InvalidKernelError(f"malformed entry in {label}")
            basis_kind = e.get("basis", KIND_LEGENDRE)
            if basis_kind != KIND_LEGENDRE:
                raise InvalidKernelError(
                    f"unsupported basis {basis_kind!r} in {label}"
                )
            comps.append((float(e["eigenvalue"]), shifted_legendre(int(e["degree"]))))
        return comps

    kernel = make_spectral_kernel(
        dec(obj.get("components", []), "components"),
        dec(obj.get("negative_components", []), "negative_components"),
        sup_bound=obj.get("sup_bound"),
        lipschitz_bound=obj.get("lipschitz_bound"),
    )
    return kernel, bool(obj.get("graphon", False))


def read_kernel_file(path) -> tuple[SpectralKernel, bool]:
    """Load a kernel JSON file; returns (kernel, graphon flag)."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidKernelError(f"invalid kernel JSON: {exc}") from exc
    return kernel_from_json(obj)


def write_kernel_file(path, kernel: SpectralKernel, graphon: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(kernel_to_json(kernel, graphon=graphon), fh, indent=2)
        fh.write("\n")
