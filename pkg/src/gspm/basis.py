"""Orthonormal basis functions on [0, 1].

The built-in family is the shifted Legendre system: phi_k(x) =
sqrt(2k + 1) * P_k(2x - 1), which is orthonormal in L2[0, 1] and satisfies
phi_0 = 1, phi_1 = sqrt(3)(2x - 1), phi_2 = sqrt(5)(6x^2 - 6x + 1), ...
Arbitrary callables can be wrapped as well; orthonormality of those is the
caller's responsibility (kernel construction re-checks it by quadrature).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DomainError, UnsupportedDegreeError

MAX_DEGREE = 32

KIND_LEGENDRE = "shifted-legendre"
KIND_CALLABLE = "tabulated-callable"


@lru_cache(maxsize=None)
def _legendre_monomial_coeffs(degree: int) -> tuple[Fraction, ...]:
    """Exact monomial coefficients of P_degree(2x - 1), lowest power first.

    Bonnet recurrence carried out in rational arithmetic:
    (k + 1) P_{k+1}(t) = (2k + 1) t P_k(t) - k P_{k-1}(t) with t = 2x - 1.
    """
    prev = (Fraction(1),)
    if degree == 0:
        return prev
    cur = (Fraction(-1), Fraction(2))
    for k in range(1, degree):
        # t * P_k expressed in x: (2x - 1) * cur
        shifted = [Fraction(0)] * (len(cur) + 1)
        for i, c in enumerate(cur):
            shifted[i + 1] += 2 * c
            shifted[i] -= c
        nxt = [Fraction(2 * k + 1) * c for c in shifted]
        for i, c in enumerate(prev):
            nxt[i] -= Fraction(k) * c
        cur, prev = tuple(c / (k + 1) for c in nxt), cur
    return cur


def shifted_legendre_coefficients(degree: int) -> np.ndarray:
    """L2-normalized monomial coefficients of phi_degree, lowest power first."""
    if not 0 <= degree <= MAX_DEGREE:
        raise UnsupportedDegreeError(
            f"degree must be in [0, {MAX_DEGREE}], got {degree}"
        )
    scale = np.sqrt(2 * degree + 1)
    return np.array([float(c) for c in _legendre_monomial_coeffs(degree)]) * scale


def _legendre_values(degree: int, x: np.ndarray) -> np.ndarray:
    """Evaluate phi_degree by the three-term recurrence (numerically stable)."""
    t = 2.0 * x - 1.0
    p_prev = np.ones_like(t)
    if degree == 0:
        return p_prev
    p = t.copy()
    for k in range(1, degree):
        p, p_prev = ((2 * k + 1) * t * p - k * p_prev) / (k + 1), p
    return np.sqrt(2 * degree + 1) * p


@dataclass(frozen=True, eq=False)
class BasisFunction:
    """A real function on [0, 1], evaluable on scalars and arrays."""

    kind: str
    degree: int | None = None
    coefficients: np.ndarray | None = None
    func: Callable[[np.ndarray], np.ndarray] | None = field(default=None, repr=False)

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise DomainError("basis functions are defined on [0, 1]")
        if self.kind == KIND_LEGENDRE:
            vals = _legendre_values(self.degree, arr)
        else:
            vals = np.asarray(self.func(arr), dtype=float)
        return float(vals) if arr.ndim == 0 else vals


def shifted_legendre(degree: int) -> BasisFunction:
    """The degree-th orthonormal shifted Legendre polynomial."""
    if not 0 <= degree <= MAX_DEGREE:
        raise UnsupportedDegreeError(
            f"degree must be in [0, {MAX_DEGREE}], got {degree}"
        )
    coeffs = shifted_legendre_coefficients(degree)
    coeffs.setflags(write=False)
    return BasisFunction(kind=KIND_LEGENDRE, degree=degree, coefficients=coeffs)


def callable_basis(func: Callable, degree: int | None = None) -> BasisFunction:
    """Wrap an arbitrary vectorized function as a basis element."""
    return BasisFunction(kind=KIND_CALLABLE, degree=degree, func=func)


def shifted_legendre_eval(degree: int, x: float) -> float:
    """Scalar evaluation with degree and domain checks."""
    if not 0 <= degree <= MAX_DEGREE:
        raise UnsupportedDegreeError(
            f"degree must be in [0, {MAX_DEGREE}], got {degree}"
        )
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x}")
    return float(_legendre_values(degree, np.asarray(x, dtype=float)))
