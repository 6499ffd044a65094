"""Seeded generation of uniform samples and the random matrices built from them.

All builders are pure functions of (inputs, seeds): uniforms come from a
counter stream keyed by (seed, index), Bernoulli edges from one keyed by
(edge_seed, i*n + j) for i < j, so the same inputs give bit-identical
matrices in any execution order.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionError,
    GraphonRangeError,
    NumericError,
    SizeError,
)
from .kernels import GraphonView, SpectralKernel
from .rng import counter_uniforms

MAGIC = b"GSPM1"

DIAG_ZEROED = "zeroed"
DIAG_INCLUDED = "included"


@dataclass(frozen=True, eq=False)
class SampleBatch:
    """n uniforms on [0, 1), together with the seed that generated them."""

    values: np.ndarray
    seed: int

    @property
    def n(self) -> int:
        return len(self.values)

    def order_statistics(self) -> np.ndarray:
        return np.sort(self.values)


def sample_uniform(n: int, seed: int) -> SampleBatch:
    """Draw U_1..U_n i.i.d. uniform via the counter stream keyed by seed."""
    if n < 2:
        raise SizeError(f"need n >= 2, got {n}")
    values = counter_uniforms(seed, np.arange(n, dtype=np.uint64))
    values.setflags(write=False)
    return SampleBatch(values=values, seed=int(seed))


@dataclass(frozen=True, eq=False)
class DenseSymMatrix:
    """Symmetric matrix stored as its row-major lower triangle.

    Symmetry holds by construction: only the triangle exists. kind records
    what the entries mean; clip_fraction is the share of off-diagonal
    entries a clamped graphon actually clipped (None otherwise).
    """

    n: int
    tril: np.ndarray
    diagonal_mode: str
    kind: str
    clip_fraction: float | None = None

    def to_dense(self) -> np.ndarray:
        full = np.zeros((self.n, self.n))
        idx = np.tril_indices(self.n)
        full[idx] = self.tril
        return full + full.T - np.diag(np.diag(full))

    def diagonal(self) -> np.ndarray:
        idx = np.arange(self.n, dtype=np.int64)
        return self.tril[idx * (idx + 1) // 2 + idx]

    def frobenius_norm(self) -> float:
        # off-diagonal entries appear twice in the full matrix
        total = 2.0 * float(self.tril @ self.tril)
        total -= float(self.diagonal() @ self.diagonal())
        return float(np.sqrt(total))


def matrix_from_dense(
    full: np.ndarray,
    diagonal_mode: str,
    kind: str,
    clip_fraction: float | None = None,
) -> DenseSymMatrix:
    full = np.asarray(full, dtype=float)
    if full.ndim != 2 or full.shape[0] != full.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {full.shape}")
    n = full.shape[0]
    tril = full[np.tril_indices(n)].copy()
    tril.setflags(write=False)
    return DenseSymMatrix(
        n=n, tril=tril, diagonal_mode=diagonal_mode, kind=kind,
        clip_fraction=clip_fraction,
    )


def build_kernel_matrix(
    kernel: SpectralKernel, batch: SampleBatch, diagonal_mode: str = DIAG_ZEROED
) -> DenseSymMatrix:
    """Matrix with entries K(U_i, U_j); diagonal zeroed or kept per mode."""
    if diagonal_mode not in (DIAG_ZEROED, DIAG_INCLUDED):
        raise DimensionError(f"unknown diagonal_mode {diagonal_mode!r}")
    full = kernel.pairwise(batch.values)
    if diagonal_mode == DIAG_ZEROED:
        np.fill_diagonal(full, 0.0)
    return matrix_from_dense(full, diagonal_mode, "kernel")


def _probability_entries(graphon: GraphonView, batch: SampleBatch):
    """Off-diagonal edge probabilities, honoring the view's range mode."""
    raw = graphon.kernel.pairwise(batch.values)
    np.fill_diagonal(raw, 0.0)
    n = batch.n
    offdiag = n * (n - 1)
    below = raw < 0.0
    above = raw > 1.0
    bad = int(below.sum() + above.sum())
    if bad and graphon.range_mode == "strict":
        raise GraphonRangeError(
            f"graphon leaves [0, 1] on {bad / offdiag:.1%} of sampled pairs; "
            "use clamp mode to clip"
        )
    if graphon.range_mode == "clamp":
        clipped = np.clip(raw, 0.0, 1.0)
        np.fill_diagonal(clipped, 0.0)
        return clipped, bad / offdiag
    return raw, None


def build_probability_matrix(
    graphon: GraphonView, batch: SampleBatch
) -> DenseSymMatrix:
    """Edge-probability matrix W(U_i, U_j) with zero diagonal."""
    probs, clip_fraction = _probability_entries(graphon, batch)
    return matrix_from_dense(probs, DIAG_ZEROED, "probability", clip_fraction)


def build_adjacency_matrix(
    graphon: GraphonView, batch: SampleBatch, edge_seed: int
) -> DenseSymMatrix:
    """Simple graph with edges drawn Bernoulli(W(U_i, U_j)), i < j.

    Each edge consumes the counter value i*n + j of the stream keyed by
    edge_seed, so the draw for a pair never depends on n's iteration order.
    """
    probs, clip_fraction = _probability_entries(graphon, batch)
    n = batch.n
    rows, cols = np.triu_indices(n, k=1)
    counters = rows.astype(np.uint64) * np.uint64(n) + cols.astype(np.uint64)
    u = counter_uniforms(edge_seed, counters)
    full = np.zeros((n, n))
    full[rows, cols] = (u < probs[rows, cols]).astype(float)
    full = full + full.T
    return matrix_from_dense(full, DIAG_ZEROED, "adjacency", clip_fraction)


def _infer_kind(mat: DenseSymMatrix) -> str:
    vals = mat.tril
    if np.all((vals == 0.0) | (vals == 1.0)) and np.all(mat.diagonal() == 0.0):
        return "adjacency"
    return "kernel"


def write_matrix_csv(mat: DenseSymMatrix, path) -> None:
    """n on the first line, then one lower-triangle row per line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{mat.n}\n")
        pos = 0
        for i in range(mat.n):
            row = mat.tril[pos : pos + i + 1]
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")
            pos += i + 1


def read_matrix_csv(path) -> DenseSymMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise SizeError(f"{path}: empty matrix file")
    try:
        n = int(lines[0])
    except ValueError as exc:
        raise SizeError(f"{path}: first line must be the matrix size") from exc
    if n < 1 or len(lines) != n + 1:
        raise DimensionError(f"{path}: expected {n} rows, got {len(lines) - 1}")
    tril = np.empty(n * (n + 1) // 2)
    pos = 0
    for i, line in enumerate(lines[1:]):
        parts = line.split(",")
        if len(parts) != i + 1:
            raise DimensionError(
                f"{path}: row {i} has {len(parts)} entries, expected {i + 1}"
            )
        try:
            tril[pos : pos + i + 1] = [float(p) for p in parts]
        except ValueError as exc:
            raise NumericError(f"{path}: non-numeric entry in row {i}") from exc
        pos += i + 1
    tril.setflags(write=False)
    mat = DenseSymMatrix(n=n, tril=tril, diagonal_mode=DIAG_ZEROED, kind="kernel")
    diag_mode = DIAG_ZEROED if np.all(mat.diagonal() == 0.0) else DIAG_INCLUDED
    return DenseSymMatrix(n=n, tril=tril, diagonal_mode=diag_mode, kind=_infer_kind(mat))


def write_matrix_binary(mat: DenseSymMatrix, path) -> None:
    """Compact format: magic GSPM1, little-endian u64 n, f64 lower triangle."""
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", mat.n))
        fh.write(mat.tril.astype("<f8").tobytes())


def read_matrix_binary(path) -> DenseSymMatrix:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[: len(MAGIC)] != MAGIC:
        raise NumericError(f"{path}: bad magic, not a GSPM1 matrix file")
    (n,) = struct.unpack_from("<Q", blob, len(MAGIC))
    expected = len(MAGIC) + 8 + 8 * (n * (n + 1) // 2)
    if len(blob) != expected:
        raise DimensionError(
            f"{path}: expected {expected} bytes for n={n}, got {len(blob)}"
        )
    tril = np.frombuffer(blob, dtype="<f8", offset=len(MAGIC) + 8).astype(float)
    tril.setflags(write=False)
    mat = DenseSymMatrix(n=int(n), tril=tril, diagonal_mode=DIAG_ZEROED, kind="kernel")
    diag_mode = DIAG_ZEROED if np.all(mat.diagonal() == 0.0) else DIAG_INCLUDED
    return DenseSymMatrix(
        n=int(n), tril=tril, diagonal_mode=diag_mode, kind=_infer_kind(mat)
    )
