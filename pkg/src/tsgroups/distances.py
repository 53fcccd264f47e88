"""Candidate distance measures over representation vectors.

Three measures are supported: Chebyshev (max coordinate difference),
Manhattan (sum of coordinate differences) and Mahalanobis under a ridge-
regularized covariance fitted on the full set of vectors being compared.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass

import numpy as np

from .types import AecsMatrix


class DistanceMeasureId(str, enum.Enum):
    """Closed set of measure tokens; also the fixed tie-break order."""

    CHEBYSHEV = "CHEBYSHEV"
    MANHATTAN = "MANHATTAN"
    MAHALANOBIS = "MAHALANOBIS"

    def __str__(self) -> str:  # serialize as the bare token
        return self.value


MEASURE_ORDER = (
    DistanceMeasureId.CHEBYSHEV,
    DistanceMeasureId.MANHATTAN,
    DistanceMeasureId.MAHALANOBIS,
)

EPSILON_FLOOR = 1e-12


@dataclass
class MahalanobisContext:
    """Inverse regularized covariance plus a fingerprint of the fitting set."""

    inverse_covariance: np.ndarray
    epsilon: float
    source_fingerprint: str

    def __post_init__(self) -> None:
        self.inverse_covariance = np.ascontiguousarray(self.inverse_covariance, dtype=np.float64)
        m = self.inverse_covariance
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"inverse covariance must be square, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("inverse covariance contains NaN/Inf")

    @property
    def width(self) -> int:
        return self.inverse_covariance.shape[0]


def _pair(a, b) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return a, b


def chebyshev(a, b) -> float:
    """Largest absolute coordinate difference."""
    a, b = _pair(a, b)
    return float(np.max(np.abs(a - b)))


def manhattan(a, b) -> float:
    """Sum of absolute coordinate differences."""
    a, b = _pair(a, b)
    return float(np.sum(np.abs(a - b)))


def fit_mahalanobis(aecs: AecsMatrix | np.ndarray, epsilon_scale: float = 1e-6) -> MahalanobisContext:
    """Fit the regularized inverse covariance of a vector set.

    Uses the unbiased sample covariance (divisor M-1) ridged by
    ``epsilon_scale * trace(C)/h`` (floored at 1e-12) so the matrix stays
    positive definite even for degenerate sets; positive definiteness is
    checked by running the Cholesky factorization.
    """
    if isinstance(aecs, AecsMatrix):
        x = aecs.vectors
        fingerprint = aecs.fingerprint()
    else:
        x = np.ascontiguousarray(aecs, dtype=np.float64)
        h = hashlib.sha256()
        h.update(str(x.shape).encode())
        h.update(x.tobytes())
        fingerprint = h.hexdigest()
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError(f"need an (M >= 2, h) matrix, got {x.shape}")
    width = x.shape[1]

    cov = np.cov(x, rowvar=False, ddof=1).reshape(width, width)
    if not np.all(np.isfinite(cov)):
        raise ValueError("covariance is not finite")
    epsilon = max(epsilon_scale * float(np.trace(cov)) / width, EPSILON_FLOOR)
    regularized = cov + epsilon * np.eye(width)

    chol = np.linalg.cholesky(regularized)  # raises LinAlgError if not SPD
    inv_chol = np.linalg.inv(chol)
    inverse = inv_chol.T @ inv_chol

    return MahalanobisContext(inverse_covariance=inverse, epsilon=epsilon, source_fingerprint=fingerprint)


def mahalanobis(a, b, ctx: MahalanobisContext) -> float:
    """sqrt((a-b)^T C'^-1 (a-b)) under the fitted context."""
    a, b = _pair(a, b)
    if a.size != ctx.width:
        raise ValueError(f"vectors have length {a.size}, context expects {ctx.width}")
    delta = a - b
    q = float(delta @ ctx.inverse_covariance @ delta)
    return float(np.sqrt(max(q, 0.0)))


def distance(a, b, measure: DistanceMeasureId, ctx: MahalanobisContext | None = None) -> float:
    """Dispatch a single pair distance by measure token."""
    measure = DistanceMeasureId(measure)
    if measure is DistanceMeasureId.CHEBYSHEV:
        return chebyshev(a, b)
    if measure is DistanceMeasureId.MANHATTAN:
        return manhattan(a, b)
    if ctx is None:
        raise ValueError("MAHALANOBIS requires a fitted context")
    return mahalanobis(a, b, ctx)


def cross_distances(
    x: np.ndarray,
    y: np.ndarray,
    measure: DistanceMeasureId,
    ctx: MahalanobisContext | None = None,
) -> np.ndarray:
    """All pairwise distances between rows of ``x`` (n, h) and ``y`` (m, h)."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.atleast_2d(np.asarray(y, dtype=np.float64))
    if x.shape[1] != y.shape[1]:
        raise ValueError(f"width mismatch: {x.shape[1]} vs {y.shape[1]}")
    measure = DistanceMeasureId(measure)
    if measure is DistanceMeasureId.MAHALANOBIS:
        if ctx is None:
            raise ValueError("MAHALANOBIS requires a fitted context")
        if x.shape[1] != ctx.width:
            raise ValueError(f"vectors have width {x.shape[1]}, context expects {ctx.width}")
    out = np.empty((x.shape[0], y.shape[0]), dtype=np.float64)
    for i in range(x.shape[0]):
        diff = y - x[i]
        if measure is DistanceMeasureId.CHEBYSHEV:
            out[i] = np.max(np.abs(diff), axis=1)
        elif measure is DistanceMeasureId.MANHATTAN:
            out[i] = np.sum(np.abs(diff), axis=1)
        else:
            q = np.einsum("ij,jk,ik->i", diff, ctx.inverse_covariance, diff)
            out[i] = np.sqrt(np.maximum(q, 0.0))
    return out


def pairwise_matrix(
    aecs: AecsMatrix | np.ndarray,
    measure: DistanceMeasureId,
    ctx: MahalanobisContext | None = None,
    memory_cap_bytes: int | None = None,
) -> np.ndarray:
    """Full symmetric M x M distance matrix with an exactly zero diagonal.

    Only the upper triangle is computed; the lower half is mirrored, so the
    matrix equals its transpose bit-for-bit. ``memory_cap_bytes`` guards
    against accidental materialization of matrices too large for memory.
    """
    x = aecs.vectors if isinstance(aecs, AecsMatrix) else np.ascontiguousarray(aecs, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"need an (M, h) matrix, got {x.shape}")
    m = x.shape[0]
    if memory_cap_bytes is not None and m * m * 8 > memory_cap_bytes:
        raise MemoryError(
            f"pairwise matrix for M={m} needs {m * m * 8} bytes, above the cap of {memory_cap_bytes}; "
            "use cross_distances on blocks instead"
        )
    measure = DistanceMeasureId(measure)
    if measure is DistanceMeasureId.MAHALANOBIS and ctx is None:
        raise ValueError("MAHALANOBIS requires a fitted context")

    out = np.zeros((m, m), dtype=np.float64)
    for i in range(m - 1):
        rest = x[i + 1 :]
        row = cross_distances(x[i : i + 1], rest, measure, ctx)[0]
        out[i, i + 1 :] = row
        out[i + 1 :, i] = row
    return out
