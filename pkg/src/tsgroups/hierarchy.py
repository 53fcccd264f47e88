"""Agglomerative hierarchical clustering with automatic measure selection.

Merging follows the classic Lance-Williams updates with a deterministic
tie-break; cutting a dendrogram at successive k values yields nested
partitions, which the consistent-grouping iteration relies on.
"""

from __future__ import annotations

import enum
import hashlib
import logging
from dataclasses import dataclass, field

import numpy as np

from .distances import (
    MEASURE_ORDER,
    DistanceMeasureId,
    MahalanobisContext,
    cross_distances,
    fit_mahalanobis,
    pairwise_matrix,
)
from .types import AecsMatrix

logger = logging.getLogger(__name__)


class Linkage(str, enum.Enum):
    AVERAGE = "AVERAGE"
    COMPLETE = "COMPLETE"
    SINGLE = "SINGLE"

    def __str__(self) -> str:
        return self.value


@dataclass
class Dendrogram:
    """Merge history over M leaves.

    Leaves carry ids ``0..M-1``; the cluster created by merge step s gets id
    ``M + s``. Each merge record is ``(a_id, b_id, height)`` with a < b.
    """

    n_leaves: int
    merges: list[tuple[int, int, float]]
    linkage: Linkage

    def __post_init__(self) -> None:
        if len(self.merges) != self.n_leaves - 1:
            raise ValueError(f"expected {self.n_leaves - 1} merges, got {len(self.merges)}")
        heights = [m[2] for m in self.merges]
        for i in range(1, len(heights)):
            if heights[i] < heights[i - 1] - 1e-12:
                logger.warning(
                    "non-monotone merge heights at step %d: %.17g < %.17g (kept in merge order)",
                    i, heights[i], heights[i - 1],
                )
                break

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(str(self.n_leaves).encode())
        h.update(self.linkage.value.encode())
        for a, b, height in self.merges:
            h.update(f"{a},{b},{height!r};".encode())
        return h.hexdigest()


def _validate_distance_matrix(dist: np.ndarray) -> np.ndarray:
    dist = np.asarray(dist, dtype=np.float64)
    if dist.ndim != 2 or dist.shape[0] != dist.shape[1]:
        raise ValueError(f"distance matrix must be square, got {dist.shape}")
    if dist.shape[0] < 2:
        raise ValueError("need at least two instances")
    if not np.all(np.isfinite(dist)):
        raise ValueError("distance matrix contains NaN/Inf")
    if np.any(dist < 0):
        raise ValueError("distance matrix has negative entries")
    if not np.array_equal(dist, dist.T):
        raise ValueError("distance matrix is not symmetric")
    if np.any(np.diag(dist) != 0):
        raise ValueError("distance matrix diagonal must be zero")
    return dist


def agglomerate(dist: np.ndarray, linkage: Linkage = Linkage.AVERAGE) -> Dendrogram:
    """Merge the M instances of a pairwise matrix down to one cluster.

    Among candidate merges at the same (exactly equal) distance, the pair
    whose sorted cluster-id tuple is lexicographically smallest merges
    first, making the dendrogram independent of evaluation order.
    """
    dist = _validate_distance_matrix(dist)
    linkage = Linkage(linkage)
    m = dist.shape[0]

    work = dist.copy()
    np.fill_diagonal(work, np.inf)
    active = np.ones(m, dtype=bool)
    sizes = np.ones(m, dtype=np.int64)
    ids = np.arange(m, dtype=np.int64)
    row_min = work.min(axis=1)
    row_arg = work.argmin(axis=1)

    merges: list[tuple[int, int, float]] = []
    for step in range(m - 1):
        height = row_min[active].min()

        # Gather every pair attaining the minimum, then tie-break on ids.
        best_pair: tuple[int, int] | None = None
        best_key: tuple[int, int] | None = None
        for i in np.flatnonzero(active & (row_min == height)):
            for j in np.flatnonzero(work[i] == height):
                key = (min(ids[i], ids[j]), max(ids[i], ids[j]))
                if best_key is None or key < best_key:
                    best_key = key
                    best_pair = (min(i, j), max(i, j))
        assert best_pair is not None and best_key is not None
        si, sj = best_pair
        merges.append((int(best_key[0]), int(best_key[1]), float(height)))

        others = active.copy()
        others[si] = others[sj] = False
        di, dj = work[si, others], work[sj, others]
        if linkage is Linkage.SINGLE:
            updated = np.minimum(di, dj)
        elif linkage is Linkage.COMPLETE:
            updated = np.maximum(di, dj)
        else:
            ni, nj = sizes[si], sizes[sj]
            updated = (ni * di + nj * dj) / (ni + nj)

        work[si, others] = updated
        work[others, si] = updated
        work[si, sj] = work[sj, si] = np.inf
        work[sj, :] = np.inf
        work[:, sj] = np.inf
        active[sj] = False
        row_min[sj] = np.inf
        sizes[si] += sizes[sj]
        ids[si] = m + step

        if step == m - 2:
            break
        # Refresh cached row minima invalidated by the merge.
        row_min[si] = work[si].min()
        row_arg[si] = work[si].argmin()
        stale = active & ((row_arg == si) | (row_arg == sj))
        stale[si] = False
        for k in np.flatnonzero(stale):
            row_min[k] = work[k].min()
            row_arg[k] = work[k].argmin()
        improved = active & (work[:, si] < row_min)
        row_min[improved] = work[improved, si]
        row_arg[improved] = si

    return Dendrogram(n_leaves=m, merges=merges, linkage=linkage)


def cut(dendrogram: Dendrogram, k: int) -> np.ndarray:
    """Partition into exactly k groups by undoing the last k-1 merges.

    Group ids are assigned in order of each group's smallest member index,
    so successive cuts of one dendrogram keep stable ids.
    """
    m = dendrogram.n_leaves
    if not 1 <= k <= m:
        raise ValueError(f"k must lie in [1, {m}], got {k}")

    parent = np.arange(m + (m - k), dtype=np.int64)

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s in range(m - k):
        a, b, _ = dendrogram.merges[s]
        new = m + s
        parent[find(a)] = new
        parent[find(b)] = new

    roots = np.fromiter((find(i) for i in range(m)), dtype=np.int64, count=m)
    order: dict[int, int] = {}
    assignment = np.empty(m, dtype=np.int64)
    for i in range(m):
        r = int(roots[i])
        if r not in order:
            order[r] = len(order)
        assignment[i] = order[r]
    return assignment


def centroids(vectors: AecsMatrix | np.ndarray, assignment: np.ndarray) -> np.ndarray:
    """Arithmetic mean vector of each group, as a (K, h) matrix."""
    x = vectors.vectors if isinstance(vectors, AecsMatrix) else np.asarray(vectors, dtype=np.float64)
    assignment = np.asarray(assignment, dtype=np.int64)
    if x.shape[0] != assignment.size:
        raise ValueError(f"{x.shape[0]} vectors vs {assignment.size} assignments")
    k = int(assignment.max()) + 1
    out = np.empty((k, x.shape[1]), dtype=np.float64)
    for g in range(k):
        members = assignment == g
        if not members.any():
            raise ValueError(f"group {g} is empty")
        out[g] = x[members].mean(axis=0)
    return out


def hubert_statistic(
    vectors: AecsMatrix | np.ndarray,
    assignment: np.ndarray,
    measure: DistanceMeasureId,
    ctx: MahalanobisContext | None = None,
    pairwise: np.ndarray | None = None,
) -> float:
    """Internal validity index: pairwise distance weighted by centroid distance.

    rho = 2/(M(M-1)) * sum_{i<j} d(x_i, x_j) * d(centroid(i), centroid(j)).
    Same-group pairs contribute zero since their centroid distance is zero.
    Defined as 0 for a single group. ``pairwise`` may carry a precomputed
    instance-distance matrix; otherwise blocks are computed on the fly.
    """
    x = vectors.vectors if isinstance(vectors, AecsMatrix) else np.asarray(vectors, dtype=np.float64)
    assignment = np.asarray(assignment, dtype=np.int64)
    m = x.shape[0]
    if assignment.size != m:
        raise ValueError(f"{m} vectors vs {assignment.size} assignments")
    k = int(assignment.max()) + 1
    if k < 2 or m < 2:
        return 0.0

    cents = centroids(x, assignment)
    cent_dist = cross_distances(cents, cents, measure, ctx)
    groups = [np.flatnonzero(assignment == g) for g in range(k)]

    total = 0.0
    for a in range(k):
        for b in range(a + 1, k):
            if pairwise is not None:
                block = pairwise[np.ix_(groups[a], groups[b])]
            else:
                block = cross_distances(x[groups[a]], x[groups[b]], measure, ctx)
            total += cent_dist[a, b] * float(block.sum())
    return 2.0 * total / (m * (m - 1))


@dataclass
class HubertReport:
    """Per-measure validity scores and the winning measure at a given k."""

    scores: dict[str, float]
    selected: DistanceMeasureId
    k: int

    def to_dict(self) -> dict:
        return {
            "scores": {name: float(v) for name, v in self.scores.items()},
            "selected": self.selected.value,
            "k": self.k,
        }


@dataclass
class MeasureSelection:
    """Everything the winning measure produced: partition, tree, context."""

    measure: DistanceMeasureId
    assignment: np.ndarray
    dendrogram: Dendrogram
    report: HubertReport
    mahalanobis_ctx: MahalanobisContext | None = None
    pairwise: np.ndarray | None = field(default=None, repr=False)


def select_best_measure(
    aecs: AecsMatrix | np.ndarray,
    k: int,
    linkage: Linkage = Linkage.AVERAGE,
    keep_pairwise: bool = False,
) -> MeasureSelection:
    """Cluster under all three measures, keep the one with maximum rho.

    Raw rho values are compared; exact ties break toward the fixed order
    CHEBYSHEV < MANHATTAN < MAHALANOBIS.
    """
    if k < 2:
        raise ValueError(f"measure selection needs k >= 2, got {k}")
    x = aecs.vectors if isinstance(aecs, AecsMatrix) else np.asarray(aecs, dtype=np.float64)

    scores: dict[str, float] = {}
    best: MeasureSelection | None = None
    best_rho = -np.inf
    for measure in MEASURE_ORDER:
        ctx = fit_mahalanobis(aecs) if measure is DistanceMeasureId.MAHALANOBIS else None
        dist = pairwise_matrix(x, measure, ctx)
        dendrogram = agglomerate(dist, linkage)
        assignment = cut(dendrogram, k)
        rho = hubert_statistic(x, assignment, measure, ctx, pairwise=dist)
        scores[measure.value] = rho
        if best is None or rho > best_rho:
            best_rho = rho
            best = MeasureSelection(
                measure=measure,
                assignment=assignment,
                dendrogram=dendrogram,
                report=HubertReport(scores={}, selected=measure, k=k),
                mahalanobis_ctx=ctx,
                pairwise=dist if keep_pairwise else None,
            )
    assert best is not None
    best.report.scores = scores
    return best


def hc_aecs(
    aecs: AecsMatrix | np.ndarray,
    k: int,
    linkage: Linkage = Linkage.AVERAGE,
) -> tuple[np.ndarray, DistanceMeasureId, HubertReport]:
    """Best-measure clustering at k groups: (assignment, measure, report)."""
    selection = select_best_measure(aecs, k, linkage)
    return selection.assignment, selection.measure, selection.report
