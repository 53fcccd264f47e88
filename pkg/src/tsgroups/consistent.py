"""Consistent group formation on compact representations.

Starting from the trivial single group, the group count increases one
step at a time; each step must introduce a new group holding at least a
``tau`` fraction of all instances. The first step that fails this test
is rejected and the last accepted partition is returned, so a dataset
whose very first split is already marginal stays one group.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .hierarchy import Linkage, MeasureSelection, cut, select_best_measure
from .types import AecsMatrix, Grouping

DEFAULT_TAU = 0.05
DEFAULT_K_START = 2
DEFAULT_K_CAP = 20


@dataclass
class CgfConfig:
    """Knobs for the iterative group-formation loop."""

    tau: float = DEFAULT_TAU
    k_start: int = DEFAULT_K_START
    k_max: int | None = None
    linkage: Linkage = Linkage.AVERAGE
    reselect_measure_per_k: bool = False

    def __post_init__(self) -> None:
        if not 0.0 < self.tau < 1.0:
            raise ValueError(f"tau must lie in (0, 1), got {self.tau}")
        if self.k_start < 2:
            raise ValueError(f"k_start must be >= 2, got {self.k_start}")
        if self.k_max is not None and self.k_max < self.k_start:
            raise ValueError(f"k_max {self.k_max} below k_start {self.k_start}")
        self.linkage = Linkage(self.linkage)

    def effective_k_max(self, n_instances: int) -> int:
        cap = DEFAULT_K_CAP if self.k_max is None else self.k_max
        return min(cap, n_instances - 1)


@dataclass
class CgfResult:
    """Final grouping plus the per-step audit trail."""

    grouping: Grouping
    selection: MeasureSelection
    accepted_k: int
    stopped_by: str
    rejected_size: int | None = None
    trace: list[dict] = field(default_factory=list)
    dendrogram_fingerprint: str = ""

    def to_dict(self) -> dict:
        return {
            "accepted_k": self.accepted_k,
            "stopped_by": self.stopped_by,
            "rejected_size": self.rejected_size,
            "measure": self.grouping.measure,
            "group_sizes": self.grouping.group_sizes().tolist(),
            "hubert_scores": {k: float(v) for k, v in self.grouping.hubert_scores.items()},
            "trace": self.trace,
            "dendrogram_fingerprint": self.dendrogram_fingerprint,
        }


def difference(prev: np.ndarray, nxt: np.ndarray) -> int:
    """Size of the new group created going from prev to the finer nxt.

    Old and new groups are matched one-to-one to maximize shared
    instances; the count of instances outside that correspondence is
    returned. For nested partitions (one group split in two, the rest
    untouched) this equals the size of the smaller child of the split,
    and identical partitions give 0.
    """
    prev = np.asarray(prev, dtype=np.int64)
    nxt = np.asarray(nxt, dtype=np.int64)
    if prev.shape != nxt.shape:
        raise ValueError(f"partition length mismatch: {prev.shape} vs {nxt.shape}")
    if prev.ndim != 1 or prev.size == 0:
        raise ValueError("partitions must be nonempty 1-d arrays")
    k_prev = int(prev.max()) + 1
    k_next = int(nxt.max()) + 1

    overlap = np.zeros((k_prev, k_next), dtype=np.int64)
    np.add.at(overlap, (prev, nxt), 1)
    rows, cols = scipy.optimize.linear_sum_assignment(-overlap)
    matched = int(overlap[rows, cols].sum())
    return int(prev.size - matched)


def new_group_members(prev: np.ndarray, nxt: np.ndarray) -> np.ndarray:
    """Indices of the instances counted by ``difference``.

    These are the members of new groups left unmatched by the maximum
    overlap correspondence, plus any instances sitting outside their own
    group's matched counterpart.
    """
    prev = np.asarray(prev, dtype=np.int64)
    nxt = np.asarray(nxt, dtype=np.int64)
    if prev.shape != nxt.shape:
        raise ValueError(f"partition length mismatch: {prev.shape} vs {nxt.shape}")
    k_prev = int(prev.max()) + 1
    k_next = int(nxt.max()) + 1
    overlap = np.zeros((k_prev, k_next), dtype=np.int64)
    np.add.at(overlap, (prev, nxt), 1)
    rows, cols = scipy.optimize.linear_sum_assignment(-overlap)
    partner = {int(r): int(c) for r, c in zip(rows, cols)}
    outside = [i for i in range(prev.size) if partner.get(int(prev[i])) != int(nxt[i])]
    return np.asarray(outside, dtype=np.int64)


def form_consistent_groups(aecs: AecsMatrix | np.ndarray, config: CgfConfig | None = None) -> CgfResult:
    """Grow the partition until the next split would create a marginal group.

    The distance measure and dendrogram are chosen once at ``k_start``
    and every cut reuses them, so successive partitions nest; set
    ``reselect_measure_per_k`` to rerun measure selection at each
    candidate k instead (partitions then need not nest and the
    matching-based difference takes over).
    """
    config = config or CgfConfig()
    x = aecs.vectors if isinstance(aecs, AecsMatrix) else np.asarray(aecs, dtype=np.float64)
    m = x.shape[0]
    if m < 3:
        raise ValueError(f"need at least 3 instances, got {m}")
    k_max = config.effective_k_max(m)
    if config.k_start > k_max:
        raise ValueError(
            f"k_start {config.k_start} exceeds the feasible maximum {k_max} for {m} instances"
        )
    min_size = config.tau * m

    selection = select_best_measure(aecs, config.k_start, config.linkage)

    def candidate_at(k: int) -> tuple[np.ndarray, MeasureSelection | None]:
        if k == 1:
            return np.zeros(m, dtype=np.int64), None
        if config.reselect_measure_per_k and k != config.k_start:
            sel = select_best_measure(aecs, k, config.linkage)
            return sel.assignment, sel
        if k == config.k_start:
            return selection.assignment, selection
        return cut(selection.dendrogram, k), None

    k = config.k_start - 1
    assignment, _ = candidate_at(k)
    trace: list[dict] = []
    stopped_by = "k_max"
    rejected_size: int | None = None
    while k < k_max:
        candidate, candidate_sel = candidate_at(k + 1)
        size = difference(assignment, candidate)
        accepted = size >= min_size
        trace.append({
            "k": k + 1,
            "new_group_size": size,
            "accepted": bool(accepted),
            "measure": (candidate_sel or selection).measure.value,
        })
        if not accepted:
            stopped_by = "tau"
            rejected_size = size
            break
        assignment = candidate
        if candidate_sel is not None:
            selection = candidate_sel
        k += 1

    grouping = Grouping(
        assignment=assignment,
        K=k,
        measure=selection.measure.value,
        hubert_scores=dict(selection.report.scores),
        iteration_trace=[(t["k"], t["new_group_size"]) for t in trace],
    )
    return CgfResult(
        grouping=grouping,
        selection=selection,
        accepted_k=k,
        stopped_by=stopped_by,
        rejected_size=rejected_size,
        trace=trace,
        dendrogram_fingerprint=selection.dendrogram.fingerprint(),
    )
