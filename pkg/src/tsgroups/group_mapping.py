"""Routing test groups to trained models via representation-space distance.

Each test group is compared against every train group either through
group representatives (mean vectors) or through the average of all
cross-group instance distances; the closest train group's model then
predicts that test group's instances. Distances always use the measure
selected on the train side, with any Mahalanobis context fitted on
train representations only.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .distances import DistanceMeasureId, MahalanobisContext, cross_distances, fit_mahalanobis
from .grouped import GroupModelBundle, predict
from .types import AecsMatrix, Grouping, WindowedDataset


class MappingMethod(str, enum.Enum):
    CR_CR = "CR_CR"
    AVG = "AVG"

    def __str__(self) -> str:
        return self.value


def group_representative(aecs: AecsMatrix | np.ndarray, grouping: Grouping, group_id: int) -> np.ndarray:
    """Mean representation vector of one group's members."""
    x = aecs.vectors if isinstance(aecs, AecsMatrix) else np.asarray(aecs, dtype=np.float64)
    if not 0 <= group_id < grouping.K:
        raise ValueError(f"group id {group_id} out of range for K={grouping.K}")
    members = grouping.members(group_id)
    if members.size == 0:
        raise ValueError(f"group {group_id} is empty")
    return x[members].mean(axis=0)


def group_representatives(aecs: AecsMatrix | np.ndarray, grouping: Grouping) -> np.ndarray:
    """All K mean vectors stacked as a (K, h) matrix."""
    return np.stack([group_representative(aecs, grouping, g) for g in range(grouping.K)])


def map_cr_cr(train_crs: np.ndarray, test_cr: np.ndarray, measure: DistanceMeasureId,
              ctx: MahalanobisContext | None = None) -> int:
    """Index of the train representative closest to the test representative."""
    train_crs = np.asarray(train_crs, dtype=np.float64)
    if train_crs.ndim != 2 or train_crs.shape[0] < 1:
        raise ValueError(f"need a nonempty (K, h) matrix of representatives, got {train_crs.shape}")
    dists = cross_distances(train_crs, np.asarray(test_cr, dtype=np.float64)[None], measure, ctx)
    return int(np.argmin(dists[:, 0]))


def avg_group_distance(train_instances: np.ndarray, test_instances: np.ndarray,
                       measure: DistanceMeasureId, ctx: MahalanobisContext | None = None) -> float:
    """Mean of all pairwise distances between two groups' members."""
    a = np.asarray(train_instances, dtype=np.float64)
    b = np.asarray(test_instances, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[0] == 0 or b.shape[0] == 0:
        raise ValueError("both groups must be nonempty (n, h) matrices")
    return float(cross_distances(a, b, measure, ctx).mean())


def map_avg(train_aecs: AecsMatrix | np.ndarray, train_grouping: Grouping,
            test_instances: np.ndarray, measure: DistanceMeasureId,
            ctx: MahalanobisContext | None = None) -> int:
    """Train group with the smallest average instance-wise distance."""
    x = train_aecs.vectors if isinstance(train_aecs, AecsMatrix) else np.asarray(train_aecs, dtype=np.float64)
    dists = [
        avg_group_distance(x[train_grouping.members(g)], test_instances, measure, ctx)
        for g in range(train_grouping.K)
    ]
    return int(np.argmin(dists))


@dataclass
class MappingReport:
    """Which train model each test group chose, with all candidate distances."""

    method: MappingMethod
    measure: DistanceMeasureId
    rows: list[dict] = field(default_factory=list)
    test_grouping_fingerprint: str = ""

    def __post_init__(self) -> None:
        self.method = MappingMethod(self.method)
        self.measure = DistanceMeasureId(self.measure)

    def chosen(self) -> list[int]:
        return [row["chosen_train_group"] for row in self.rows]

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "measure": self.measure.value,
            "rows": self.rows,
            "test_grouping_fingerprint": self.test_grouping_fingerprint,
        }


def infer_with_groups(
    bundle: GroupModelBundle,
    train_aecs: AecsMatrix,
    test_ds: WindowedDataset | None,
    test_aecs: AecsMatrix,
    test_grouping: Grouping,
    method: MappingMethod = MappingMethod.AVG,
    measure: DistanceMeasureId | None = None,
    ctx: MahalanobisContext | None = None,
) -> tuple[np.ndarray, MappingReport]:
    """Predict every test instance with its group's chosen train model.

    ``measure`` defaults to the measure recorded in the bundle's train
    grouping. A Mahalanobis context, when needed, must descend from the
    train representations; one is fitted here when not supplied.
    """
    method = MappingMethod(method)
    if test_aecs.n_instances != test_grouping.n_instances:
        raise ValueError(
            f"{test_aecs.n_instances} test vectors vs {test_grouping.n_instances} grouped instances"
        )
    if test_ds is not None and test_ds.n_windows != test_aecs.n_instances:
        raise ValueError(f"{test_ds.n_windows} test windows vs {test_aecs.n_instances} vectors")
    if measure is None:
        measure = DistanceMeasureId(bundle.grouping.measure)
    else:
        measure = DistanceMeasureId(measure)
    if measure is DistanceMeasureId.MAHALANOBIS:
        if ctx is None:
            ctx = fit_mahalanobis(train_aecs)
        elif ctx.source_fingerprint and ctx.source_fingerprint != train_aecs.fingerprint():
            raise ValueError("Mahalanobis context was not fitted on the train representations")

    train_x = train_aecs.vectors
    test_x = test_aecs.vectors
    train_crs = group_representatives(train_aecs, bundle.grouping)

    predictions = np.empty(test_aecs.n_instances, dtype=np.int64)
    report = MappingReport(
        method=method,
        measure=measure,
        test_grouping_fingerprint=test_grouping.fingerprint(),
    )
    for j in range(test_grouping.K):
        members = test_grouping.members(j)
        block = test_x[members]
        if method is MappingMethod.CR_CR:
            candidates = [
                float(cross_distances(train_crs[i][None], block.mean(axis=0)[None], measure, ctx)[0, 0])
                for i in range(bundle.n_groups)
            ]
        else:
            candidates = [
                avg_group_distance(train_x[bundle.grouping.members(i)], block, measure, ctx)
                for i in range(bundle.n_groups)
            ]
        chosen = int(np.argmin(candidates))
        report.rows.append({
            "test_group": j,
            "test_group_size": int(members.size),
            "chosen_train_group": chosen,
            "candidate_distances": [float(c) for c in candidates],
        })
        windows = test_ds.windows[members] if test_ds is not None else None
        predictions[members] = predict(bundle, chosen, windows, block)
    return predictions, report
