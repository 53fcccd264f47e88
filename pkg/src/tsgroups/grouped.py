"""One classifier per consistent train group.

Each group's instances train an independent model; a bundle collects
the models together with which classes each group actually contained.
A single-model baseline is the same machinery run on the trivial
one-group partition, so the two stay comparable by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classifiers import ClassifierSpec, SoftmaxModel, extract_features, predict_softmax, train_softmax
from .types import AecsMatrix, Grouping, WindowedDataset

UNGROUPED_MEASURE = "NONE"


@dataclass
class GroupModelBundle:
    """K trained models plus a record of the grouping that shaped them."""

    models: list[SoftmaxModel]
    class_presence: np.ndarray
    grouping: Grouping
    spec: ClassifierSpec
    aecs_model_id: str
    n_classes: int
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if len(self.models) != self.grouping.K:
            raise ValueError(f"{len(self.models)} models for {self.grouping.K} groups")
        self.class_presence = np.asarray(self.class_presence, dtype=bool)
        if self.class_presence.shape != (self.grouping.K, self.n_classes):
            raise ValueError(f"class_presence must be (K, C), got {self.class_presence.shape}")

    @property
    def n_groups(self) -> int:
        return self.grouping.K


def trivial_grouping(n_instances: int) -> Grouping:
    """Everything in one group; the baseline's partition."""
    return Grouping(
        assignment=np.zeros(n_instances, dtype=np.int64),
        K=1,
        measure=UNGROUPED_MEASURE,
        hubert_scores={},
        iteration_trace=[],
    )


def train_per_group(ds: WindowedDataset, aecs: AecsMatrix, grouping: Grouping,
                    spec: ClassifierSpec) -> GroupModelBundle:
    """Train model i on exactly the instances assigned to group i.

    Groups missing some class train on what they have and will never
    predict the absent classes; single-class groups degenerate to
    constant predictors and are flagged in the bundle's warnings.
    """
    if aecs.n_instances != ds.n_windows:
        raise ValueError(f"{aecs.n_instances} vectors vs {ds.n_windows} windows")
    if grouping.assignment.size != ds.n_windows:
        raise ValueError(f"grouping covers {grouping.assignment.size} instances, dataset has {ds.n_windows}")

    features = extract_features(spec.kind, ds.windows, aecs.vectors)
    models: list[SoftmaxModel] = []
    warnings: list[str] = []
    presence = np.zeros((grouping.K, ds.n_classes), dtype=bool)
    for g in range(grouping.K):
        members = np.flatnonzero(grouping.assignment == g)
        group_labels = ds.labels[members]
        presence[g, np.unique(group_labels)] = True
        if np.unique(group_labels).size == 1:
            warnings.append(
                f"group {g} contains only class {int(group_labels[0])}; constant predictor"
            )
        models.append(train_softmax(features[members], group_labels, spec))
    return GroupModelBundle(
        models=models,
        class_presence=presence,
        grouping=grouping,
        spec=spec,
        aecs_model_id=aecs.source_model_id,
        n_classes=ds.n_classes,
        warnings=warnings,
    )


def predict(bundle: GroupModelBundle, model_index: int, windows: np.ndarray | None,
            aecs_vectors: np.ndarray | None) -> np.ndarray:
    """Labels from one group's model for the given instances."""
    if not 0 <= model_index < bundle.n_groups:
        raise IndexError(f"model index {model_index} out of range for {bundle.n_groups} groups")
    n = windows.shape[0] if windows is not None else aecs_vectors.shape[0]
    if n == 0:
        return np.empty(0, dtype=np.int64)
    features = extract_features(bundle.spec.kind, windows, aecs_vectors)
    return predict_softmax(bundle.models[model_index], features)


def train_single_baseline(ds: WindowedDataset, aecs: AecsMatrix,
                          spec: ClassifierSpec) -> GroupModelBundle:
    """The ungrouped benchmark: one model on the full training set."""
    return train_per_group(ds, aecs, trivial_grouping(ds.n_windows), spec)
