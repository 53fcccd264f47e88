"""Classification metrics computed from the confusion matrix."""

from __future__ import annotations

import numpy as np

from .types import ClassMetrics


def evaluate_metrics(pred, truth, n_classes: int) -> ClassMetrics:
    """Accuracy plus macro / support-weighted F1 for integer label vectors.

    Per-class precision and recall come straight from the confusion matrix;
    an undefined ratio (zero denominator) counts as 0. Classes with zero
    support are excluded from the macro mean and carry zero weight in the
    weighted mean.
    """
    pred = np.asarray(pred, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise ValueError(f"pred and truth must be equal-length vectors, got {pred.shape} vs {truth.shape}")
    if pred.size < 1:
        raise ValueError("need at least one instance")
    for name, v in (("pred", pred), ("truth", truth)):
        if v.min() < 0 or v.max() >= n_classes:
            raise ValueError(f"{name} labels must lie in [0, {n_classes})")

    confusion = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(confusion, (truth, pred), 1)

    support = confusion.sum(axis=1)
    predicted = confusion.sum(axis=0)
    diag = np.diag(confusion).astype(np.float64)

    with np.errstate(divide="ignore", invalid="ignore"):
        precision = np.where(predicted > 0, diag / predicted, 0.0)
        recall = np.where(support > 0, diag / support, 0.0)
        pr = precision + recall
        f1 = np.where(pr > 0, 2.0 * precision * recall / np.where(pr > 0, pr, 1.0), 0.0)

    present = support > 0
    f1_macro = float(f1[present].mean()) if present.any() else 0.0
    f1_weighted = float((f1 * support).sum() / support.sum())

    row_norm = np.zeros_like(confusion, dtype=np.float64)
    row_norm[present] = confusion[present] / support[present, None]

    return ClassMetrics(
        accuracy=float(diag.sum() / confusion.sum()),
        f1_macro=f1_macro,
        f1_weighted=f1_weighted,
        confusion=confusion,
        confusion_row_normalized=row_norm,
    )
