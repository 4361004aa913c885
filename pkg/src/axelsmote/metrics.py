"""Imbalance diagnostics, evaluation metrics, and a minimal k-NN classifier.

Metrics are computed from per-class confusion counts.  Multi-class F1 and
balanced accuracy use macro averaging (unweighted mean over classes), which
keeps them sensitive to minority-class behavior; per-class F1 with an empty
denominator contributes 0 and records a MetricWarning.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Dict, NamedTuple, Tuple

import numpy as np

from .core import Dataset, class_counts
from .errors import (
    EmptyDataset,
    EmptyTrainingSet,
    LengthMismatch,
    MetricWarning,
    StratificationError,
)

__all__ = [
    "ClassCounts",
    "ConfusionCounts",
    "confusion_counts",
    "imbalance_ratio",
    "minority_classes",
    "f1_score",
    "balanced_accuracy",
    "knn_classify",
    "stratified_split",
]


class ClassCounts(NamedTuple):
    tp: int
    fp: int
    fn: int
    tn: int


@dataclass(frozen=True)
class ConfusionCounts:
    """One-vs-rest confusion counts for every observed class.

    For each class, tp + fp + fn + tn equals the total sample count.
    """

    per_class: Dict[int, ClassCounts]
    total: int


def _label_vector(x, name: str) -> np.ndarray:
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise LengthMismatch(f"{name} must be 1-D, got shape {arr.shape}")
    return arr.astype(np.int64)


def confusion_counts(true_labels, predicted_labels) -> ConfusionCounts:
    """Per-class TP/FP/FN/TN over the union of observed class ids."""
    y_true = _label_vector(true_labels, "true_labels")
    y_pred = _label_vector(predicted_labels, "predicted_labels")
    if y_true.shape[0] != y_pred.shape[0]:
        raise LengthMismatch(
            f"{y_true.shape[0]} true labels vs {y_pred.shape[0]} predictions"
        )
    total = y_true.shape[0]
    per_class = {}
    for c in np.union1d(y_true, y_pred):
        tp = int(np.count_nonzero((y_true == c) & (y_pred == c)))
        fp = int(np.count_nonzero((y_true != c) & (y_pred == c)))
        fn = int(np.count_nonzero((y_true == c) & (y_pred != c)))
        per_class[int(c)] = ClassCounts(tp, fp, fn, total - tp - fp - fn)
    return ConfusionCounts(per_class=per_class, total=total)


def imbalance_ratio(ds: Dataset) -> float:
    """Majority class count divided by minority class count; always >= 1."""
    counts = class_counts(ds.labels)
    if not counts:
        raise EmptyDataset("no labels present")
    values = list(counts.values())
    return max(values) / min(values)


def minority_classes(ds: Dataset, gamma: float = 0.5) -> set:
    """Classes whose count falls below ``gamma`` times the majority count."""
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must be in (0, 1), got {gamma}")
    counts = class_counts(ds.labels)
    if not counts:
        raise EmptyDataset("no labels present")
    cut = gamma * max(counts.values())
    return {c for c, n in counts.items() if n < cut}


def _f1_from_counts(counts: ClassCounts, class_id: int) -> float:
    denom = 2 * counts.tp + counts.fp + counts.fn
    if denom == 0:
        warnings.warn(
            f"F1 undefined for class {class_id} (no true or predicted "
            f"members); counting it as 0",
            MetricWarning,
            stacklevel=3,
        )
        return 0.0
    return 2.0 * counts.tp / denom


def f1_score(
    true_labels,
    predicted_labels,
    averaging: str = "macro",
    positive_class: int = 1,
) -> float:
    """F1 = 2TP / (2TP + FP + FN), macro-averaged or for one positive class.

    Args:
        averaging: "macro" (unweighted mean over the union of observed
            classes) or "binary-positive" (F1 of ``positive_class`` alone).
    """
    cm = confusion_counts(true_labels, predicted_labels)
    if averaging == "binary-positive":
        counts = cm.per_class.get(
            positive_class, ClassCounts(0, 0, 0, cm.total)
        )
        return _f1_from_counts(counts, positive_class)
    if averaging != "macro":
        raise ValueError(
            f"averaging must be 'macro' or 'binary-positive', got {averaging!r}"
        )
    scores = [_f1_from_counts(counts, c) for c, counts in cm.per_class.items()]
    return float(np.mean(scores))


def balanced_accuracy(true_labels, predicted_labels) -> float:
    """Unweighted mean of per-class recalls over classes present in truth.

    For two classes this is (TPR + TNR) / 2.  Classes that occur only in
    the predictions have no defined recall; they are excluded and a
    MetricWarning is recorded.
    """
    cm = confusion_counts(true_labels, predicted_labels)
    recalls = []
    for c, counts in sorted(cm.per_class.items()):
        support = counts.tp + counts.fn
        if support == 0:
            warnings.warn(
                f"class {c} absent from true labels; excluded from "
                f"balanced accuracy",
                MetricWarning,
                stacklevel=2,
            )
            continue
        recalls.append(counts.tp / support)
    return float(np.mean(recalls))


def knn_classify(train: Dataset, test_features, k: int) -> np.ndarray:
    """Majority vote among the k nearest training rows (Euclidean).

    Neighbor ties at equal distance resolve by ascending row index; vote
    ties resolve by the smallest class id.  ``k`` larger than the training
    set votes over all rows.  Squared distances use the same pinned
    expression as the neighbor module, ``(diffs * diffs).sum(axis=1)``, so
    tie-breaking is reproducible bit for bit.

    Raises:
        EmptyTrainingSet: train has no rows.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if train.n_samples == 0:
        raise EmptyTrainingSet("no training rows")
    X = np.asarray(test_features, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != train.n_features:
        raise LengthMismatch(
            f"test rows have {X.shape[1]} features, train has {train.n_features}"
        )
    k_eff = min(k, train.n_samples)
    n = train.n_samples
    row_ids = np.arange(n)
    n_classes = int(train.labels.max()) + 1

    predictions = np.empty(X.shape[0], dtype=np.int64)
    for i, x in enumerate(X):
        diffs = train.features - x
        d2 = (diffs * diffs).sum(axis=1)
        nearest = np.lexsort((row_ids, d2))[:k_eff]
        votes = np.bincount(train.labels[nearest], minlength=n_classes)
        predictions[i] = int(np.flatnonzero(votes == votes.max())[0])
    return predictions


def stratified_split(
    labels,
    test_fraction: float,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, np.ndarray]:
    """Class-stratified row split into (train_indices, test_indices).

    Each class contributes round(count * test_fraction) rows to the test
    fold, clamped so both folds get at least one row per class.

    Raises:
        StratificationError: a class has fewer than two members.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    y = _label_vector(labels, "labels")
    train_parts = []
    test_parts = []
    for c in np.unique(y):
        rows = np.flatnonzero(y == c)
        if rows.size < 2:
            raise StratificationError(
                f"class {int(c)} has {rows.size} member(s); cannot stratify"
            )
        n_test = int(round(rows.size * test_fraction))
        n_test = min(max(n_test, 1), rows.size - 1)
        shuffled = rng.permutation(rows)
        test_parts.append(shuffled[:n_test])
        train_parts.append(shuffled[n_test:])
    train_idx = np.sort(np.concatenate(train_parts))
    test_idx = np.sort(np.concatenate(test_parts))
    return train_idx, test_idx
