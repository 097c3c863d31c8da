"""Classification metrics for window-level recognition experiments.

All metrics are derived from a score matrix (one row per sample, one column
per class) so that top-k accuracy and confusion statistics share a single
ranking convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ValidationError

DEFAULT_NUM_CLASSES = 16


@dataclass(frozen=True)
class MetricReport:
    """Summary statistics for one evaluated model on one dataset."""

    weighted_f1: float
    top1_accuracy: float
    top3_accuracy: float
    per_class_precision: np.ndarray
    per_class_recall: np.ndarray
    per_class_f1: np.ndarray
    support: np.ndarray
    confusion_matrix: np.ndarray
    num_samples: int
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("weighted_f1", "top1_accuracy", "top3_accuracy"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1], got {value}")
        # rows of the confusion matrix partition samples by true class
        if not np.array_equal(self.confusion_matrix.sum(axis=1), self.support):
            raise ValidationError("confusion rows must sum to per-class support")

    def to_dict(self) -> dict:
        return {
            "weighted_f1": self.weighted_f1,
            "top1_accuracy": self.top1_accuracy,
            "top3_accuracy": self.top3_accuracy,
            "per_class_precision": self.per_class_precision.tolist(),
            "per_class_recall": self.per_class_recall.tolist(),
            "per_class_f1": self.per_class_f1.tolist(),
            "support": self.support.tolist(),
            "confusion_matrix": self.confusion_matrix.tolist(),
            "num_samples": self.num_samples,
            "extras": dict(self.extras),
        }


def topk_hits(y_true: np.ndarray, y_scores: np.ndarray, k: int) -> np.ndarray:
    """Boolean mask: true class within the k highest-scoring columns."""
    # stable sort so ties resolve toward the lower class id, deterministically
    order = np.argsort(-y_scores, axis=1, kind="stable")
    return (order[:, :k] == y_true[:, None]).any(axis=1)


def confusion_from_predictions(
    y_true: np.ndarray, y_pred: np.ndarray, num_classes: int
) -> np.ndarray:
    matrix = np.zeros((num_classes, num_classes), dtype=np.int64)
    np.add.at(matrix, (y_true, y_pred), 1)
    return matrix


def compute_metrics(
    y_true,
    y_scores,
    num_classes: int = DEFAULT_NUM_CLASSES,
    top_k: int = 3,
) -> MetricReport:
    """Weighted F1, top-1/top-k accuracy and confusion matrix from scores.

    ``y_scores`` must be ``(n_samples, num_classes)``; predictions are the
    per-row argmax (stable toward lower class ids on exact ties).
    """
    y_true = np.asarray(y_true, dtype=np.int64)
    y_scores = np.asarray(y_scores, dtype=np.float64)
    if y_true.ndim != 1 or y_scores.ndim != 2:
        raise ValidationError("expected y_true (n,) and y_scores (n, num_classes)")
    if len(y_true) != len(y_scores):
        raise ValidationError(
            f"length mismatch: {len(y_true)} labels vs {len(y_scores)} score rows"
        )
    if len(y_true) == 0:
        raise ValidationError("cannot compute metrics on an empty sample")
    if y_scores.shape[1] != num_classes:
        raise ValidationError(
            f"expected {num_classes} score columns, got {y_scores.shape[1]}"
        )
    if y_true.min() < 0 or y_true.max() >= num_classes:
        raise ValidationError("labels out of range")

    y_pred = np.argmax(y_scores, axis=1)
    confusion = confusion_from_predictions(y_true, y_pred, num_classes)
    support = confusion.sum(axis=1)
    predicted = confusion.sum(axis=0)
    diag = np.diag(confusion).astype(np.float64)

    with np.errstate(invalid="ignore", divide="ignore"):
        precision = np.where(predicted > 0, diag / predicted, 0.0)
        recall = np.where(support > 0, diag / support, 0.0)
        denom = precision + recall
        f1 = np.where(denom > 0, 2.0 * precision * recall / denom, 0.0)

    weights = support / support.sum()
    # dot products can overshoot 1.0 by an ulp; keep the report in range
    weighted_f1 = float(np.clip(np.dot(weights, f1), 0.0, 1.0))
    top1 = float(np.mean(y_pred == y_true))
    topk = float(np.mean(topk_hits(y_true, y_scores, top_k)))

    return MetricReport(
        weighted_f1=weighted_f1,
        top1_accuracy=top1,
        top3_accuracy=topk,
        per_class_precision=precision,
        per_class_recall=recall,
        per_class_f1=f1,
        support=support,
        confusion_matrix=confusion,
        num_samples=len(y_true),
    )
