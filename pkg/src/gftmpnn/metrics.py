"""Confusion matrices, per-class precision/recall/F1 and one-vs-rest ROC."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyMatrixError, LabelOutOfRangeError, SingleClassInputError


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts indexed ``[true, predicted]``."""

    counts: np.ndarray
    label_names: tuple[str, ...]

    @property
    def num_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass(frozen=True)
class ClassificationReport:
    label_names: tuple[str, ...]
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    support: np.ndarray
    # True where the score's denominator was zero (score reported as 0).
    precision_undefined: np.ndarray
    recall_undefined: np.ndarray
    f1_undefined: np.ndarray
    accuracy: float
    macro: dict[str, float]
    weighted: dict[str, float]

    def to_json(self) -> dict:
        classes = []
        for c, name in enumerate(self.label_names):
            classes.append({
                "index": c,
                "name": name,
                "precision": float(self.precision[c]),
                "recall": float(self.recall[c]),
                "f1": float(self.f1[c]),
                "support": int(self.support[c]),
                "undefined": [key for key, flags in (
                    ("precision", self.precision_undefined),
                    ("recall", self.recall_undefined),
                    ("f1", self.f1_undefined),
                ) if flags[c]],
            })
        total = int(self.support.sum())
        return {
            "classes": classes,
            "accuracy": self.accuracy,
            "macro_avg": {**self.macro, "support": total},
            "weighted_avg": {**self.weighted, "support": total},
        }


def confusion_matrix(
    y_true: Sequence[int],
    y_pred: Sequence[int],
    num_classes: int,
    label_names: Sequence[str] | None = None,
) -> ConfusionMatrix:
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.shape != y_pred.shape:
        raise ValueError("y_true and y_pred must have the same length")
    for arr in (y_true, y_pred):
        if arr.size and (arr.min() < 0 or arr.max() >= num_classes):
            raise LabelOutOfRangeError(f"labels must lie in [0, {num_classes})")
    counts = np.zeros((num_classes, num_classes), dtype=np.int64)
    np.add.at(counts, (y_true, y_pred), 1)
    names = tuple(label_names) if label_names is not None else tuple(str(c) for c in range(num_classes))
    return ConfusionMatrix(counts, names)


def _safe_ratio(num: np.ndarray, den: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    undefined = den == 0
    value = np.divide(num, den, out=np.zeros(num.shape, dtype=float), where=~undefined)
    return value, undefined


def report(cm: ConfusionMatrix) -> ClassificationReport:
    """Per-class and averaged scores.

    Zero denominators give a score of 0 plus an ``undefined`` flag. Macro
    averages skip classes with zero support; weighted averages weight by
    support.
    """
    counts = cm.counts
    total = counts.sum()
    if counts.size == 0 or total == 0:
        raise EmptyMatrixError("confusion matrix holds no samples")
    tp = np.diag(counts).astype(np.int64)
    predicted = counts.sum(axis=0)
    support = counts.sum(axis=1)
    precision, p_undef = _safe_ratio(tp, predicted)
    recall, r_undef = _safe_ratio(tp, support)
    f1, f_undef = _safe_ratio(2.0 * precision * recall, precision + recall)

    present = support > 0
    weights = support / total
    macro = {
        name: float(np.mean(score[present]))
        for name, score in (("precision", precision), ("recall", recall), ("f1", f1))
    }
    weighted = {
        name: float(np.sum(score * weights))
        for name, score in (("precision", precision), ("recall", recall), ("f1", f1))
    }
    return ClassificationReport(
        label_names=cm.label_names,
        precision=precision,
        recall=recall,
        f1=f1,
        support=support,
        precision_undefined=p_undef,
        recall_undefined=r_undef,
        f1_undefined=f_undef,
        accuracy=float(int(tp.sum()) / int(total)),
        macro=macro,
        weighted=weighted,
    )


@dataclass(frozen=True)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray
    auc: float

    def to_json(self) -> dict:
        return {
            "fpr": self.fpr.tolist(),
            "tpr": self.tpr.tolist(),
            # The leading +inf threshold (the (0, 0) point) is not valid JSON.
            "thresholds": [None, *self.thresholds[1:].tolist()],
            "auc": self.auc,
        }


def roc_points(scores: Sequence[float], y_true: Sequence[int], positive: int) -> RocCurve:
    """One-vs-rest ROC for class ``positive``.

    Sweeps every distinct score as a threshold (predict positive when
    ``score >= threshold``), from the highest down, starting at (0, 0).
    AUC is the trapezoid area, which equals the Mann-Whitney statistic
    with ties counted as one half.
    """
    scores = np.asarray(scores, dtype=float)
    is_pos = np.asarray(y_true) == positive
    n_pos = int(is_pos.sum())
    n_neg = is_pos.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise SingleClassInputError("ROC needs both positive and negative samples")
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    tp = np.cumsum(is_pos[order])
    fp = np.cumsum(~is_pos[order])
    # Last position of each run of equal scores.
    last = np.r_[np.flatnonzero(np.diff(sorted_scores) != 0), sorted_scores.size - 1]
    tpr = np.r_[0.0, tp[last] / n_pos]
    fpr = np.r_[0.0, fp[last] / n_neg]
    thresholds = np.r_[np.inf, sorted_scores[last]]
    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))
    return RocCurve(fpr, tpr, thresholds, auc)
