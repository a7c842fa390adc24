"""Train/evaluate orchestration and the on-disk model and report formats."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import metrics
from .datagen import Dataset
from .errors import DataError, ModelDataMismatchError
from .mpnn import (
    History,
    ModelParams,
    TrainConfig,
    adapt_gains,
    build_context,
    forward,
    predict_from_probs,
    train,
)
from .preprocess import ScalerState, transform_min_max

MODEL_VERSION = "gft-mpnn/1"


@dataclass
class TrainedModel:
    params: ModelParams
    scaler: ScalerState
    label_names: tuple[str, ...]
    config: TrainConfig
    history: History | None = None

    def to_json(self) -> dict:
        return {
            "version": MODEL_VERSION,
            "dims": self.params.dims,
            "label_names": list(self.label_names),
            "adjacency_mode": self.config.adjacency_mode,
            "seed": self.config.seed,
            "config": asdict(self.config),
            "scaler": self.scaler.to_json(),
            "params": self.params.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "TrainedModel":
        if obj.get("version") != MODEL_VERSION:
            raise DataError(f"unsupported model version {obj.get('version')!r}")
        try:
            return cls(
                params=ModelParams.from_json(obj["params"]),
                scaler=ScalerState.from_json(obj["scaler"]),
                label_names=tuple(obj["label_names"]),
                config=TrainConfig(**obj["config"]).validate(),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed model file: {exc}") from exc


@dataclass
class Evaluation:
    report: metrics.ClassificationReport
    confusion: metrics.ConfusionMatrix
    roc: dict[int, metrics.RocCurve]
    predictions: np.ndarray
    probs: np.ndarray

    def to_json(self, extra: dict | None = None) -> dict:
        out = self.report.to_json()
        out["confusion_matrix"] = self.confusion.counts.tolist()
        out["roc"] = {self.report.label_names[c]: curve.to_json() for c, curve in self.roc.items()}
        if extra:
            out.update(extra)
        return out


def train_model(dataset: Dataset, cfg: TrainConfig) -> TrainedModel:
    result = train(dataset, cfg)
    return TrainedModel(result.params, result.scaler, tuple(dataset.label_names), cfg, result.history)


def evaluate_model(model: TrainedModel, dataset: Dataset) -> Evaluation:
    """Score ``dataset`` on a k-NN graph rebuilt over its own samples.

    The stored scaler is applied first; spectral gains are resized by
    eigen-index to the evaluation graph (see :func:`mpnn.adapt_gains`).
    """
    dims = model.params.dims
    if dataset.num_features != dims["D"]:
        raise ModelDataMismatchError(
            f"data has {dataset.num_features} features, model expects {dims['D']}"
        )
    if tuple(dataset.label_names) != model.label_names:
        raise ModelDataMismatchError("dataset label vocabulary differs from the model's")
    if dataset.num_samples < 2:
        raise ModelDataMismatchError("evaluation needs at least two samples")
    x = transform_min_max(dataset.X, model.scaler)
    ctx = build_context(x, model.config)
    params = adapt_gains(model.params, dataset.num_samples)
    probs = forward(params, x, ctx.adjacency, ctx.eig).probs
    pred = predict_from_probs(probs)
    num_classes = len(model.label_names)
    cm = metrics.confusion_matrix(dataset.y, pred, num_classes, model.label_names)
    roc = {}
    for c in range(num_classes):
        present = dataset.y == c
        if present.any() and not present.all():
            roc[c] = metrics.roc_points(probs[:, c], dataset.y, c)
    return Evaluation(metrics.report(cm), cm, roc, pred, probs)


def dump_json(obj: dict, path: str | Path) -> None:
    """Canonical JSON: sorted keys, fixed indentation, trailing newline."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True, allow_nan=False)
        fh.write("\n")


def load_json(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid JSON ({exc})") from exc


def save_model(model: TrainedModel, path: str | Path) -> None:
    dump_json(model.to_json(), path)


def load_model(path: str | Path) -> TrainedModel:
    return TrainedModel.from_json(load_json(path))


def write_history(history: History, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("epoch,loss,train_accuracy\n")
        for epoch, (loss, acc) in enumerate(zip(history.loss, history.accuracy), start=1):
            fh.write(f"{epoch},{loss!r},{acc!r}\n")


def format_report(rep: dict) -> str:
    """Plain-text table in the usual precision/recall/f1/support layout."""
    names = [row["name"] for row in rep["classes"]]
    width = max([len("weighted avg"), *map(len, names)]) + 2
    lines = [f"{'':<{width}}{'precision':>10}{'recall':>10}{'f1-score':>10}{'support':>10}", ""]
    for row in rep["classes"]:
        lines.append(
            f"{row['index']:>2} {row['name']:<{width - 3}}{row['precision']:>10.2f}"
            f"{row['recall']:>10.2f}{row['f1']:>10.2f}{row['support']:>10d}"
        )
    total = rep["macro_avg"]["support"]
    lines += ["", f"{'accuracy':<{width}}{'':>20}{rep['accuracy']:>10.4f}{total:>10d}"]
    for key, label in (("macro_avg", "macro avg"), ("weighted_avg", "weighted avg")):
        avg = rep[key]
        lines.append(
            f"{label:<{width}}{avg['precision']:>10.2f}{avg['recall']:>10.2f}"
            f"{avg['f1']:>10.2f}{avg['support']:>10d}"
        )
    return "\n".join(lines)
