"""One-hot encoding, min-max scaling and label encoding."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, UnknownCategoryError


@dataclass(frozen=True)
class ScalerState:
    """Column-wise minima and maxima seen at fit time."""

    minimum: np.ndarray
    maximum: np.ndarray

    @property
    def num_columns(self) -> int:
        return self.minimum.shape[0]

    def to_json(self) -> dict:
        return {"min": self.minimum.tolist(), "max": self.maximum.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "ScalerState":
        return cls(np.asarray(obj["min"], dtype=float), np.asarray(obj["max"], dtype=float))


@dataclass(frozen=True)
class LabelMap:
    names: tuple[str, ...]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise UnknownCategoryError(f"unknown label {name!r}") from None

    def __len__(self) -> int:
        return len(self.names)


def one_hot_encode(values: Sequence[str], vocabulary: Sequence[str]) -> np.ndarray:
    """Encode each value as a 0/1 row with a single 1 at its vocabulary index.

    >>> one_hot_encode(["amf", "udm"], ["amf", "ausf", "udm"]).tolist()
    [[1, 0, 0], [0, 0, 1]]
    """
    lookup = {name: k for k, name in enumerate(vocabulary)}
    out = np.zeros((len(values), len(vocabulary)), dtype=np.int64)
    for row, value in enumerate(values):
        if value not in lookup:
            raise UnknownCategoryError(f"{value!r} is not in the vocabulary")
        out[row, lookup[value]] = 1
    return out


def fit_min_max(x: np.ndarray) -> ScalerState:
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(x)):
        raise ValueError("cannot fit a scaler on non-finite values")
    return ScalerState(x.min(axis=0), x.max(axis=0))


def transform_min_max(x: np.ndarray, s: ScalerState) -> np.ndarray:
    """Map into [0, 1] with ``(x - min) / (max - min)``.

    Values outside the fitted range are clamped; constant columns map to 0.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != s.num_columns:
        raise DimensionMismatchError(f"expected {s.num_columns} columns, got {x.shape[1]}")
    span = s.maximum - s.minimum
    constant = span == 0.0
    scaled = (x - s.minimum) / np.where(constant, 1.0, span)
    scaled[:, constant] = 0.0
    return np.clip(scaled, 0.0, 1.0)


def encode_labels(names: Sequence[str]) -> tuple[np.ndarray, LabelMap]:
    """Integer-encode labels in order of first occurrence."""
    order: dict[str, int] = {}
    for name in names:
        order.setdefault(name, len(order))
    labels = np.array([order[name] for name in names], dtype=np.int64)
    return labels, LabelMap(tuple(order))


def decode_labels(labels: np.ndarray, label_map: LabelMap) -> list[str]:
    return [label_map.names[int(k)] for k in labels]
