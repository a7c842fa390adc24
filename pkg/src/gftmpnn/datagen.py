"""Synthetic failure-injection datasets shaped like a 5G-core digital twin.

Sixteen classes: ``normal`` plus every (component, failure mode) pair over
the amf / ausf / udm network functions. The feature vector is split into
one block per component plus a shared block. A failure shifts a fixed,
mode-specific subset of its own component's block by ±1; everything else
is Gaussian noise around zero.
"""
from __future__ import annotations

import csv
import math
import zlib
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidSpecError, MalformedCsvError, RaggedRowError, UnknownLabelError

COMPONENTS = ("amfx1", "ausfx1", "udmx1")
FAILURE_MODES = (
    "bridge-delif",
    "ens5_interface-down",
    "ens5_interface-loss-start-70",
    "memory-stress-start",
    "vcpu-overload-start",
)
LABEL_NAMES = ("normal",) + tuple(f"{c}_{m}" for c in COMPONENTS for m in FAILURE_MODES)
NUM_FAILURE_CLASSES = len(LABEL_NAMES) - 1

DOMAINS = ("A", "C-train", "C-test")
_DOMAIN_DEFAULTS = {
    "A": {"samples_per_failure_class": 80, "domain_shift": 0.0},
    "C-train": {"samples_per_failure_class": 10, "domain_shift": 0.15},
    "C-test": {"samples_per_failure_class": 10, "domain_shift": 0.15},
}
PROTOTYPE_MAGNITUDE = 1.0


def rng_stream(seed: int, *names: str | int) -> np.random.Generator:
    """Independent generator for a named stream derived from one seed."""
    key = [int(seed)]
    for name in names:
        key.append(zlib.crc32(str(name).encode("utf-8")))
    return np.random.default_rng(key)


@dataclass(frozen=True)
class DomainSpec:
    domain: str = "A"
    num_features: int = 64
    samples_per_failure_class: int | None = None
    normal_fraction: float = 0.67
    noise_sigma: float = 0.1
    domain_shift: float | None = None
    seed: int = 42

    def resolved(self) -> "DomainSpec":
        """Fill domain-dependent defaults and validate."""
        if self.domain not in DOMAINS:
            raise InvalidSpecError(f"domain must be one of {DOMAINS}, got {self.domain!r}")
        defaults = _DOMAIN_DEFAULTS[self.domain]
        spec = DomainSpec(
            domain=self.domain,
            num_features=self.num_features,
            samples_per_failure_class=(
                defaults["samples_per_failure_class"]
                if self.samples_per_failure_class is None else self.samples_per_failure_class
            ),
            normal_fraction=self.normal_fraction,
            noise_sigma=self.noise_sigma,
            domain_shift=defaults["domain_shift"] if self.domain_shift is None else self.domain_shift,
            seed=self.seed,
        )
        if int(spec.num_features) != spec.num_features or spec.num_features < 16:
            raise InvalidSpecError("num_features must be an integer >= 16")
        if int(spec.samples_per_failure_class) != spec.samples_per_failure_class \
                or spec.samples_per_failure_class < 1:
            raise InvalidSpecError("samples_per_failure_class must be an integer >= 1")
        if not 0.0 < spec.normal_fraction < 1.0:
            raise InvalidSpecError("normal_fraction must lie in (0, 1)")
        if not (spec.noise_sigma >= 0.0 and math.isfinite(spec.noise_sigma)):
            raise InvalidSpecError("noise_sigma must be finite and >= 0")
        if not (spec.domain_shift >= 0.0 and math.isfinite(spec.domain_shift)):
            raise InvalidSpecError("domain_shift must be finite and >= 0")
        return spec

    @property
    def num_normal(self) -> int:
        spec = self.resolved()
        per_class_fraction = (1.0 - spec.normal_fraction) / NUM_FAILURE_CLASSES
        ratio = spec.normal_fraction / per_class_fraction
        return max(1, math.floor(ratio * spec.samples_per_failure_class + 0.5))

    def class_counts(self) -> np.ndarray:
        spec = self.resolved()
        return np.array([self.num_normal] + [spec.samples_per_failure_class] * NUM_FAILURE_CLASSES)

    def to_json(self) -> dict:
        return asdict(self.resolved())

    @classmethod
    def from_json(cls, obj: dict) -> "DomainSpec":
        unknown = set(obj) - set(cls.__dataclass_fields__)
        if unknown:
            raise InvalidSpecError(f"unknown DomainSpec keys: {sorted(unknown)}")
        return cls(**obj).resolved()


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    label_names: tuple[str, ...] = LABEL_NAMES
    domain: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def num_samples(self) -> int:
        return self.X.shape[0]

    @property
    def num_features(self) -> int:
        return self.X.shape[1]

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.y, minlength=len(self.label_names))

    def subset(self, index: np.ndarray) -> "Dataset":
        return Dataset(self.X[index], self.y[index], self.label_names, self.domain, dict(self.meta))


def feature_blocks(num_features: int) -> list[np.ndarray]:
    """Column indices of the amf, ausf and udm blocks (the shared block is the rest)."""
    width = num_features // 4
    return [np.arange(b * width, (b + 1) * width) for b in range(len(COMPONENTS))]


def class_prototypes(num_features: int, seed: int) -> np.ndarray:
    """Mean offset of each class; row 0 (normal) is zero.

    Depends only on the seed and the feature count, never on the domain, so
    datasets from different domains share their class definitions.
    """
    rng = rng_stream(seed, "prototypes", num_features)
    protos = np.zeros((len(LABEL_NAMES), num_features))
    blocks = feature_blocks(num_features)
    width = blocks[0].size
    subset = max(2, width // 4)
    for c, block in enumerate(blocks):
        patterns: set[bytes] = set()
        for m in range(len(FAILURE_MODES)):
            while True:
                offset = np.zeros(width)
                cols = rng.choice(width, size=subset, replace=False)
                offset[cols] = rng.choice([-1.0, 1.0], size=subset) * PROTOTYPE_MAGNITUDE
                if offset.tobytes() not in patterns:
                    patterns.add(offset.tobytes())
                    break
            protos[1 + c * len(FAILURE_MODES) + m, block] = offset
    return protos


def generate_dataset(spec: DomainSpec) -> Dataset:
    """Draw a dataset; rows are shuffled, output is a pure function of ``spec``."""
    spec = spec.resolved()
    counts = spec.class_counts()
    d = spec.num_features
    protos = class_prototypes(d, spec.seed)
    y = np.repeat(np.arange(len(LABEL_NAMES)), counts)
    noise = rng_stream(spec.seed, "noise", spec.domain).standard_normal((y.size, d))
    x = protos[y] + spec.noise_sigma * noise
    if spec.domain_shift > 0:
        # C-train and C-test come from the same network, so they share one shift.
        family = spec.domain.split("-")[0]
        shift = rng_stream(spec.seed, "shift", family).standard_normal(d)
        x = x + spec.domain_shift * shift
    perm = rng_stream(spec.seed, "shuffle", spec.domain).permutation(y.size)
    return Dataset(x[perm], y[perm], LABEL_NAMES, spec.domain, {"spec": spec.to_json()})


def stratified_split(
    d: Dataset, test_fraction: float = 0.2, seed: int = 42
) -> tuple[Dataset, Dataset]:
    """Split every class ``test_fraction`` / rest (at least one row each side when possible)."""
    rng = rng_stream(seed, "split")
    train_idx, test_idx = [], []
    for c in range(len(d.label_names)):
        members = np.flatnonzero(d.y == c)
        if members.size == 0:
            continue
        members = rng.permutation(members)
        n_test = math.floor(test_fraction * members.size + 0.5)
        if members.size > 1:
            n_test = min(max(n_test, 1), members.size - 1)
        test_idx.append(members[:n_test])
        train_idx.append(members[n_test:])
    train = np.sort(np.concatenate(train_idx))
    test = np.sort(np.concatenate(test_idx))
    return d.subset(train), d.subset(test)


def write_dataset(d: Dataset, path: str | Path) -> None:
    """CSV with header ``label,f0,...``; floats written with full precision."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["label", *(f"f{j}" for j in range(d.num_features))])
        for label, row in zip(d.y, d.X):
            writer.writerow([d.label_names[label], *map(repr, row.tolist())])


def read_dataset(path: str | Path, label_names: tuple[str, ...] = LABEL_NAMES) -> Dataset:
    """Parse a dataset CSV, validating header, row widths and labels.

    Raises:
        MalformedCsvError: bad header or unparseable number.
        RaggedRowError: a row with the wrong number of columns.
        UnknownLabelError: a label outside ``label_names``.
    """
    lookup = {name: k for k, name in enumerate(label_names)}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedCsvError(f"{path}: empty file") from None
        d = len(header) - 1
        if d < 1 or header[0] != "label" or header[1:] != [f"f{j}" for j in range(d)]:
            raise MalformedCsvError(f"{path}: header must be label,f0,...,f{{D-1}}")
        labels, rows = [], []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != d + 1:
                raise RaggedRowError(f"{path}:{lineno}: expected {d + 1} columns, got {len(row)}")
            if row[0] not in lookup:
                raise UnknownLabelError(f"{path}:{lineno}: unknown label {row[0]!r}")
            try:
                values = [float(v) for v in row[1:]]
            except ValueError as exc:
                raise MalformedCsvError(f"{path}:{lineno}: {exc}") from None
            labels.append(lookup[row[0]])
            rows.append(values)
    if not rows:
        raise MalformedCsvError(f"{path}: no data rows")
    x = np.array(rows, dtype=float)
    if not np.all(np.isfinite(x)):
        raise MalformedCsvError(f"{path}: non-finite feature values")
    return Dataset(x, np.array(labels, dtype=np.int64), tuple(label_names), "")
