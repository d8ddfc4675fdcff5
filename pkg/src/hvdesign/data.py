"""Dataset ingestion, quantizer calibration, synthetic data, and model files.

The model file is a little-endian binary format:

    magic      4 bytes  b"HDCM"
    version    u32      currently 1
    D, N, M, K u32 each
    seed       u64      base seed the level table was built from
    mins       f64 * N  per-feature calibration minima
    maxs       f64 * N  per-feature calibration maxima
    budgets    i32 * N*(M-1)  flip budget, row-major
    table      ceil(N*M*D / 8) bytes, bit-packed level hypervectors
    encoders   i32 * K*D, row-major
    counts     u32 * K  per-class training sample counts
    labels     u32 length + that many UTF-8 bytes of a JSON string list
    features   u32 length + that many UTF-8 bytes of a JSON string list
"""

from __future__ import annotations

import csv
import json
import math
import os
import struct
import tempfile
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, FormatError, ParseError, ShapeError
from .hypervector import FlipBudget, LevelTable, build_level_table, pack_signs, unpack_signs

MODEL_MAGIC = b"HDCM"
MODEL_VERSION = 1


@dataclass(frozen=True)
class Dataset:
    """Feature matrix plus dense integer labels (1..K)."""

    features: np.ndarray  # (S, N) float64
    labels: np.ndarray  # (S,) int64, values 1..K
    label_names: list
    feature_names: list | None = None
    split: str = "train"

    def __post_init__(self):
        f = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels, dtype=np.int64)
        if f.ndim != 2 or f.shape[0] < 1 or f.shape[1] < 1:
            raise ShapeError(f"feature matrix must be (S>=1, N>=1), got {f.shape}")
        if y.shape != (f.shape[0],):
            raise ShapeError("label count does not match sample count")
        if not np.all(np.isfinite(f)):
            raise DataError("dataset contains non-finite feature values")
        object.__setattr__(self, "features", f)
        object.__setattr__(self, "labels", y)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.label_names)


@dataclass(frozen=True)
class Quantizer:
    """Uniform per-feature quantizer into levels 1..M, calibrated on training data.

    Values below the calibrated minimum clamp to level 1, values at or above
    the maximum clamp to level M (the last interval is closed). Degenerate
    features (min == max) map everything to level 1.
    """

    mins: np.ndarray
    maxs: np.ndarray
    levels: int

    def __post_init__(self):
        mins = np.asarray(self.mins, dtype=np.float64)
        maxs = np.asarray(self.maxs, dtype=np.float64)
        if mins.shape != maxs.shape or mins.ndim != 1:
            raise ShapeError("mins and maxs must be equal-length 1-D arrays")
        if np.any(mins > maxs):
            raise ValueError("feature minimum exceeds maximum")
        object.__setattr__(self, "mins", mins)
        object.__setattr__(self, "maxs", maxs)

    @property
    def features(self) -> int:
        return self.mins.shape[0]

    @property
    def degenerate(self) -> np.ndarray:
        return self.mins == self.maxs

    def quantize_sample(self, x) -> np.ndarray:
        return self.quantize_matrix(np.asarray(x, dtype=np.float64)[None, :])[0]

    def quantize_matrix(self, x: np.ndarray) -> np.ndarray:
        """(S, N) values -> (S, N) levels in 1..M."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.features:
            raise ShapeError(f"expected (S, {self.features}) values, got {x.shape}")
        if not np.all(np.isfinite(x)):
            raise DataError("cannot quantize non-finite values")
        span = self.maxs - self.mins
        out = np.ones(x.shape, dtype=np.int64)
        ok = span > 0
        if np.any(ok):
            raw = 1 + np.floor((x[:, ok] - self.mins[ok]) * self.levels / span[ok])
            out[:, ok] = np.clip(raw, 1, self.levels).astype(np.int64)
        return out


def quantize_value(x: float, feature: int, quantizer: Quantizer) -> int:
    """Quantization level of a single scalar for one feature."""
    if not math.isfinite(x):
        raise DataError(f"cannot quantize non-finite value {x!r}")
    sample = quantizer.mins.copy()
    sample[feature] = x
    return int(quantizer.quantize_sample(sample)[feature])


def calibrate_quantizer(train: Dataset, levels: int) -> Quantizer:
    """Per-feature min/max from the training split only."""
    if levels < 2:
        raise ValueError(f"need at least 2 quantization levels, got {levels}")
    mins = train.features.min(axis=0)
    maxs = train.features.max(axis=0)
    q = Quantizer(mins=mins, maxs=maxs, levels=levels)
    if np.any(q.degenerate):
        idx = np.flatnonzero(q.degenerate).tolist()
        warnings.warn(f"degenerate (constant) features {idx} map to level 1 only")
    return q


def load_dataset_csv(path, label_column, label_names=None, split="train") -> Dataset:
    """Load a headered CSV; the label column is named or given as an index.

    Labels map to dense indices 1..K in first-appearance order unless an
    existing `label_names` list is supplied (test-time loading), in which
    case unseen labels are an error.
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"dataset file not found: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file, expected a header row") from None
        if len(set(header)) != len(header):
            dupes = sorted({h for h in header if header.count(h) > 1})
            raise ParseError(f"{path}: duplicate header names {dupes}")
        if isinstance(label_column, int):
            if not 0 <= label_column < len(header):
                raise ParseError(f"{path}: label column index {label_column} out of range")
            label_idx = label_column
        else:
            if label_column not in header:
                raise ParseError(f"{path}: no column named {label_column!r}")
            label_idx = header.index(label_column)

        feature_names = [h for i, h in enumerate(header) if i != label_idx]
        rows, raw_labels = [], []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise ParseError(
                    f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}"
                )
            raw_labels.append(row[label_idx])
            values = []
            for i, cell in enumerate(row):
                if i == label_idx:
                    continue
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(
                        f"{path}:{lineno}: non-numeric value {cell!r} in column {header[i]!r}"
                    ) from None
                if not math.isfinite(v):
                    raise ParseError(
                        f"{path}:{lineno}: non-finite value {cell!r} in column {header[i]!r}"
                    )
                values.append(v)
            rows.append(values)

    if not rows:
        raise DataError(f"{path}: no data rows")

    if label_names is None:
        names = []
        for lab in raw_labels:
            if lab not in names:
                names.append(lab)
    else:
        names = list(label_names)
        unseen = sorted(set(raw_labels) - set(names))
        if unseen:
            raise DataError(f"{path}: labels {unseen} never appeared in training data")
    index = {name: k + 1 for k, name in enumerate(names)}
    labels = np.array([index[lab] for lab in raw_labels], dtype=np.int64)
    return Dataset(
        features=np.array(rows, dtype=np.float64),
        labels=labels,
        label_names=names,
        feature_names=feature_names,
        split=split,
    )


def save_dataset_csv(dataset: Dataset, path) -> None:
    """Write a dataset back out in the ingestible CSV layout (label last)."""
    feature_names = dataset.feature_names or [f"f{i + 1}" for i in range(dataset.n_features)]
    with _atomic_open(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(feature_names + ["label"])
        for x, y in zip(dataset.features, dataset.labels):
            writer.writerow([repr(float(v)) for v in x] + [dataset.label_names[y - 1]])


# Synthetic four-class example: two features on the unit square, M=20
# reference levels. Class boundaries sit at the starts of levels 6, 11, 16
# on the first feature and levels 6, 16 on the second, cutting the square
# into a 4 x 3 grid of rectangles. The fixed lookup below assigns each
# rectangle a class; every cut line separates two different classes
# somewhere along its length, so all five boundary levels are critical,
# and the four class regions are contiguous blobs a nearest-encoder
# classifier can separate perfectly once those levels are spread apart.
MOTIVATIONAL_LEVELS = 20
MOTIVATIONAL_F1_CUTS = (0.25, 0.50, 0.75)  # starts of levels 6, 11, 16
MOTIVATIONAL_F2_CUTS = (0.25, 0.75)  # starts of levels 6, 16
# Indexed [row][column]: row 0 is the bottom f2 band, column 0 the left f1 band.
MOTIVATIONAL_LOOKUP = (
    (1, 1, 2, 2),
    (1, 2, 2, 4),
    (3, 3, 4, 4),
)


def motivational_label(x1: float, x2: float) -> int:
    col = sum(x1 >= c for c in MOTIVATIONAL_F1_CUTS)
    row = sum(x2 >= c for c in MOTIVATIONAL_F2_CUTS)
    return MOTIVATIONAL_LOOKUP[row][col]


def generate_motivational(grid_per_axis: int, seed=0) -> Dataset:
    """Deterministic grid over the unit square with the four-class layout."""
    if grid_per_axis < 20:
        raise ValueError(f"grid_per_axis must be >= 20, got {grid_per_axis}")
    axis = np.linspace(0.0, 1.0, grid_per_axis)
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    features = np.column_stack([xx.ravel(), yy.ravel()])
    labels = np.array(
        [motivational_label(x1, x2) for x1, x2 in features], dtype=np.int64
    )
    order = np.random.default_rng(seed).permutation(features.shape[0])
    return Dataset(
        features=features[order],
        labels=labels[order],
        label_names=["C1", "C2", "C3", "C4"],
        feature_names=["f1", "f2"],
        split="train",
    )


def _atomic_open(path, mode="w"):
    """Write to a temp file in the target directory, rename on close."""
    directory = os.path.dirname(os.path.abspath(path))

    class _AtomicFile:
        def __enter__(self):
            fd, self.tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
            self.fh = os.fdopen(fd, mode, **({"encoding": "utf-8", "newline": ""} if "b" not in mode else {}))
            return self.fh

        def __exit__(self, exc_type, exc, tb):
            self.fh.close()
            if exc_type is None:
                os.replace(self.tmp, path)
            else:
                os.unlink(self.tmp)
            return False

    return _AtomicFile()


def model_file_size(dim: int, n_features: int, levels: int, n_classes: int,
                    labels_json_bytes: int = 2, features_json_bytes: int = 2) -> int:
    """Exact serialized size in bytes for given shape parameters."""
    header = 4 + 4 + 4 * 4 + 8
    minmax = 16 * n_features
    budgets = 4 * n_features * (levels - 1)
    table = -(-n_features * levels * dim // 8)  # ceil
    encoders = 4 * n_classes * dim
    counts = 4 * n_classes
    blobs = 4 + labels_json_bytes + 4 + features_json_bytes
    return header + minmax + budgets + table + encoders + counts + blobs


def save_model(model, path) -> None:
    """Serialize a trained model; see the module docstring for the layout."""
    dim = model.table.dim
    n_feat, n_lvl = model.table.features, model.table.levels
    n_cls = model.n_classes
    budgets = model.table.budgets
    if budgets is None:
        raise FormatError("model's level table carries no flip budget; cannot serialize")
    encoders = np.asarray(model.encoders, dtype=np.int64)
    if np.any(np.abs(encoders) > np.iinfo(np.int32).max):
        raise FormatError("encoder entries exceed the int32 range of the model format")
    counts = np.asarray(model.metadata["class_counts"], dtype=np.uint32)
    labels_blob = json.dumps(model.labels).encode("utf-8")
    feats_blob = json.dumps(model.feature_names).encode("utf-8")

    table_bits = pack_signs(model.table.signs.reshape(-1))

    with _atomic_open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        fh.write(struct.pack("<IIIII", MODEL_VERSION, dim, n_feat, n_lvl, n_cls))
        fh.write(struct.pack("<Q", int(model.metadata["seed"])))
        fh.write(model.quantizer.mins.astype("<f8").tobytes())
        fh.write(model.quantizer.maxs.astype("<f8").tobytes())
        fh.write(budgets.budgets.astype("<i4").tobytes())
        fh.write(table_bits.tobytes())
        fh.write(encoders.astype("<i4").tobytes())
        fh.write(counts.astype("<u4").tobytes())
        fh.write(struct.pack("<I", len(labels_blob)))
        fh.write(labels_blob)
        fh.write(struct.pack("<I", len(feats_blob)))
        fh.write(feats_blob)


def load_model(path):
    """Inverse of save_model; the flip schedule is rebuilt from the stored
    seed and budget and checked against the stored table bits."""
    from .model import TrainedModel

    with open(path, "rb") as fh:
        raw = fh.read()

    def take(n):
        nonlocal offset
        if offset + n > len(raw):
            raise FormatError(f"{path}: truncated model file")
        chunk = raw[offset : offset + n]
        offset += n
        return chunk

    offset = 0
    if take(4) != MODEL_MAGIC:
        raise FormatError(f"{path}: bad magic bytes, not a model file")
    version, dim, n_feat, n_lvl, n_cls = struct.unpack("<IIIII", take(20))
    if version != MODEL_VERSION:
        raise FormatError(f"{path}: unsupported format version {version}")
    (seed,) = struct.unpack("<Q", take(8))
    mins = np.frombuffer(take(8 * n_feat), dtype="<f8").copy()
    maxs = np.frombuffer(take(8 * n_feat), dtype="<f8").copy()
    budgets = np.frombuffer(take(4 * n_feat * (n_lvl - 1)), dtype="<i4")
    budgets = budgets.reshape(n_feat, n_lvl - 1).astype(np.int64)
    n_table_bytes = -(-n_feat * n_lvl * dim // 8)
    table_bits = np.frombuffer(take(n_table_bytes), dtype=np.uint8)
    encoders = np.frombuffer(take(4 * n_cls * dim), dtype="<i4")
    encoders = encoders.reshape(n_cls, dim).astype(np.int64)
    counts = np.frombuffer(take(4 * n_cls), dtype="<u4").astype(np.int64)
    (n,) = struct.unpack("<I", take(4))
    labels = json.loads(take(n).decode("utf-8"))
    (n,) = struct.unpack("<I", take(4))
    feature_names = json.loads(take(n).decode("utf-8"))
    if offset != len(raw):
        raise FormatError(f"{path}: {len(raw) - offset} trailing bytes")

    budget = FlipBudget(budgets=budgets, dim=dim)
    table = build_level_table(seed, budget)
    stored = unpack_signs(table_bits, n_feat * n_lvl * dim).reshape(n_feat, n_lvl, dim)
    if not np.array_equal(stored, table.signs):
        raise FormatError(f"{path}: stored level table does not match its seed and budget")

    return TrainedModel(
        quantizer=Quantizer(mins=mins, maxs=maxs, levels=n_lvl),
        table=table,
        encoders=encoders,
        labels=labels,
        feature_names=feature_names,
        metadata={"seed": int(seed), "class_counts": counts.tolist()},
    )


def export_sample_hypervectors(model, dataset: Dataset, path) -> None:
    """Write the S x D sample-hypervector matrix plus labels as CSV, for
    external embedding tools."""
    from .hypervector import encode_quantized

    levels = model.quantizer.quantize_matrix(dataset.features)
    encoded = encode_quantized(levels, model.table)
    with _atomic_open(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"d{i}" for i in range(model.table.dim)] + ["label"])
        for x, y in zip(encoded, dataset.labels):
            writer.writerow([int(v) for v in x] + [int(y)])
