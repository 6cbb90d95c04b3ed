"""Measurement containers, landmark maps, and training-pair construction.

A measurement is one vector of L nonnegative signal weights, one weight per
landmark, where a larger weight means the landmark was heard stronger (i.e.
is closer). Raw dB-scale readings must be converted to linear weights before
they enter this module (see :mod:`landmark2vec.simulate`).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DataFormatError,
    DimensionMismatch,
    EmptyDataset,
    IndexOutOfRange,
    InvalidContextSize,
    InvalidDimension,
    TooFewPairs,
)

_TARGET_SUM_TOL = 1e-9


def _as_readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MeasurementVector:
    """One L-dimensional vector of nonnegative signal weights.

    Invariants: length >= 2, all entries finite and >= 0, at least one
    entry strictly positive.
    """

    values: np.ndarray

    def __post_init__(self):
        values = _as_readonly(self.values)
        if values.ndim != 1 or values.size < 2:
            raise InvalidDimension(
                f"measurement needs >= 2 landmark weights, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("measurement contains non-finite entries")
        if np.any(values < 0):
            raise ValueError("measurement weights must be nonnegative")
        if not np.any(values > 0):
            raise ValueError("measurement must have at least one positive weight")
        object.__setattr__(self, "values", values)

    @property
    def landmark_count(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class MeasurementSet:
    """Ordered collection of measurements, optionally with ground-truth coords.

    ``values`` is the (N, L) stack of measurement vectors; ``coords`` holds
    the (N, d) positions the measurements were taken at. Coordinates exist
    only for simulated or evaluation data and are never used for training.
    """

    values: np.ndarray
    coords: np.ndarray | None = None

    def __post_init__(self):
        values = _as_readonly(self.values)
        if values.ndim != 2 or values.shape[1] < 2 or values.shape[0] < 1:
            raise InvalidDimension(f"expected (N, L>=2) measurements, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("measurements contain non-finite entries")
        if np.any(values < 0):
            raise ValueError("measurement weights must be nonnegative")
        if not np.all(values.max(axis=1) > 0):
            bad = int(np.argmin(values.max(axis=1)))
            raise ValueError(f"measurement {bad} has no positive weight")
        object.__setattr__(self, "values", values)
        if self.coords is not None:
            coords = _as_readonly(self.coords)
            if coords.ndim != 2 or coords.shape[0] != values.shape[0]:
                raise DimensionMismatch(
                    f"coords shape {coords.shape} does not match {values.shape[0]} measurements"
                )
            if not np.all(np.isfinite(coords)):
                raise ValueError("coords contain non-finite entries")
            object.__setattr__(self, "coords", coords)

    @property
    def landmark_count(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return self.values.shape[0]

    def __getitem__(self, i: int) -> MeasurementVector:
        return MeasurementVector(self.values[i])

    def __iter__(self):
        for row in self.values:
            yield MeasurementVector(row)


@dataclass(frozen=True)
class TrainingPair:
    """A one-hot input index plus a sparse target distribution over landmarks."""

    input_index: int
    target: np.ndarray

    def __post_init__(self):
        target = _as_readonly(self.target)
        if target.ndim != 1 or target.size < 2:
            raise InvalidDimension(f"target must be a length-L vector, got {target.shape}")
        if not 0 <= self.input_index < target.size:
            raise IndexOutOfRange(
                f"input_index {self.input_index} outside [0, {target.size})"
            )
        if np.any(target < 0):
            raise ValueError("target entries must be nonnegative")
        if abs(target.sum() - 1.0) > _TARGET_SUM_TOL:
            raise ValueError(f"target must sum to 1, got {target.sum()!r}")
        if target[self.input_index] != 0.0:
            raise ValueError("target must be exactly zero at the input index")
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "input_index", int(self.input_index))

    @property
    def landmark_count(self) -> int:
        return self.target.size


@dataclass(frozen=True)
class LandmarkMap:
    """L landmark coordinates in d-dimensional space (d in {2, 3})."""

    coords: np.ndarray
    landmark_ids: tuple[int, ...] | None = None

    def __post_init__(self):
        coords = _as_readonly(self.coords)
        if coords.ndim != 2:
            raise InvalidDimension(f"coords must be (L, d), got {coords.shape}")
        if coords.shape[1] not in (2, 3):
            raise InvalidDimension(f"dimension must be 2 or 3, got {coords.shape[1]}")
        if not np.all(np.isfinite(coords)):
            raise ValueError("coords contain non-finite entries")
        object.__setattr__(self, "coords", coords)
        ids = self.landmark_ids
        if ids is None:
            ids = tuple(range(coords.shape[0]))
        else:
            ids = tuple(int(i) for i in ids)
            if len(ids) != coords.shape[0]:
                raise DimensionMismatch(
                    f"{len(ids)} landmark ids for {coords.shape[0]} coordinates"
                )
        object.__setattr__(self, "landmark_ids", ids)

    @property
    def landmark_count(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]


def build_pair(m: MeasurementVector, n: int) -> TrainingPair | None:
    """Turn one measurement into a (one-hot input, soft target) training pair.

    Keeps the ``n`` largest weights, uses the strongest landmark as the input
    index, zeroes it in the kept set, and renormalizes the remaining kept
    weights to a probability vector. Ties are broken toward the lowest
    landmark index. Returns None when fewer than two weights are strictly
    positive (no context to learn from).
    """
    values = m.values
    L = values.size
    if not 2 <= n <= L:
        raise InvalidContextSize(f"context size must be in [2, {L}], got {n}")
    if int(np.count_nonzero(values > 0)) < 2:
        return None
    # stable sort on the negated values: descending, ties -> lowest index first
    order = np.argsort(-values, kind="stable")
    center = int(order[0])
    context = order[1:n]
    target = np.zeros(L)
    target[context] = values[context]
    target /= target.sum()
    return TrainingPair(center, target)


def build_dataset(mset: MeasurementSet, n: int) -> tuple[list[TrainingPair], int]:
    """Build one training pair per measurement, preserving measurement order.

    Measurements without enough positive weights are dropped. Returns the
    pairs plus the number of skipped measurements.
    """
    pairs: list[TrainingPair] = []
    skipped = 0
    for i in range(len(mset)):
        pair = build_pair(MeasurementVector(mset.values[i]), n)
        if pair is None:
            skipped += 1
        else:
            pairs.append(pair)
    if not pairs:
        raise EmptyDataset("no measurement produced a valid training pair")
    return pairs, skipped


def split(
    pairs: list[TrainingPair], train_fraction: float, seed: int
) -> tuple[list[TrainingPair], list[TrainingPair]]:
    """Deterministically shuffle and partition pairs into (train, validation).

    The train size is floor(train_fraction * N), clamped so both partitions
    stay nonempty. The same seed reproduces the partition bit-exactly.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    count = len(pairs)
    if count < 2:
        raise TooFewPairs(f"need at least 2 pairs to split, got {count}")
    train_size = int(math.floor(train_fraction * count))
    train_size = max(1, min(train_size, count - 1))
    perm = np.random.default_rng(seed).permutation(count)
    train = [pairs[i] for i in perm[:train_size]]
    val = [pairs[i] for i in perm[train_size:]]
    return train, val


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------

_COORD_COLUMNS = ("x", "y", "z")


def measurement_header(landmark_count: int, coord_dim: int = 0) -> list[str]:
    cols = [f"m_{j}" for j in range(landmark_count)]
    cols.extend(_COORD_COLUMNS[:coord_dim])
    return cols


def write_measurement_csv(mset: MeasurementSet, path) -> None:
    """Write the measurement CSV: columns m_0..m_{L-1} plus optional x,y[,z]."""
    coord_dim = 0 if mset.coords is None else mset.coords.shape[1]
    header = ",".join(measurement_header(mset.landmark_count, coord_dim))
    if mset.coords is None:
        table = mset.values
    else:
        table = np.hstack([mset.values, mset.coords])
    np.savetxt(path, table, fmt="%.17g", delimiter=",", header=header, comments="")


def read_measurement_csv(path) -> MeasurementSet:
    """Read a measurement CSV back into a MeasurementSet."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        header_line = fh.readline().strip()
        if not header_line:
            raise DataFormatError(f"{path}: empty file")
        columns = [c.strip() for c in header_line.split(",")]
        L = 0
        while L < len(columns) and columns[L] == f"m_{L}":
            L += 1
        if L < 2:
            raise DataFormatError(
                f"{path}: header must start with m_0,m_1,... got {header_line!r}"
            )
        coord_cols = columns[L:]
        if tuple(coord_cols) not in {(), ("x", "y"), ("x", "y", "z")}:
            raise DataFormatError(
                f"{path}: trailing columns must be x,y[,z], got {coord_cols}"
            )
        try:
            table = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise DataFormatError(f"{path}: {exc}") from exc
    if table.size == 0:
        raise DataFormatError(f"{path}: no measurement rows")
    if table.shape[1] != len(columns):
        raise DataFormatError(
            f"{path}: rows have {table.shape[1]} fields, header has {len(columns)}"
        )
    values = table[:, :L]
    coords = table[:, L:] if coord_cols else None
    try:
        return MeasurementSet(values, coords)
    except (ValueError, DimensionMismatch) as exc:
        raise DataFormatError(f"{path}: {exc}") from exc


def write_map_csv(lmap: LandmarkMap, path) -> None:
    """Write a landmark map as landmark_id,x,y[,z] rows."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["landmark_id", *_COORD_COLUMNS[: lmap.dim]])
        for lid, row in zip(lmap.landmark_ids, lmap.coords):
            writer.writerow([lid, *[repr(float(v)) for v in row]])


def read_map_csv(path) -> LandmarkMap:
    """Read a landmark_id,x,y[,z] CSV back into a LandmarkMap."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty file") from None
        header = [c.strip() for c in header]
        if header not in (
            ["landmark_id", "x", "y"],
            ["landmark_id", "x", "y", "z"],
        ):
            raise DataFormatError(f"{path}: bad map header {header!r}")
        dim = len(header) - 1
        ids: list[int] = []
        rows: list[list[float]] = []
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != dim + 1:
                raise DataFormatError(f"{path}: row {line_no} has {len(row)} fields")
            try:
                ids.append(int(row[0]))
                rows.append([float(v) for v in row[1:]])
            except ValueError as exc:
                raise DataFormatError(f"{path}: row {line_no}: {exc}") from exc
    if not rows:
        raise DataFormatError(f"{path}: no landmark rows")
    try:
        return LandmarkMap(np.array(rows), tuple(ids))
    except (ValueError, DimensionMismatch, InvalidDimension) as exc:
        raise DataFormatError(f"{path}: {exc}") from exc
