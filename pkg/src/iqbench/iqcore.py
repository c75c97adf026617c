"""Readout shots, datasets, splitting and CSV interchange.

A :class:`Dataset` stores its shots column-wise: an ``(n, 2)`` float array of
IQ coordinates and an ``(n,)`` label array (0 = ground, 1 = excited). Both
arrays are read-only, so datasets can be shared freely between threads.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

from .errors import (BadFraction, DatasetTooSmall, EmptyClass, NonFiniteValue,
                     ParseError)

CSV_HEADER = ("i", "q", "state")


class StateLabel(enum.IntEnum):
    GROUND = 0
    EXCITED = 1


class IQPoint(NamedTuple):
    i: float
    q: float


class LabeledShot(NamedTuple):
    point: IQPoint
    label: StateLabel


def _frozen(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dataset:
    points: np.ndarray
    labels: np.ndarray
    seed: int = 0

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64).reshape(-1, 2)
        lab = np.asarray(self.labels).reshape(-1)
        if len(pts) != len(lab):
            raise ValueError(f"{len(pts)} points but {len(lab)} labels")
        if not np.all(np.isfinite(pts)):
            raise NonFiniteValue(int(np.argwhere(~np.isfinite(pts))[0, 0]),
                                 "i/q", "non-finite coordinate")
        if lab.size and not np.all((lab == 0) | (lab == 1)):
            raise ValueError("labels must be 0 (ground) or 1 (excited)")
        object.__setattr__(self, "points", _frozen(pts))
        object.__setattr__(self, "labels", _frozen(lab.astype(np.int8)))
        object.__setattr__(self, "seed", int(self.seed))

    @classmethod
    def from_shots(cls, shots: Iterable[LabeledShot], seed: int = 0) -> "Dataset":
        shots = list(shots)
        pts = np.array([[s.point[0], s.point[1]] for s in shots], dtype=np.float64)
        lab = np.array([int(s.label) for s in shots], dtype=np.int8)
        return cls(pts.reshape(-1, 2), lab, seed)

    @property
    def shots(self) -> list[LabeledShot]:
        return [LabeledShot(IQPoint(float(p[0]), float(p[1])), StateLabel(int(l)))
                for p, l in zip(self.points, self.labels)]

    def __len__(self):
        return len(self.labels)

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (np.array_equal(self.points, other.points)
                and np.array_equal(self.labels, other.labels))

    __hash__ = None

    def class_counts(self) -> dict[StateLabel, int]:
        n1 = int(np.count_nonzero(self.labels))
        return {StateLabel.GROUND: len(self) - n1, StateLabel.EXCITED: n1}

    def require_both_classes(self, where="dataset"):
        for label, count in self.class_counts().items():
            if count == 0:
                raise EmptyClass(label.name, where)

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx)
        return Dataset(self.points[idx], self.labels[idx], self.seed)

    def centroid(self, label) -> np.ndarray:
        return self.points[self.labels == int(label)].mean(axis=0)


@dataclass(frozen=True)
class SplitDataset:
    train: Dataset
    test: Dataset
    test_fraction: float


def holdout_size(n: int, test_fraction: float) -> int:
    """Number of test shots: ``round(test_fraction * n)``, halves rounded up."""
    return int(math.floor(test_fraction * n + 0.5))


def split(data: Dataset, test_fraction: float = 0.25, seed: int = 0,
          stratify: bool = False) -> SplitDataset:
    """Shuffle-split ``data`` into train and test partitions.

    The test partition holds ``round(test_fraction * N)`` shots. Both
    partitions keep the original relative order of their shots. With
    ``stratify`` the test shots are allocated per class (largest remainder)
    so class proportions are preserved as closely as integer counts allow.
    """
    if not (0.0 < test_fraction < 1.0):
        raise BadFraction(f"test_fraction must lie in (0, 1), got {test_fraction}")
    n = len(data)
    if n < 4:
        raise DatasetTooSmall(f"need at least 4 shots to split, got {n}")
    data.require_both_classes()
    n_test = holdout_size(n, test_fraction)
    rng = np.random.default_rng(seed)
    if not stratify:
        test_idx = rng.permutation(n)[:n_test]
    else:
        by_class = [np.flatnonzero(data.labels == c) for c in (0, 1)]
        quota = [len(ix) * test_fraction for ix in by_class]
        take = [int(math.floor(x)) for x in quota]
        remainders = sorted(range(2), key=lambda c: take[c] - quota[c])
        for c in remainders[: n_test - sum(take)]:
            take[c] += 1
        test_idx = np.concatenate([rng.permutation(ix)[:k] for ix, k in zip(by_class, take)])
    mask = np.zeros(n, dtype=bool)
    mask[test_idx] = True
    return SplitDataset(data.subset(np.flatnonzero(~mask)), data.subset(np.flatnonzero(mask)),
                        float(test_fraction))


def _parse_float(text, row, column):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(row, column, f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise NonFiniteValue(row, column, f"non-finite value {text!r}")
    return value


def load_csv(path, seed: int = 0) -> Dataset:
    """Read a ``i,q,state`` CSV file. ``row`` in errors is the 1-based file line."""
    path = Path(path)
    points, labels = [], []
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise ParseError(1, "header", f"expected {','.join(CSV_HEADER)}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(lineno, "state" if len(row) < 3 else "extra",
                                 f"expected 3 fields, got {len(row)}")
            i = _parse_float(row[0], lineno, "i")
            q = _parse_float(row[1], lineno, "q")
            state = row[2].strip()
            if state not in ("0", "1"):
                raise ParseError(lineno, "state", f"state must be 0 or 1, got {state!r}")
            points.append((i, q))
            labels.append(int(state))
    return Dataset(np.array(points, dtype=np.float64).reshape(-1, 2),
                   np.array(labels, dtype=np.int8), seed)


def save_csv(data: Dataset, path) -> None:
    """Write ``data`` with 17 significant digits so doubles round-trip exactly."""
    path = Path(path)
    lines = ["i,q,state"]
    lines += [f"{p[0]:.17g},{p[1]:.17g},{int(l)}" for p, l in zip(data.points.tolist(),
                                                                data.labels.tolist())]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
