"""Loading categorical CSV files and turning them into Boolean item data."""
from __future__ import annotations

import csv
import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .bitset import from_indices, to_indices

logger = logging.getLogger(__name__)

class DataError(ValueError):
    """Malformed input file or an unusable configuration."""


@dataclass(frozen=True)
class RawTable:
    column_names: list[str]
    rows: list[list[str]]
    label_column: int

    def __post_init__(self):
        if not self.rows:
            raise DataError("empty table")
        if not 0 <= self.label_column < len(self.column_names):
            raise DataError(f"label column {self.label_column} out of range")
        width = len(self.column_names)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise DataError(f"row {i + 1} has {len(row)} fields, expected {width}")

    @property
    def feature_columns(self) -> list[int]:
        return [j for j in range(len(self.column_names)) if j != self.label_column]


@dataclass(frozen=True)
class Item:
    """A single Boolean condition ``column = value``."""

    column: str
    value: str

    def __str__(self):
        return f"{self.column} = {self.value}"


@dataclass(frozen=True, eq=False)
class Dataset:
    """Binarized data: one instance-id bitset per item plus class labels.

    Bit ``i`` of ``item_covers[j]`` is set iff instance ``i`` has item ``j``.
    """

    items: tuple[Item, ...]
    item_covers: tuple[int, ...]
    labels: np.ndarray
    class_names: tuple[str, ...]
    class_counts: np.ndarray = field(init=False)
    class_covers: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        k = len(self.class_names)
        if k < 2:
            raise DataError("at least two classes are required")
        if labels.size and (labels.min() < 0 or labels.max() >= k):
            raise DataError("label index out of range")
        counts = np.bincount(labels, minlength=k).astype(np.int64)
        counts.setflags(write=False)
        object.__setattr__(self, "class_counts", counts)
        covers = tuple(from_indices(np.flatnonzero(labels == c)) for c in range(k))
        object.__setattr__(self, "class_covers", covers)
        full = self.all_mask
        for cov in self.item_covers:
            if cov & ~full:
                raise DataError("item cover refers to a non-existent instance")

    @property
    def n(self) -> int:
        return int(self.labels.size)

    @property
    def num_items(self) -> int:
        return len(self.items)

    @property
    def num_classes(self) -> int:
        return len(self.class_names)

    @property
    def all_mask(self) -> int:
        return (1 << self.n) - 1

    def pattern_cover(self, pattern: Sequence[int]) -> int:
        cover = self.all_mask
        for item in pattern:
            cover &= self.item_covers[item]
        return cover

    def instance_items(self, i: int) -> frozenset[int]:
        bit = 1 << i
        return frozenset(j for j, cov in enumerate(self.item_covers) if cov & bit)

    def to_matrix(self) -> np.ndarray:
        """Dense ``n x |V|`` Boolean matrix (row ``i`` is instance ``i``)."""
        X = np.zeros((self.n, self.num_items), dtype=bool)
        for j, cov in enumerate(self.item_covers):
            X[to_indices(cov), j] = True
        return X

    def subset(self, indices: Sequence[int]) -> "Dataset":
        """Instances ``indices`` (in that order) with the same items and classes."""
        indices = np.asarray(indices, dtype=np.int64)
        X = self.to_matrix()[indices]
        covers = tuple(from_indices(np.flatnonzero(X[:, j])) for j in range(self.num_items))
        return Dataset(self.items, covers, self.labels[indices], self.class_names)


def resolve_label(column_names: Sequence[str], selector: str | int | None) -> int:
    if selector is None:
        return len(column_names) - 1
    if isinstance(selector, int):
        idx = selector
    elif selector in column_names:
        return list(column_names).index(selector)
    else:
        try:
            idx = int(selector)
        except ValueError:
            raise DataError(f"label column {selector!r} not found") from None
    if idx < 0:
        idx += len(column_names)
    if not 0 <= idx < len(column_names):
        raise DataError(f"label column index {selector} out of range")
    return idx


def load_csv(path: str | Path, label: str | int | None = None) -> RawTable:
    """Read a header-first CSV file; the label defaults to the last column."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        rows = []
        for lineno, row in enumerate(reader, start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(header):
                raise DataError(
                    f"{path}: row {lineno} has {len(row)} fields, expected {len(header)}"
                )
            rows.append([v.strip() for v in row])
    if not rows:
        raise DataError(f"{path}: no data rows")
    return RawTable(header, rows, resolve_label(header, label))


def binarize(table: RawTable) -> Dataset:
    """One dummy item per distinct ``(column, value)`` of every non-label column.

    Items are ordered by column, then by first appearance of the value; class
    indices follow first appearance of the class name. A missing-value marker
    such as ``?`` is just another category.
    """
    items: list[Item] = []
    covers: list[int] = []
    n = len(table.rows)
    for j in table.feature_columns:
        index: dict[str, int] = {}
        members: list[list[int]] = []
        for i, row in enumerate(table.rows):
            v = row[j]
            if v not in index:
                index[v] = len(members)
                members.append([])
            members[index[v]].append(i)
        for v, ids in zip(index, members):
            items.append(Item(table.column_names[j], v))
            covers.append(from_indices(ids))
    class_index: dict[str, int] = {}
    labels = np.empty(n, dtype=np.int64)
    for i, row in enumerate(table.rows):
        y = row[table.label_column]
        labels[i] = class_index.setdefault(y, len(class_index))
    return Dataset(tuple(items), tuple(covers), labels, tuple(class_index))


def encode_rows(dataset: Dataset, table: RawTable) -> Dataset:
    """Binarize ``table`` against the items and classes of an existing dataset.

    Values never seen in ``dataset`` set no item. Unknown class names raise.
    """
    names = table.column_names
    lookup = {(it.column, it.value): j for j, it in enumerate(dataset.items)}
    members: list[list[int]] = [[] for _ in dataset.items]
    for i, row in enumerate(table.rows):
        for j in table.feature_columns:
            idx = lookup.get((names[j], row[j]))
            if idx is not None:
                members[idx].append(i)
    class_index = {c: k for k, c in enumerate(dataset.class_names)}
    labels = []
    for i, row in enumerate(table.rows):
        y = row[table.label_column]
        if y not in class_index:
            raise DataError(f"row {i + 1}: unknown class {y!r}")
        labels.append(class_index[y])
    return Dataset(dataset.items, tuple(from_indices(m) for m in members),
                   np.array(labels, dtype=np.int64), dataset.class_names)


def encode_features(items: Sequence[Item], column_names: Sequence[str],
                    rows: Sequence[Sequence[str]]) -> np.ndarray:
    """Dense ``n x |V|`` Boolean matrix of ``rows`` against a fixed item list.

    Columns are matched by name; columns no item refers to are ignored.
    """
    position = {name: j for j, name in enumerate(column_names)}
    missing = sorted({it.column for it in items} - set(position))
    if missing:
        raise DataError(f"input lacks columns {missing}")
    X = np.zeros((len(rows), len(items)), dtype=bool)
    for k, it in enumerate(items):
        j = position[it.column]
        X[:, k] = [row[j] == it.value for row in rows]
    return X


def unbinarize(dataset: Dataset) -> list[list[str]]:
    """Rebuild categorical rows (feature columns in item order, label last)."""
    columns: list[str] = []
    for it in dataset.items:
        if it.column not in columns:
            columns.append(it.column)
    rows = [[""] * len(columns) + [dataset.class_names[y]] for y in dataset.labels]
    pos = {c: k for k, c in enumerate(columns)}
    for it, cov in zip(dataset.items, dataset.item_covers):
        for i in to_indices(cov):
            rows[i][pos[it.column]] = it.value
    return rows


@dataclass(frozen=True)
class FoldPlan:
    k: int
    repeats: int
    seed: int
    assignments: np.ndarray  # shape (repeats, n), fold index per instance

    def split(self, repeat: int, fold: int) -> tuple[np.ndarray, np.ndarray]:
        """(train, test) instance indices, both sorted ascending."""
        a = self.assignments[repeat]
        return np.flatnonzero(a != fold), np.flatnonzero(a == fold)

    def splits(self):
        for r in range(self.repeats):
            for f in range(self.k):
                yield r, f, *self.split(r, f)


def make_folds(labels: Sequence[int] | Dataset, k: int = 10, repeats: int = 1,
               seed: int = 0) -> FoldPlan:
    """Stratified, seeded fold assignment.

    Per repetition every class is shuffled, the classes are concatenated and
    instances are dealt round-robin to the ``k`` folds, so per-class counts
    across folds differ by at most one.
    """
    if isinstance(labels, Dataset):
        labels = labels.labels
    labels = np.asarray(labels)
    n = labels.size
    if k < 2:
        raise DataError("k must be at least 2")
    if k > n:
        raise DataError(f"k={k} exceeds the number of instances ({n})")
    classes, counts = np.unique(labels, return_counts=True)
    if (counts < k).any():
        warnings.warn(f"some classes have fewer than k={k} instances; "
                      "stratification is best-effort", stacklevel=2)
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(repeats)]
    assignments = np.empty((repeats, n), dtype=np.int64)
    for r, rng in enumerate(rngs):
        order = np.concatenate([rng.permutation(np.flatnonzero(labels == c)) for c in classes])
        assignments[r, order] = np.arange(n) % k
    assignments.setflags(write=False)
    return FoldPlan(k, repeats, seed, assignments)
