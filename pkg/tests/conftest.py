import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from mdlrules import binarize, load_csv
from mdlrules.bitset import from_indices
from mdlrules.data import Dataset, Item

DATA = Path(__file__).resolve().parents[1] / "data"


def dataset_from_matrix(X, y, num_classes=None):
    """Dataset whose item ``j`` is column ``j`` of the Boolean matrix ``X``."""
    X = np.asarray(X, dtype=bool)
    y = np.asarray(y, dtype=np.int64)
    k = num_classes or max(2, int(y.max()) + 1)
    items = tuple(Item(f"x{j}", "1") for j in range(X.shape[1]))
    covers = tuple(from_indices(np.flatnonzero(X[:, j])) for j in range(X.shape[1]))
    return Dataset(items, covers, y, tuple(f"c{c}" for c in range(k)))


def random_dataset(rng, n, num_items, num_classes, density=0.5):
    X = rng.random((n, num_items)) < density
    y = rng.integers(0, num_classes, size=n)
    return dataset_from_matrix(X, y, num_classes)


@st.composite
def small_datasets(draw, max_n=60, max_items=8, max_classes=3):
    n = draw(st.integers(2, max_n))
    v = draw(st.integers(1, max_items))
    k = draw(st.integers(2, max_classes))
    seed = draw(st.integers(0, 2**32 - 1))
    density = draw(st.sampled_from([0.2, 0.5, 0.8]))
    return random_dataset(np.random.default_rng(seed), n, v, k, density)


@pytest.fixture(scope="session")
def zoo():
    return binarize(load_csv(DATA / "zoo.csv"))


def item_index(dataset, column, value):
    for j, it in enumerate(dataset.items):
        if it.column == column and it.value == value:
            return j
    raise KeyError((column, value))


@pytest.fixture(scope="session")
def zoo_patterns(zoo):
    """The four single-condition antecedents of the illustrative zoo list."""
    return [(item_index(zoo, c, v),) for c, v in
            [("backbone", "0"), ("breathes", "0"), ("feathers", "1"), ("milk", "0")]]


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    results = getattr(acceptance, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for name, (ok, detail) in results.items():
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
