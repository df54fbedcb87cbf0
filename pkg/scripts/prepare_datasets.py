"""Build the categorical CSV files under ``data/`` used by the test-suite.

Sources:

* ``data/raw/*.tab``  -- Orange3 bundled copies of UCI zoo, heart disease
  (Cleveland) and titanic.
* ``data/raw/*.csv``  -- R ``MASS`` copies of the Wisconsin breast cancer
  data (``biopsy``) and the Pima Indians diabetes data (``Pima.te`` and
  ``Pima.tr2``), as shipped by the ``pydataset`` sdist.
* scikit-learn bundled iris, wine and breast-cancer (diagnostic).
* exact generators for tic-tac-toe endgames, LED7, balance scale and the
  three MONK's problems.

Numeric attributes with more than ``MAX_CATEGORIES`` distinct values are cut
into equal-frequency bins; everything else is kept as-is. The bin count is
set per dataset in ``BINS`` so that the number of binary items comes out
close to the item counts of the widely used pre-binarized versions of these
datasets (breast 14, iris 14, pima 34, wine 63, heart 46; ties go to fewer
bins). Datasets without such a reference use ``DEFAULT_BINS``. Missing
values become ``?``. The label is always the last column.

Run from the repository root::

    python scripts/prepare_datasets.py
"""
import csv
import itertools
from pathlib import Path

import numpy as np
import pandas as pd
from sklearn import datasets as skdata

ROOT = Path(__file__).resolve().parents[1]
RAW = ROOT / "data" / "raw"
OUT = ROOT / "data"

DEFAULT_BINS = 3
BINS = {"breast": 2, "iris": 3, "pima": 4, "wine": 5, "heart": 4}
MAX_CATEGORIES = 5
MISSING = "?"


def discretize(frame, label, bins=DEFAULT_BINS):
    out = pd.DataFrame(index=frame.index)
    for col in frame.columns:
        values = frame[col]
        if col == label:
            out[col] = values.astype(str)
            continue
        numeric = pd.to_numeric(values, errors="coerce")
        is_numeric = numeric.notna().sum() == values.notna().sum()
        if is_numeric and numeric.nunique() > MAX_CATEGORIES:
            binned = pd.qcut(numeric, bins, duplicates="drop")
            labels = []
            for v in binned:
                if pd.isna(v):
                    labels.append(MISSING)
                else:
                    labels.append(f"({v.left:g},{v.right:g}]")
            out[col] = labels
        else:
            out[col] = [MISSING if pd.isna(v) else _fmt(v) for v in values]
    return out


def _fmt(v):
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return str(v).strip()


def write(name, frame):
    path = OUT / f"{name}.csv"
    frame.to_csv(path, index=False, quoting=csv.QUOTE_MINIMAL)
    print(f"{name:12s} rows={len(frame):5d} cols={frame.shape[1]}")


def read_tab(path):
    """Orange .tab: three header rows (names, types, flags)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh, delimiter="\t"))
    names, _, flags = rows[0], rows[1], rows[2]
    frame = pd.DataFrame(rows[3:], columns=names)
    frame = frame.replace({"": np.nan, "?": np.nan})
    keep = [n for n, f in zip(names, flags + [""] * len(names)) if f.strip() != "meta"]
    label = [n for n, f in zip(names, flags + [""] * len(names)) if f.strip() == "class"][0]
    feats = [n for n in keep if n != label]
    return frame[feats + [label]], label


def zoo():
    frame, label = read_tab(RAW / "zoo.tab")
    # 0/2/4/6/8 legs plus a single five-legged animal; merged with six so the
    # attribute expands to five dummies (35 items in total)
    frame["legs"] = frame["legs"].replace({"5": "5-6", "6": "5-6"})
    frame = frame.rename(columns={label: "type"})
    out = pd.DataFrame({c: frame[c].astype(str) for c in frame.columns})
    write("zoo", out)


def heart():
    frame, label = read_tab(RAW / "heart_disease.tab")
    write("heart", discretize(frame, label, BINS["heart"]))


def titanic():
    frame, label = read_tab(RAW / "titanic.tab")
    write("titanic", discretize(frame, label))


def breast():
    frame = pd.read_csv(RAW / "biopsy.csv").drop(columns=["Unnamed: 0", "ID"])
    write("breast", discretize(frame, "class", BINS["breast"]))


def pima():
    frames = [pd.read_csv(RAW / f) for f in ("Pima.te.csv", "Pima.tr2.csv")]
    frame = pd.concat(frames, ignore_index=True).drop(columns=["Unnamed: 0"])
    write("pima", discretize(frame, "type", BINS["pima"]))


def from_sklearn(name, bunch):
    frame = pd.DataFrame(bunch.data, columns=[str(c) for c in bunch.feature_names])
    frame["class"] = [str(bunch.target_names[t]) for t in bunch.target]
    write(name, discretize(frame, "class", BINS.get(name, DEFAULT_BINS)))


def tictactoe():
    lines = [(0, 1, 2), (3, 4, 5), (6, 7, 8), (0, 3, 6), (1, 4, 7), (2, 5, 8), (0, 4, 8), (2, 4, 6)]

    def winner(board):
        for a, b, c in lines:
            if board[a] != "b" and board[a] == board[b] == board[c]:
                return board[a]
        return None

    seen = {}

    def play(board, player):
        w = winner(board)
        if w is not None or "b" not in board:
            seen[tuple(board)] = "positive" if w == "x" else "negative"
            return
        for i, cell in enumerate(board):
            if cell == "b":
                board[i] = player
                play(board, "o" if player == "x" else "x")
                board[i] = "b"

    play(["b"] * 9, "x")
    names = ["top-left", "top-middle", "top-right", "middle-left", "middle-middle",
             "middle-right", "bottom-left", "bottom-middle", "bottom-right"]
    rows = [list(board) + [cls] for board, cls in sorted(seen.items())]
    write("tictactoe", pd.DataFrame(rows, columns=names + ["class"]))


def led7(n=3200, noise=0.1, seed=7):
    segments = {
        0: "1110111", 1: "0010010", 2: "1011101", 3: "1011011", 4: "0111010",
        5: "1101011", 6: "1101111", 7: "1010010", 8: "1111111", 9: "1111011",
    }
    rng = np.random.default_rng(seed)
    digits = rng.integers(0, 10, size=n)
    flips = rng.random((n, 7)) < noise
    rows = []
    for d, f in zip(digits, flips):
        bits = [int(b) ^ int(x) for b, x in zip(segments[int(d)], f)]
        rows.append([str(b) for b in bits] + [str(d)])
    write("led7", pd.DataFrame(rows, columns=[f"s{i}" for i in range(1, 8)] + ["digit"]))


def balance():
    rows = []
    for lw, ld, rw, rd in itertools.product(range(1, 6), repeat=4):
        left, right = lw * ld, rw * rd
        cls = "L" if left > right else ("R" if right > left else "B")
        rows.append([str(lw), str(ld), str(rw), str(rd), cls])
    write("balance", pd.DataFrame(rows, columns=["lw", "ld", "rw", "rd", "class"]))


def monks(noise=0.05, seed=3):
    grid = list(itertools.product((1, 2, 3), (1, 2, 3), (1, 2), (1, 2, 3), (1, 2, 3, 4), (1, 2)))
    rules = {
        "monk1": lambda a: a[0] == a[1] or a[4] == 1,
        "monk2": lambda a: sum(v == 1 for v in a) == 2,
        "monk3": lambda a: (a[4] == 3 and a[3] == 1) or (a[4] != 4 and a[1] != 3),
    }
    rng = np.random.default_rng(seed)
    for name, rule in rules.items():
        labels = [rule(a) for a in grid]
        if name == "monk3":
            flip = rng.random(len(grid)) < noise
            labels = [l ^ bool(f) for l, f in zip(labels, flip)]
        rows = [[str(v) for v in a] + ["1" if l else "0"] for a, l in zip(grid, labels)]
        write(name, pd.DataFrame(rows, columns=[f"a{i}" for i in range(1, 7)] + ["class"]))


def main():
    zoo()
    breast()
    pima()
    heart()
    titanic()
    from_sklearn("iris", skdata.load_iris())
    from_sklearn("wine", skdata.load_wine())
    from_sklearn("wdbc", skdata.load_breast_cancer())
    tictactoe()
    led7()
    balance()
    monks()


if __name__ == "__main__":
    main()
