"""Code lengths, in bits, of rule-list models and of class labels given a model.

All logarithms are base 2. The label code is the prequential plug-in code
with a symmetric pseudocount ``epsilon``; its length for one block of labels
only depends on the per-class counts, and is computed from cumulative
log-gamma tables.
"""
from __future__ import annotations

import math
import threading
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

if TYPE_CHECKING:
    from .data import Dataset
    from .rulelist import RuleList

K0 = 2.865064
LOG2_K0 = math.log2(K0)

LITERAL = "literal"
SHIFTED = "shifted"


def universal_integer_code_length(i: int) -> float:
    """Rissanen's universal code ``log2(k0) + log2(i) + log2(log2(i)) + ...``.

    Only strictly positive terms of the iterated logarithm are summed.
    """
    if i < 1 or int(i) != i:
        raise ValueError(f"universal code is defined for positive integers, got {i}")
    total = LOG2_K0
    term = math.log2(i)
    while term > 0:
        total += term
        term = math.log2(term)
    return total


def rule_count_code_length(num_rules: int, convention: str = LITERAL) -> float:
    """Length of the rule count |R| (default rule excluded).

    ``literal`` encodes ``L_N(|R|)`` and falls back to ``L_N(1)`` for an empty
    list; ``shifted`` encodes ``L_N(|R| + 1)``.
    """
    if num_rules < 0:
        raise ValueError("negative rule count")
    if convention == LITERAL:
        return universal_integer_code_length(max(num_rules, 1))
    if convention == SHIFTED:
        return universal_integer_code_length(num_rules + 1)
    raise ValueError(f"unknown rule-count convention {convention!r}")


def pattern_code_length(length: int | Sequence[int], num_items: int) -> float:
    """``L_N(|a|) + |a| log2 |V|``; accepts a pattern or its length."""
    if not isinstance(length, (int, np.integer)):
        length = len(length)
    if length < 1 or num_items < 1:
        raise ValueError("pattern length and number of items must be positive")
    return universal_integer_code_length(int(length)) + length * math.log2(num_items)


def model_code_length(rulelist: "RuleList | Iterable[Sequence[int]]", num_items: int | None = None,
                      convention: str = LITERAL) -> float:
    """``L(R)``: the rule count followed by every antecedent."""
    patterns = [r.pattern for r in rulelist.rules] if hasattr(rulelist, "rules") else list(rulelist)
    if num_items is None:
        num_items = rulelist.num_items
    return rule_count_code_length(len(patterns), convention) + sum(
        pattern_code_length(len(p), num_items) for p in patterns)


class LogGammaTable:
    """``table[k] = log2 Gamma(k + offset) - log2 Gamma(offset)``.

    Built by the recurrence ``table[k] = table[k-1] + log2(k - 1 + offset)``;
    with ``offset = 1`` this is the table of ``log2 k!``. Grows on demand.
    """

    def __init__(self, offset: float = 1.0, size: int = 0):
        if offset <= 0:
            raise ValueError("offset must be positive")
        self.offset = float(offset)
        self._values = np.zeros(1, dtype=np.float64)
        self._lock = threading.Lock()
        self.ensure(size)

    def ensure(self, size: int) -> None:
        if size < len(self._values):
            return
        with self._lock:
            old = len(self._values)
            if size < old:
                return
            new = max(size + 1, 2 * old)
            steps = np.log2(np.arange(old - 1, new - 1, dtype=np.float64) + self.offset)
            values = np.empty(new, dtype=np.float64)
            values[:old] = self._values
            # sequential accumulation so table[k] - table[k-1] is exactly the step
            acc = self._values[-1]
            for k in range(old, new):
                acc = acc + steps[k - old]
                values[k] = acc
            self._values = values

    @property
    def values(self) -> np.ndarray:
        return self._values

    def __len__(self):
        return len(self._values)

    def __getitem__(self, k):
        if isinstance(k, (int, np.integer)):
            self.ensure(int(k))
        else:
            k = np.asarray(k)
            if k.size:
                self.ensure(int(k.max()))
        return self._values[k]


class PluginCode:
    """Prequential plug-in code lengths for a fixed pseudocount and class count."""

    def __init__(self, num_classes: int, epsilon: float = 1.0, size: int = 0):
        if epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if num_classes < 1:
            raise ValueError("num_classes must be positive")
        self.num_classes = int(num_classes)
        self.epsilon = float(epsilon)
        self.per_class = _table(self.epsilon, size)
        self.total = _table(self.epsilon * self.num_classes, size)

    def block(self, usages: Sequence[int]) -> float:
        counts = np.asarray(usages, dtype=np.int64)
        if counts.shape != (self.num_classes,):
            raise ValueError(f"expected {self.num_classes} class counts, got {counts.shape}")
        if (counts < 0).any():
            raise ValueError("negative usage")
        if not counts.any():
            return 0.0
        return float(self.total[int(counts.sum())] - self.per_class[counts].sum())

    def blocks(self, usages: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`block` over the rows of a ``(m, |Y|)`` count matrix."""
        counts = np.asarray(usages, dtype=np.int64)
        return self.total[counts.sum(axis=1)] - self.per_class[counts].sum(axis=1)


_TABLES: dict[float, LogGammaTable] = {}
_TABLES_LOCK = threading.Lock()


def _table(offset: float, size: int) -> LogGammaTable:
    with _TABLES_LOCK:
        table = _TABLES.get(offset)
        if table is None:
            table = _TABLES[offset] = LogGammaTable(offset)
    table.ensure(size)
    return table


def plugin_block_code_length(usages: Sequence[int], epsilon: float = 1.0,
                             num_classes: int | None = None) -> float:
    """Plug-in code length of one block of labels with the given class counts.

    Equals ``-log2 prod_c Gamma(U_c + eps) / Gamma(eps)
    / (Gamma(U + eps |Y|) / Gamma(eps |Y|))``.
    """
    usages = np.asarray(usages, dtype=np.int64)
    if num_classes is None:
        num_classes = usages.size
    return PluginCode(num_classes, epsilon).block(usages)


def data_code_length(rulelist: "RuleList", dataset: "Dataset", epsilon: float | None = None) -> float:
    """``L(Y | X, R)``: sum of block lengths over the cover partition, default included."""
    from .rulelist import cover

    eps = rulelist.epsilon if epsilon is None else epsilon
    code = PluginCode(dataset.num_classes, eps, dataset.n)
    part = cover(rulelist, dataset)
    return float(sum(code.block(u) for u in part.class_usages(dataset)))


def total_code_length(rulelist: "RuleList", dataset: "Dataset", num_items: int | None = None,
                      convention: str = LITERAL, epsilon: float | None = None) -> float:
    """``L(D, R) = L(Y | X, R) + L(R)``."""
    if num_items is None:
        num_items = rulelist.num_items
    return (data_code_length(rulelist, dataset, epsilon)
            + model_code_length(rulelist, num_items, convention))


def baseline_code_length(dataset: "Dataset", epsilon: float = 1.0,
                         convention: str = LITERAL) -> float:
    """``L(D, {empty})``: only the default rule, i.e. the class prior."""
    code = PluginCode(dataset.num_classes, epsilon, dataset.n)
    return rule_count_code_length(0, convention) + code.block(dataset.class_counts)


def relative_compression(rulelist: "RuleList", dataset: "Dataset", num_items: int | None = None,
                         convention: str = LITERAL, epsilon: float | None = None) -> float:
    """``L(D, R) / L(D, {empty})``; below 1 means the list beats the class prior."""
    eps = rulelist.epsilon if epsilon is None else epsilon
    return (total_code_length(rulelist, dataset, num_items, convention, eps)
            / baseline_code_length(dataset, eps, convention))
