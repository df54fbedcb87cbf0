"""Probabilistic rule lists: first-match cover, smoothed estimates, prediction, I/O."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bitset import to_indices
from .data import Dataset, Item

DEFAULT_EPSILON = 1.0
FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    """A serialized rule list could not be parsed."""


def estimate_theta(usage: Sequence[int], epsilon: float = DEFAULT_EPSILON) -> np.ndarray:
    """Laplace-smoothed class distribution ``(U_c + eps) / (U + |Y| eps)``."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    u = np.asarray(usage, dtype=np.float64)
    return (u + epsilon) / (u.sum() + u.size * epsilon)


@dataclass(frozen=True, eq=False)
class Rule:
    pattern: tuple[int, ...]
    usage: np.ndarray
    theta: np.ndarray

    @classmethod
    def from_usage(cls, pattern: Sequence[int], usage: Sequence[int],
                   epsilon: float = DEFAULT_EPSILON) -> "Rule":
        u = np.asarray(usage, dtype=np.int64)
        return cls(tuple(sorted(int(i) for i in pattern)), u, estimate_theta(u, epsilon))

    @property
    def total_usage(self) -> int:
        return int(self.usage.sum())

    def __eq__(self, other):
        return (isinstance(other, Rule) and self.pattern == other.pattern
                and np.array_equal(self.usage, other.usage)
                and np.array_equal(self.theta, other.theta))


@dataclass(frozen=True, eq=False)
class RuleList:
    """Ordered rules followed by the default rule.

    ``items`` and ``class_names`` are kept so the list can be printed and
    applied to new data without the training set.
    """

    rules: tuple[Rule, ...]
    default_usage: np.ndarray
    default_theta: np.ndarray
    items: tuple[Item, ...]
    class_names: tuple[str, ...]
    epsilon: float = DEFAULT_EPSILON
    trace: tuple = field(default=(), compare=False)

    @classmethod
    def build(cls, patterns: Sequence[Sequence[int]], dataset: Dataset,
              epsilon: float = DEFAULT_EPSILON) -> "RuleList":
        """Estimate every rule's usage and distribution from ``dataset``."""
        patterns = [tuple(sorted(int(i) for i in p)) for p in patterns]
        skeleton = cls(tuple(Rule(p, np.zeros(0), np.zeros(0)) for p in patterns),
                       np.zeros(0), np.zeros(0), dataset.items, dataset.class_names, epsilon)
        usages = cover(skeleton, dataset).class_usages(dataset)
        rules = tuple(Rule.from_usage(p, u, epsilon) for p, u in zip(patterns, usages))
        return cls(rules, usages[-1], estimate_theta(usages[-1], epsilon),
                   dataset.items, dataset.class_names, epsilon)

    @property
    def num_items(self) -> int:
        return len(self.items)

    @property
    def num_classes(self) -> int:
        return len(self.class_names)

    @property
    def patterns(self) -> list[tuple[int, ...]]:
        return [r.pattern for r in self.rules]

    def __len__(self):
        """Number of rules, default rule excluded."""
        return len(self.rules)

    @property
    def num_conditions(self) -> int:
        return sum(len(r.pattern) for r in self.rules)

    def __eq__(self, other):
        return (isinstance(other, RuleList) and self.rules == other.rules
                and np.array_equal(self.default_usage, other.default_usage)
                and np.array_equal(self.default_theta, other.default_theta)
                and self.items == other.items and self.class_names == other.class_names
                and self.epsilon == other.epsilon)

    def __str__(self):
        return to_text(self)

    # prediction -----------------------------------------------------------

    def _first_match(self, present: set[int] | frozenset[int]) -> int:
        for i, r in enumerate(self.rules):
            if all(item in present for item in r.pattern):
                return i
        return -1

    def predict_proba(self, instance) -> np.ndarray:
        """Distribution of the first rule whose antecedent holds, else the default.

        ``instance`` is a Boolean vector of length ``|V|``.
        """
        present = _instance_items(instance, self.num_items)
        i = self._first_match(present)
        return (self.rules[i].theta if i >= 0 else self.default_theta).copy()

    def predict(self, instance) -> int:
        """Most probable class; ties go to the smallest class index."""
        return int(np.argmax(self.predict_proba(instance)))

    def assign(self, dataset: Dataset) -> np.ndarray:
        """Index of the firing rule per instance (``len(self)`` for the default)."""
        out = np.full(dataset.n, len(self.rules), dtype=np.int64)
        for i, block in enumerate(cover(self, dataset).blocks[:-1]):
            out[to_indices(block)] = i
        return out

    def assign_matrix(self, X) -> np.ndarray:
        """Like :meth:`assign` for a dense ``n x |V|`` Boolean matrix."""
        X = np.asarray(X, dtype=bool)
        if X.ndim != 2 or X.shape[1] != self.num_items:
            raise ValueError(f"expected an n x {self.num_items} matrix, got shape {X.shape}")
        out = np.full(X.shape[0], len(self.rules), dtype=np.int64)
        free = np.ones(X.shape[0], dtype=bool)
        for i, r in enumerate(self.rules):
            hit = free & X[:, list(r.pattern)].all(axis=1)
            out[hit] = i
            free &= ~hit
        return out

    def predict_proba_matrix(self, X) -> np.ndarray:
        thetas = np.vstack([r.theta for r in self.rules] + [self.default_theta])
        return thetas[self.assign_matrix(X)]

    def predict_proba_dataset(self, dataset: Dataset) -> np.ndarray:
        thetas = np.vstack([r.theta for r in self.rules] + [self.default_theta])
        return thetas[self.assign(dataset)]

    def predict_dataset(self, dataset: Dataset) -> np.ndarray:
        return np.argmax(self.predict_proba_dataset(dataset), axis=1)


def _instance_items(instance, num_items: int) -> frozenset[int]:
    x = np.asarray(instance)
    if x.ndim != 1 or x.size != num_items:
        raise ValueError(f"instance must be a Boolean vector of length {num_items}, "
                         f"got shape {x.shape}")
    return frozenset(np.flatnonzero(x).tolist())


@dataclass(frozen=True)
class CoverPartition:
    """Instance-id bitsets per rule, the default block last."""

    blocks: tuple[int, ...]

    @property
    def usages(self) -> np.ndarray:
        return np.array([b.bit_count() for b in self.blocks], dtype=np.int64)

    def class_usages(self, dataset: Dataset) -> np.ndarray:
        """``(|R| + 1, |Y|)`` matrix of class-specific usages."""
        return np.array([[(b & cc).bit_count() for cc in dataset.class_covers]
                         for b in self.blocks], dtype=np.int64).reshape(len(self.blocks), -1)


def cover(rulelist: RuleList, dataset: Dataset) -> CoverPartition:
    """First-match partition: each instance goes to the first rule it satisfies."""
    remaining = dataset.all_mask
    blocks = []
    for r in rulelist.rules:
        for item in r.pattern:
            if not 0 <= item < dataset.num_items:
                raise ValueError(f"item {item} out of range")
        block = dataset.pattern_cover(r.pattern) & remaining
        blocks.append(block)
        remaining &= ~block
    blocks.append(remaining)
    return CoverPartition(tuple(blocks))


# serialization --------------------------------------------------------------

def to_text(rulelist: RuleList) -> str:
    """Human-readable IF / ELSE IF / ELSE listing.

    Each rule lists the classes it covers with their smoothed probabilities
    and usages; a rule covering nothing shows its most probable class.
    """
    names = rulelist.class_names
    rows: list[tuple[str, str, str, str]] = []

    def consequent(label, condition, theta, usage):
        shown = [c for c in range(len(names)) if usage[c] > 0] or [int(np.argmax(theta))]
        shown.sort(key=lambda c: (-theta[c], c))
        for k, c in enumerate(shown):
            prob = f"Pr({names[c]}) = {theta[c]:.2f}"
            rows.append((label if k == 0 else "", condition if k == 0 else "", prob,
                         str(int(usage[c]))))

    for i, r in enumerate(rulelist.rules):
        head = "IF" if i == 0 else "ELSE IF"
        cond = " AND ".join(str(rulelist.items[j]) for j in r.pattern)
        consequent(str(i + 1), f"{head} {{{cond}}} THEN", r.theta, r.usage)
    consequent("default", "ELSE" if rulelist.rules else "ALWAYS", rulelist.default_theta,
               rulelist.default_usage)
    widths = [max(len(row[k]) for row in rows + [("rule", "antecedent", "consequent", "usage")])
              for k in range(4)]
    header = ("rule", "antecedent", "consequent", "usage")
    lines = [_row(header, widths)]
    lines += [_row(row, widths) for row in rows]
    return "\n".join(lines) + "\n"


def _row(cells, widths):
    a, b, c, d = cells
    return f"{a:<{widths[0]}}  {b:<{widths[1]}}  {c:<{widths[2]}}  {d:>{widths[3]}}".rstrip()


def to_machine(rulelist: RuleList) -> str:
    """JSON document with everything needed to rebuild the list exactly."""
    doc = {
        "format": "mdlrules-rulelist",
        "version": FORMAT_VERSION,
        "epsilon": rulelist.epsilon,
        "class_names": list(rulelist.class_names),
        "items": [[it.column, it.value] for it in rulelist.items],
        "rules": [{"items": list(r.pattern),
                   "usage": [int(u) for u in r.usage],
                   "theta": [float(f"{t:.12g}") for t in r.theta]} for r in rulelist.rules],
        "default": {"usage": [int(u) for u in rulelist.default_usage],
                    "theta": [float(f"{t:.12g}") for t in rulelist.default_theta]},
    }
    return json.dumps(doc, indent=1) + "\n"


def from_machine(text: str) -> RuleList:
    """Inverse of :func:`to_machine`.

    Distributions are re-derived from the stored usages; the stored values
    must agree with them to the printed precision.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"not a JSON document: {exc}") from None
    try:
        if doc.get("format") != "mdlrules-rulelist":
            raise ModelFormatError("not a rule list document")
        eps = float(doc["epsilon"])
        names = tuple(str(c) for c in doc["class_names"])
        items = tuple(Item(str(c), str(v)) for c, v in doc["items"])
        if "default" not in doc:
            raise ModelFormatError("missing default rule")
        rules = []
        for r in doc["rules"]:
            pattern = tuple(int(i) for i in r["items"])
            if not pattern or any(not 0 <= i < len(items) for i in pattern):
                raise ModelFormatError(f"bad antecedent {pattern}")
            rules.append(_load_rule(pattern, r, names, eps))
        default = _load_rule((), doc["default"], names, eps)
    except ModelFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed rule list document: {exc!r}") from None
    return RuleList(tuple(rules), default.usage, default.theta, items, names, eps)


def _load_rule(pattern, entry, names, eps) -> Rule:
    usage = np.array([int(u) for u in entry["usage"]], dtype=np.int64)
    if usage.shape != (len(names),) or (usage < 0).any():
        raise ModelFormatError("usage vector does not match the classes")
    rule = Rule.from_usage(pattern, usage, eps)
    stored = np.array([float(t) for t in entry.get("theta", rule.theta)])
    if stored.shape != rule.theta.shape or not np.allclose(stored, rule.theta, rtol=0, atol=1e-9):
        raise ModelFormatError("stored probabilities disagree with usages")
    return rule
