"""Candidate antecedents: per-class frequent itemsets and redundancy pruning."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Sequence

from .data import Dataset

Pattern = tuple[int, ...]


@dataclass(frozen=True)
class CandidateSet:
    """Patterns in canonical order with their covers on the training data."""

    patterns: tuple[Pattern, ...]
    covers: tuple[int, ...]
    supports: tuple[int, ...]

    def __len__(self):
        return len(self.patterns)

    def __iter__(self) -> Iterator[tuple[Pattern, int, int]]:
        return iter(zip(self.patterns, self.covers, self.supports))

    @classmethod
    def from_patterns(cls, dataset: Dataset, patterns: Sequence[Sequence[int]]) -> "CandidateSet":
        """Canonicalize arbitrary patterns and compute their covers."""
        uniq = sorted({tuple(sorted(set(p))) for p in patterns if len(p) > 0},
                      key=canonical_key)
        covers = tuple(dataset.pattern_cover(p) for p in uniq)
        return cls(tuple(uniq), covers, tuple(c.bit_count() for c in covers))


def canonical_key(pattern: Pattern):
    return len(pattern), pattern


def class_thresholds(dataset: Dataset, min_support: float) -> list[int]:
    """Absolute per-class thresholds ``ceil(min_support * |D^{y=c}|)``, at least 1."""
    if not 0 < min_support <= 1:
        raise ValueError("min_support must be in (0, 1]")
    # round() guards against 0.05 * 100 = 5.000000000000001
    return [max(1, math.ceil(round(min_support * int(n), 9))) for n in dataset.class_counts]


def mine(dataset: Dataset, min_support: float = 0.05, max_length: int = 4) -> CandidateSet:
    """All patterns of length ``1..max_length`` frequent in at least one class.

    Depth-first search over tid-set intersections (Eclat). Frequency in some
    class is anti-monotone, so a prefix that fails is never extended.
    """
    if max_length < 1:
        raise ValueError("max_length must be positive")
    thresholds = class_thresholds(dataset, min_support)
    class_covers = dataset.class_covers

    def frequent(cover: int) -> bool:
        for cc, t in zip(class_covers, thresholds):
            if (cover & cc).bit_count() >= t:
                return True
        return False

    found: list[tuple[Pattern, int]] = []

    def extend(prefix: Pattern, members: list[tuple[int, int]]):
        for i, (item, cover) in enumerate(members):
            pattern = prefix + (item,)
            found.append((pattern, cover))
            if len(pattern) < max_length:
                tail = []
                for other, other_cover in members[i + 1:]:
                    joint = cover & other_cover
                    if frequent(joint):
                        tail.append((other, joint))
                if tail:
                    extend(pattern, tail)

    roots = [(j, cov) for j, cov in enumerate(dataset.item_covers) if frequent(cov)]
    extend((), roots)
    found.sort(key=lambda pc: canonical_key(pc[0]))
    return CandidateSet(tuple(p for p, _ in found), tuple(c for _, c in found),
                        tuple(c.bit_count() for _, c in found))


def remove_redundant(cands: CandidateSet) -> CandidateSet:
    """Drop every pattern that has a retained strict subset with equal support.

    Such a superset covers exactly the same instances as its subset but costs
    more bits to describe, so the search could never prefer it.
    """
    order = sorted(range(len(cands)), key=lambda i: canonical_key(cands.patterns[i]))
    retained: dict[Pattern, int] = {}
    keep: list[int] = []
    for i in order:
        pattern, support = cands.patterns[i], cands.supports[i]
        if not _has_equal_subset(pattern, support, retained):
            retained[pattern] = support
            keep.append(i)
    return CandidateSet(tuple(cands.patterns[i] for i in keep),
                        tuple(cands.covers[i] for i in keep),
                        tuple(cands.supports[i] for i in keep))


def _has_equal_subset(pattern: Pattern, support: int, retained: dict[Pattern, int]) -> bool:
    size = len(pattern)
    if size < 2:
        return False
    if size <= _ENUMERATE_UP_TO:
        for k in range(size - 1, 0, -1):
            for sub in combinations(pattern, k):
                if retained.get(sub) == support:
                    return True
        return False
    members = set(pattern)
    return any(s == support and len(p) < size and members.issuperset(p)
               for p, s in retained.items())


# beyond this length scanning the retained set beats 2^|a| subset lookups
_ENUMERATE_UP_TO = 12


def format_candidates(cands: CandidateSet, dataset: Dataset | None = None) -> str:
    """One pattern per line: ``item_i&item_j<TAB>support``."""
    lines = []
    for pattern, _, support in cands:
        if dataset is None:
            name = "&".join(str(i) for i in pattern)
        else:
            name = "&".join(str(dataset.items[i]) for i in pattern)
        lines.append(f"{name}\t{support}")
    return "\n".join(lines) + ("\n" if lines else "")
