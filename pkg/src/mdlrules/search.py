"""Greedy separate-and-conquer search for an MDL-optimal rule list.

Starting from the default rule alone, repeatedly append (just before the
default rule) the candidate with the largest compression gain, remove the
instances it covers from every candidate, and stop once no candidate
shortens the total code length.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .bitset import pack, unpack
from .data import Dataset
from .encoding import (LITERAL, PluginCode, baseline_code_length, pattern_code_length,
                       rule_count_code_length)
from .mining import CandidateSet, mine, remove_redundant
from .rulelist import Rule, RuleList, estimate_theta

logger = logging.getLogger(__name__)

NORMALIZED = "normalized"
ABSOLUTE = "absolute"
NORMALIZED_DATA_ONLY = "normalized-data-only"
GAIN_MODES = (NORMALIZED, ABSOLUTE, NORMALIZED_DATA_ONLY)


@dataclass(frozen=True)
class FitConfig:
    gain: str = NORMALIZED
    epsilon: float = 1.0
    max_rules: int | None = None
    trace: bool = False
    convention: str = LITERAL

    def __post_init__(self):
        if self.gain not in GAIN_MODES:
            raise ValueError(f"gain must be one of {GAIN_MODES}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_rules is not None and self.max_rules < 0:
            raise ValueError("max_rules must be non-negative")


@dataclass(frozen=True)
class TraceStep:
    iteration: int
    pattern: tuple[int, ...]
    usage: int
    gain: float
    score: float
    total_length: float
    relative_compression: float


def absolute_gain(candidate_usage: Sequence[int], default_usage: Sequence[int], num_rules: int,
                  pattern_length: int, num_items: int, epsilon: float = 1.0,
                  convention: str = LITERAL) -> float:
    """Decrease of ``L(D, R)`` when the candidate is appended to ``R``.

    Only the default block changes: it is split into the candidate's block
    and a smaller default block. The model grows by one rule count step and
    the candidate's antecedent.
    """
    return (data_gain(candidate_usage, default_usage, epsilon)
            + model_gain(num_rules, pattern_length, num_items, convention))


def data_gain(candidate_usage, default_usage, epsilon: float = 1.0) -> float:
    cand = np.asarray(candidate_usage, dtype=np.int64)
    old = np.asarray(default_usage, dtype=np.int64)
    code = PluginCode(old.size, epsilon, int(old.sum()))
    return code.block(old) - code.block(cand) - code.block(old - cand)


def model_gain(num_rules: int, pattern_length: int, num_items: int,
               convention: str = LITERAL) -> float:
    return (rule_count_code_length(num_rules, convention)
            - rule_count_code_length(num_rules + 1, convention)
            - pattern_code_length(pattern_length, num_items))


def normalized_gain(candidate_usage, default_usage, num_rules: int, pattern_length: int,
                    num_items: int, epsilon: float = 1.0, convention: str = LITERAL) -> float:
    """Absolute gain per covered instance; ``-inf`` for a candidate covering nothing."""
    usage = int(np.sum(candidate_usage))
    if usage == 0:
        return -math.inf
    return absolute_gain(candidate_usage, default_usage, num_rules, pattern_length,
                         num_items, epsilon, convention) / usage


class SearchState:
    """Live per-candidate covers and class counts restricted to the default block."""

    def __init__(self, dataset: Dataset, candidates: CandidateSet, config: FitConfig = FitConfig(),
                 backend=None):
        self.dataset = dataset
        self.config = config
        self.kernels = kernels.impl if backend is None else kernels.load(backend)
        self.patterns = list(candidates.patterns)
        n, mask = dataset.n, dataset.all_mask
        self.lengths = np.array([len(p) for p in self.patterns], dtype=np.int64)
        by_length = {k: pattern_code_length(int(k), dataset.num_items)
                     for k in np.unique(self.lengths)}
        self.pattern_costs = np.array([by_length[k] for k in self.lengths.tolist()],
                                      dtype=np.float64)
        self.covers = pack([c & mask for c in candidates.covers], n)
        self.class_masks = pack(dataset.class_covers, n)
        self.counts = self.kernels.class_counts(self.covers, self.class_masks)
        self.default_cover = mask
        self.default_counts = dataset.class_counts.astype(np.int64).copy()
        self.code = PluginCode(dataset.num_classes, config.epsilon, n)
        self.rules: list[tuple[tuple[int, ...], np.ndarray]] = []
        self.baseline = baseline_code_length(dataset, config.epsilon, config.convention)
        self.total_length = self.baseline

    @property
    def num_rules(self) -> int:
        return len(self.rules)

    def usages(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def data_gains(self) -> np.ndarray:
        k = self.kernels
        per_class, total = self.code.per_class.values, self.code.total.values
        old = self.code.block(self.default_counts)
        cand = k.block_lengths(self.counts, per_class, total)
        rest = k.block_lengths(np.ascontiguousarray(self.default_counts - self.counts),
                               per_class, total)
        return old - cand - rest

    def model_gains(self) -> np.ndarray:
        conv = self.config.convention
        step = (rule_count_code_length(self.num_rules, conv)
                - rule_count_code_length(self.num_rules + 1, conv))
        return step - self.pattern_costs

    def gains(self) -> np.ndarray:
        """Absolute gains of appending each candidate now."""
        return self.data_gains() + self.model_gains()

    def scores(self) -> tuple[np.ndarray, np.ndarray]:
        """(selection score, absolute gain) per candidate; unselectable ones score ``-inf``."""
        data = self.data_gains()
        absolute = data + self.model_gains()
        usage = self.usages()
        live = usage > 0
        scores = np.full(len(self.patterns), -np.inf)
        mode = self.config.gain
        if mode == ABSOLUTE:
            scores[live] = absolute[live]
        elif mode == NORMALIZED:
            scores[live] = absolute[live] / usage[live]
        else:
            # only MDL-improving candidates are eligible; ranked by data gain per instance
            ok = live & (absolute > 0)
            scores[ok] = data[ok] / usage[ok]
        return scores, absolute

    def best(self) -> tuple[int, float, float] | None:
        """Index, score and absolute gain of the winning candidate, or None to stop."""
        if not self.patterns:
            return None
        scores, absolute = self.scores()
        top = scores.max()
        if not top > 0:
            return None
        # canonical order puts shorter patterns first, so the first tie wins
        idx = int(np.flatnonzero(scores == top)[0])
        return idx, float(top), float(absolute[idx])

    def add(self, idx: int) -> int:
        """Append candidate ``idx`` and update all live state; returns its block."""
        usage = self.counts[idx].copy()
        block_words = self.covers[idx].copy()
        self.rules.append((self.patterns[idx], usage))
        update_candidates(self, block_words)
        return unpack(block_words)


def update_candidates(state: SearchState, added_cover: np.ndarray | int) -> np.ndarray:
    """Remove the newly covered instances from every candidate and the default block.

    Returns a flag per candidate telling whether its live cover changed.
    """
    if isinstance(added_cover, int):
        added_cover = pack([added_cover], state.dataset.n)[0]
    mask = np.ascontiguousarray(added_cover, dtype=np.uint64)
    removed = state.kernels.class_counts(mask[None, :], state.class_masks)[0]
    changed = state.kernels.subtract_and_count(state.covers, mask, state.class_masks, state.counts)
    state.default_counts = state.default_counts - removed
    state.default_cover &= ~unpack(mask)
    return changed.astype(bool)


def fit(dataset: Dataset, candidates: CandidateSet, config: FitConfig = FitConfig(),
        backend=None) -> RuleList:
    """Greedily build a rule list from (redundancy-pruned) candidates."""
    state = SearchState(dataset, candidates, config, backend)
    trace = []
    while config.max_rules is None or state.num_rules < config.max_rules:
        choice = state.best()
        if choice is None:
            break
        idx, score, gain = choice
        pattern = state.patterns[idx]
        usage = int(state.counts[idx].sum())
        state.add(idx)
        state.total_length -= gain
        step = TraceStep(state.num_rules, pattern, usage, gain, score, state.total_length,
                         state.total_length / state.baseline)
        trace.append(step)
        if config.trace:
            logger.info("rule %d: %s usage=%d gain=%.4f L=%.4f L%%=%.4f", step.iteration,
                        pattern, usage, gain, step.total_length, step.relative_compression)
    eps = config.epsilon
    rules = tuple(Rule.from_usage(p, u, eps) for p, u in state.rules)
    return RuleList(rules, state.default_counts.copy(), estimate_theta(state.default_counts, eps),
                    dataset.items, dataset.class_names, eps, tuple(trace))


def learn(dataset: Dataset, min_support: float = 0.05, max_length: int = 4,
          config: FitConfig = FitConfig(), backend=None) -> tuple[RuleList, CandidateSet]:
    """Mine candidates, prune strictly redundant ones and fit; returns (list, candidates)."""
    cands = remove_redundant(mine(dataset, min_support, max_length))
    return fit(dataset, cands, config, backend), cands
