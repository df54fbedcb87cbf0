"""Evaluation measures and repeated stratified cross-validation."""
from __future__ import annotations

import logging
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np
from scipy.stats import rankdata

from .data import Dataset, FoldPlan
from .encoding import relative_compression
from .rulelist import RuleList
from .search import FitConfig, learn

logger = logging.getLogger(__name__)


def accuracy(predictions, labels) -> float:
    predictions, labels = np.asarray(predictions), np.asarray(labels)
    if predictions.shape != labels.shape:
        raise ValueError("predictions and labels differ in length")
    if labels.size == 0:
        raise ValueError("empty input")
    return float(np.mean(predictions == labels))


def balanced_accuracy(predictions, labels, num_classes: int | None = None) -> float:
    """Mean per-class recall; a class absent from ``labels`` counts as recall 0."""
    predictions, labels = np.asarray(predictions), np.asarray(labels)
    if num_classes is None:
        num_classes = int(max(labels.max(), predictions.max())) + 1
    recalls = []
    for c in range(num_classes):
        mask = labels == c
        recalls.append(float(np.mean(predictions[mask] == c)) if mask.any() else 0.0)
    return float(np.mean(recalls))


def auc_binary(scores, labels) -> float:
    """Mann-Whitney AUC; tied scores get midranks (half credit per tied pair).

    ``labels`` are truthy for the positive class.
    """
    scores = np.asarray(scores, dtype=np.float64)
    pos = np.asarray(labels).astype(bool)
    n_pos = int(pos.sum())
    n_neg = pos.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs at least one positive and one negative instance")
    ranks = rankdata(scores)
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def auc_weighted(proba, labels) -> float:
    """One-vs-all AUCs weighted by class frequency.

    Classes with no positives or no negatives are skipped and the remaining
    weights renormalized.
    """
    proba = np.asarray(proba, dtype=np.float64)
    labels = np.asarray(labels)
    total, weight = 0.0, 0
    skipped = []
    for c in range(proba.shape[1]):
        pos = labels == c
        support = int(pos.sum())
        if support == 0 or support == labels.size:
            skipped.append(c)
            continue
        total += auc_binary(proba[:, c], pos) * support
        weight += support
    if skipped:
        warnings.warn(f"classes {skipped} skipped in weighted AUC (no positives or negatives)",
                      stacklevel=2)
    if weight == 0:
        raise ValueError("weighted AUC undefined: no class has both positives and negatives")
    return total / weight


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    balanced_accuracy: float
    auc_weighted: float
    relative_compression: float
    num_rules: int
    total_conditions: int
    auc_train: float = float("nan")
    num_candidates: int = 0
    runtime: float = 0.0

    @property
    def auc_gap(self) -> float:
        return abs(self.auc_train - self.auc_weighted)

    def as_row(self) -> dict:
        row = asdict(self)
        row["auc_gap"] = self.auc_gap
        return row


REPORT_COLUMNS = [f.name for f in fields(EvalReport)] + ["auc_gap"]


def evaluate(rulelist: RuleList, test: Dataset, train: Dataset | None = None,
             num_candidates: int = 0, runtime: float = 0.0) -> EvalReport:
    """Scores of ``rulelist`` on ``test``; compression and train AUC need ``train``."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        proba = rulelist.predict_proba_dataset(test)
        pred = np.argmax(proba, axis=1)
        auc = _safe_auc(proba, test.labels)
        auc_tr, comp = float("nan"), float("nan")
        if train is not None:
            auc_tr = _safe_auc(rulelist.predict_proba_dataset(train), train.labels)
            comp = relative_compression(rulelist, train)
    return EvalReport(accuracy(pred, test.labels),
                      balanced_accuracy(pred, test.labels, test.num_classes),
                      auc, comp, len(rulelist) + 1, rulelist.num_conditions, auc_tr,
                      num_candidates, runtime)


def _safe_auc(proba, labels) -> float:
    try:
        return auc_weighted(proba, labels)
    except ValueError:
        return float("nan")


@dataclass(frozen=True)
class CVResult:
    folds: list[tuple[int, int, EvalReport]]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) if name != "auc_gap" else r.auc_gap
                         for _, _, r in self.folds], dtype=np.float64)

    def mean(self, name: str) -> float:
        return float(np.nanmean(self.column(name)))

    def std(self, name: str) -> float:
        return float(np.nanstd(self.column(name)))

    def summary(self) -> dict[str, tuple[float, float]]:
        return {name: (self.mean(name), self.std(name)) for name in REPORT_COLUMNS}


def _run_fold(args):
    dataset, train_idx, test_idx, min_support, max_length, config = args
    train, test = dataset.subset(train_idx), dataset.subset(test_idx)
    t0 = time.perf_counter()
    model, cands = learn(train, min_support, max_length, config)
    elapsed = time.perf_counter() - t0
    return evaluate(model, test, train, len(cands), elapsed)


def cross_validate(dataset: Dataset, plan: FoldPlan, min_support: float = 0.05,
                   max_length: int = 4, config: FitConfig = FitConfig(),
                   threads: int = 1) -> CVResult:
    """Mine and fit on each training split, score on the held-out split."""
    jobs = [(dataset, tr, te, min_support, max_length, config) for _, _, tr, te in plan.splits()]
    keys = [(r, f) for r, f, _, _ in plan.splits()]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            reports = list(pool.map(_run_fold, jobs))
    else:
        reports = [_run_fold(job) for job in jobs]
    return CVResult([(r, f, rep) for (r, f), rep in zip(keys, reports)])
