"""numpy implementations of the search kernels (used when the extension is absent)."""
import numpy as np


def class_counts(covers, class_masks):
    out = np.empty((covers.shape[0], class_masks.shape[0]), dtype=np.int64)
    for k, mask in enumerate(class_masks):
        out[:, k] = np.bitwise_count(covers & mask).sum(axis=1, dtype=np.int64)
    return out


def subtract_and_count(covers, mask, class_masks, counts):
    changed = (covers & mask).any(axis=1)
    rows = np.flatnonzero(changed)
    if rows.size:
        covers[rows] &= ~mask
        counts[rows] = class_counts(covers[rows], class_masks)
    return changed.astype(np.uint8)


def block_lengths(counts, per_class, total):
    # column-by-column accumulation keeps the summation order of the compiled kernel
    s = np.zeros(counts.shape[0], dtype=np.float64)
    for k in range(counts.shape[1]):
        s += per_class[counts[:, k]]
    return total[counts.sum(axis=1)] - s
