"""Instance-id sets stored as Python ints (bit ``i`` set = instance ``i``).

Python ints give cheap ``&``/``|``/``~`` and ``int.bit_count``; the search
kernels use the same sets packed into ``uint64`` word arrays.
"""
from __future__ import annotations

from typing import Iterable

import numpy as np


def from_indices(indices: Iterable[int]) -> int:
    idx = np.fromiter(indices, dtype=np.int64) if not isinstance(indices, np.ndarray) \
        else indices.astype(np.int64, copy=False)
    if idx.size == 0:
        return 0
    flags = np.zeros(int(idx.max()) + 1, dtype=bool)
    flags[idx] = True
    return int.from_bytes(np.packbits(flags, bitorder="little").tobytes(), "little")


def to_indices(bits: int) -> np.ndarray:
    if bits == 0:
        return np.empty(0, dtype=np.int64)
    raw = np.frombuffer(bits.to_bytes((bits.bit_length() + 7) // 8, "little"), dtype=np.uint8)
    return np.flatnonzero(np.unpackbits(raw, bitorder="little"))


def popcount(bits: int) -> int:
    return bits.bit_count()


def num_words(n: int) -> int:
    return max(1, (n + 63) // 64)


def to_words(bits: int, n_words: int) -> np.ndarray:
    return np.frombuffer(bits.to_bytes(8 * n_words, "little"), dtype="<u8").astype(np.uint64)


def pack(bitsets: Iterable[int], n: int) -> np.ndarray:
    """Stack bitsets into a C-contiguous ``(len, words)`` uint64 array."""
    w = num_words(n)
    raw = b"".join(b.to_bytes(8 * w, "little") for b in bitsets)
    return np.frombuffer(raw, dtype="<u8").astype(np.uint64).reshape(-1, w)


def unpack(words: np.ndarray) -> int:
    return int.from_bytes(np.ascontiguousarray(words, dtype="<u8").tobytes(), "little")
