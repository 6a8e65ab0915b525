"""Hypercube indexing helpers.

Input strings are integers: coordinate x_i is bit i-1 (x_1 least significant).
"""

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=32)
def hamming_weights(n: int) -> np.ndarray:
    """|x| for every x in {0,1}^n, as a read-only int64 array of length 2^n."""
    idx = np.arange(1 << n, dtype=np.int64)
    weights = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        weights += (idx >> i) & 1
    weights.setflags(write=False)
    return weights


@lru_cache(maxsize=32)
def input_bits(n: int) -> np.ndarray:
    """Matrix of shape (2^n, n); row x holds (x_1, ..., x_n)."""
    idx = np.arange(1 << n, dtype=np.int64)
    out = ((idx[:, None] >> np.arange(n)) & 1).astype(np.uint8)
    out.setflags(write=False)
    return out


def popcount(x: int) -> int:
    return int(x).bit_count()


def mask_to_vars(mask: int) -> list:
    """1-based variable indices set in ``mask``."""
    return [i + 1 for i in range(mask.bit_length()) if mask >> i & 1]


def vars_to_mask(variables) -> int:
    mask = 0
    for v in variables:
        mask |= 1 << (int(v) - 1)
    return mask


def parity_signs(n: int) -> np.ndarray:
    """(-1)^{|x|} for every x."""
    return 1 - 2 * (hamming_weights(n) & 1)
