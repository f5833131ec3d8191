from __future__ import annotations

from typing import Tuple

import numpy as np

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.services.graph_store.types import as_pairs


def check_pair(n: int, i: int, j: int) -> Tuple[int, int]:
    """Validate a pair and return it canonically ordered (min, max)."""
    i, j = int(i), int(j)
    for v in (i, j):
        if v < 0 or v >= n:
            raise LinkMoeError(ErrorCode.NODE_OUT_OF_RANGE, node=v, n=int(n))
    if i == j:
        raise LinkMoeError(ErrorCode.SELF_PAIR, node=i)
    return (i, j) if i < j else (j, i)


def check_pairs(n: int, pairs) -> np.ndarray:
    """Vectorized ``check_pair``; returns the canonical (P, 2) array."""
    arr = as_pairs(pairs)
    if arr.size == 0:
        return arr
    bad = (arr < 0) | (arr >= n)
    if bad.any():
        raise LinkMoeError(ErrorCode.NODE_OUT_OF_RANGE, node=int(arr[bad][0]), n=int(n))
    same = np.flatnonzero(arr[:, 0] == arr[:, 1])
    if same.size:
        raise LinkMoeError(ErrorCode.SELF_PAIR, node=int(arr[same[0], 0]), pair_index=int(same[0]))
    return np.sort(arr, axis=1)
