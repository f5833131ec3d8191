"""Feature proximity: cosine similarity and the order-invariant pair feature x_i * x_j."""
from __future__ import annotations

import numpy as np

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.services.graph_store.types import FeatureMatrix, as_pairs


def _check_rows(f: FeatureMatrix, *nodes: int) -> None:
    for v in nodes:
        if v < 0 or v >= f.n:
            raise LinkMoeError(ErrorCode.NODE_OUT_OF_RANGE, node=int(v), n=f.n)


def feature_cosine(f: FeatureMatrix, i: int, j: int) -> float:
    _check_rows(f, i, j)
    if i > j:
        i, j = j, i
    xi, xj = f.rows[i], f.rows[j]
    ni, nj = np.linalg.norm(xi), np.linalg.norm(xj)
    if ni == 0.0 or nj == 0.0:
        return 0.0
    return float(np.clip(np.dot(xi, xj) / (ni * nj), -1.0, 1.0))


def batch_feature_cosine(f: FeatureMatrix, pairs) -> np.ndarray:
    arr = as_pairs(pairs)
    return np.array([feature_cosine(f, int(u), int(v)) for u, v in arr], dtype=np.float64)


def pair_feature(f: FeatureMatrix, i: int, j: int) -> np.ndarray:
    _check_rows(f, i, j)
    return f.rows[i] * f.rows[j]


def batch_pair_features(f: FeatureMatrix, pairs) -> np.ndarray:
    arr = as_pairs(pairs)
    if arr.size:
        _check_rows(f, int(arr.min()), int(arr.max()))
    return f.rows[arr[:, 0]] * f.rows[arr[:, 1]]
