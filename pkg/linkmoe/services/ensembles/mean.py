from __future__ import annotations

from typing import Tuple, Union

import numpy as np

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.services.experts.types import ScoreMatrix
from linkmoe.services.nn import sigmoid


def _rows(scores: Union[ScoreMatrix, np.ndarray]) -> np.ndarray:
    """Expert-major (m, P) view of either a ScoreMatrix or a raw matrix."""
    arr = scores.scores if isinstance(scores, ScoreMatrix) else np.atleast_2d(np.asarray(scores, dtype=np.float64))
    if arr.shape[0] == 0:
        raise LinkMoeError(ErrorCode.EMPTY_REGISTRY)
    return arr


def mean_ensemble(scores: Union[ScoreMatrix, np.ndarray], probabilities: bool = False) -> np.ndarray:
    out = _rows(scores).mean(axis=0)
    return sigmoid(out) if probabilities else out


def mean_ensemble_weights(scores: Union[ScoreMatrix, np.ndarray]) -> Tuple[np.ndarray, np.ndarray]:
    """Mean scores plus the per-pair weights used (uniform 1/m on every pair)."""
    rows = _rows(scores)
    m, p = rows.shape
    return rows.mean(axis=0), np.full((p, m), 1.0 / m)
