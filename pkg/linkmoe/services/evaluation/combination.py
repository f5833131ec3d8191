from __future__ import annotations

from dataclasses import dataclass
from typing import List, Mapping, Tuple

import numpy as np

from linkmoe.services.evaluation.ranking import evaluate


@dataclass(frozen=True)
class CombinationGrid:
    names: List[str]
    matrix: np.ndarray
    k: int


def combination_grid(heuristics: Mapping[str, Tuple[np.ndarray, np.ndarray]], k: int) -> CombinationGrid:
    """Hits@K of every heuristic (diagonal) and of every raw pairwise sum (off-diagonal)."""
    names = list(heuristics)
    values = list(heuristics.values())
    size = len(names)
    matrix = np.zeros((size, size), dtype=np.float64)
    for a in range(size):
        pos_a, neg_a = (np.asarray(x, dtype=np.float64) for x in values[a])
        matrix[a, a] = evaluate(pos_a, neg_a, ks=(k,)).hits[k]
        for b in range(a + 1, size):
            pos_b, neg_b = (np.asarray(x, dtype=np.float64) for x in values[b])
            matrix[a, b] = matrix[b, a] = evaluate(pos_a + pos_b, neg_a + neg_b, ks=(k,)).hits[k]
    return CombinationGrid(names=names, matrix=matrix, k=k)
