from __future__ import annotations

from dataclasses import dataclass
from typing import AbstractSet, List, Mapping, Tuple

import numpy as np
import pandas as pd

from linkmoe.services.evaluation.ranking import correct_set, evaluate


@dataclass(frozen=True)
class OverlapMatrix:
    methods: List[str]
    matrix: np.ndarray
    # cells where both correct sets were empty (Jaccard taken as 1)
    both_empty: np.ndarray

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.matrix, index=self.methods, columns=self.methods)


def jaccard_overlap(a: AbstractSet, b: AbstractSet) -> float:
    """|a & b| / |a | b|, with the empty-vs-empty case defined as 1."""
    union = len(a | b)
    if union == 0:
        return 1.0
    return len(a & b) / union


def overlap_matrix(methods: Mapping[str, Tuple[np.ndarray, np.ndarray]], k: int) -> OverlapMatrix:
    """Pairwise Jaccard of correctly predicted positives; ``methods`` maps name -> (pos, neg) scores."""
    names = list(methods)
    sets = [correct_set(evaluate(pos, neg, ks=(k,)), k) for pos, neg in methods.values()]
    size = len(names)
    matrix = np.ones((size, size), dtype=np.float64)
    both_empty = np.zeros((size, size), dtype=bool)
    for a in range(size):
        for b in range(a, size):
            value = jaccard_overlap(sets[a], sets[b])
            matrix[a, b] = matrix[b, a] = value
            both_empty[a, b] = both_empty[b, a] = not sets[a] and not sets[b]
    return OverlapMatrix(methods=names, matrix=matrix, both_empty=both_empty)
