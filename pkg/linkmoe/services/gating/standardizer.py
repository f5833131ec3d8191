from __future__ import annotations

from dataclasses import dataclass

import numpy as np

STD_FLOOR = 1e-8


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    std: np.ndarray

    def apply(self, matrix) -> np.ndarray:
        return (np.asarray(matrix, dtype=np.float64) - self.mean) / self.std


def standardizer_fit(matrix) -> Standardizer:
    """Column z-scoring fitted on gate-train rows; std floored at 1e-8."""
    arr = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    return Standardizer(mean=arr.mean(axis=0), std=np.maximum(arr.std(axis=0), STD_FLOOR))
