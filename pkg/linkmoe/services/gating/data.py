from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from linkmoe.core.errors import ErrorCode, LinkMoeError


def _rows(arr: Optional[np.ndarray]) -> Optional[np.ndarray]:
    return None if arr is None else np.atleast_2d(np.asarray(arr, dtype=np.float64))


@dataclass(frozen=True)
class GateInputs:
    """Per-pair gate inputs: standardized structural vectors and/or pair features."""

    structural: Optional[np.ndarray] = None
    feature: Optional[np.ndarray] = None
    squeeze: bool = False

    @classmethod
    def of(cls, structural=None, feature=None) -> "GateInputs":
        first = structural if structural is not None else feature
        squeeze = first is not None and np.ndim(first) == 1
        inputs = cls(_rows(structural), _rows(feature), squeeze)
        inputs.check()
        return inputs

    def check(self) -> None:
        if self.structural is not None and self.feature is not None:
            if self.structural.shape[0] != self.feature.shape[0]:
                raise LinkMoeError(ErrorCode.DIM_MISMATCH, "structural and feature rows differ")
        for arr in (self.structural, self.feature):
            if arr is not None and not np.isfinite(arr).all():
                raise LinkMoeError(ErrorCode.NON_FINITE_VALUE, "gate input")

    def __len__(self) -> int:
        first = self.structural if self.structural is not None else self.feature
        return 0 if first is None else int(first.shape[0])

    def take(self, idx) -> "GateInputs":
        pick = lambda a: None if a is None else a[idx]  # noqa: E731
        return GateInputs(pick(self.structural), pick(self.feature))

    def concat(self, other: "GateInputs") -> "GateInputs":
        join = lambda a, b: None if a is None else np.concatenate([a, b])  # noqa: E731
        return GateInputs(join(self.structural, other.structural), join(self.feature, other.feature))


@dataclass(frozen=True)
class LabeledBatch:
    inputs: GateInputs
    scores: np.ndarray  # (B, m)
    labels: np.ndarray  # (B,)

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    def take(self, idx) -> "LabeledBatch":
        return LabeledBatch(self.inputs.take(idx), self.scores[idx], self.labels[idx])


@dataclass(frozen=True)
class RankingBatch:
    """Positives and their negatives in a form ready for ranked evaluation."""

    pos_inputs: GateInputs
    pos_scores: np.ndarray
    neg_inputs: GateInputs
    neg_scores: np.ndarray
    # (P, k) for per-positive negatives, None when shared
    neg_shape: Optional[Tuple[int, int]] = None

    def layout(self, flat: np.ndarray) -> np.ndarray:
        return flat if self.neg_shape is None else np.asarray(flat).reshape(self.neg_shape)

    def labeled(self) -> LabeledBatch:
        labels = np.concatenate([np.ones(self.pos_scores.shape[0]), np.zeros(self.neg_scores.shape[0])])
        return LabeledBatch(
            self.pos_inputs.concat(self.neg_inputs), np.concatenate([self.pos_scores, self.neg_scores]), labels
        )
