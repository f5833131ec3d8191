from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
from typing import List

import numpy as np

from linkmoe.core.errors import ErrorCode, LinkMoeError

_STD_FLOOR = 1e-8


class ExpertKind(StrEnum):
    HEURISTIC = "HEURISTIC"
    FEATURE_MLP = "FEATURE_MLP"
    EXTERNAL = "EXTERNAL"


@dataclass(frozen=True)
class ExpertId:
    name: str
    kind: ExpertKind


@dataclass(frozen=True)
class ScoreMatrix:
    """Raw expert scores: ``scores[o, p]`` is expert o on pair p."""

    expert_ids: List[ExpertId]
    pairs: np.ndarray
    scores: np.ndarray

    def __post_init__(self) -> None:
        if self.scores.shape != (len(self.expert_ids), self.pairs.shape[0]):
            raise LinkMoeError(
                ErrorCode.DIM_MISMATCH, "score matrix shape", shape=self.scores.shape, experts=len(self.expert_ids)
            )
        self.scores.setflags(write=False)

    @property
    def names(self) -> List[str]:
        return [e.name for e in self.expert_ids]

    @property
    def m(self) -> int:
        return len(self.expert_ids)

    def by_pair(self) -> np.ndarray:
        """(pairs, m) view, one row per pair."""
        return np.ascontiguousarray(self.scores.T)

    def row(self, name: str) -> np.ndarray:
        return self.scores[self.names.index(name)]


@dataclass(frozen=True)
class ScoreNormalizer:
    """Per-expert z-scoring, fitted on gate-train scores."""

    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, scores_by_pair: np.ndarray) -> "ScoreNormalizer":
        s = np.asarray(scores_by_pair, dtype=np.float64)
        return cls(mean=s.mean(axis=0), std=np.maximum(s.std(axis=0), _STD_FLOOR))

    def apply(self, scores_by_pair: np.ndarray) -> np.ndarray:
        return (np.asarray(scores_by_pair, dtype=np.float64) - self.mean) / self.std

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, payload: dict) -> "ScoreNormalizer":
        return cls(mean=np.asarray(payload["mean"], dtype=np.float64), std=np.asarray(payload["std"], dtype=np.float64))
