"""Ranked evaluation: every positive is ranked against its negatives with mid-rank ties."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Sequence

import numpy as np

from linkmoe.core.errors import ErrorCode, LinkMoeError


@dataclass(frozen=True)
class RankingReport:
    ranks: np.ndarray
    mrr: float
    hits: Dict[int, float]

    def as_rows(self) -> list[tuple[str, float]]:
        rows = [("mrr", self.mrr)]
        rows.extend((f"hits@{k}", v) for k, v in sorted(self.hits.items()))
        return rows


def rank_of_positive(pos_score: float, neg_scores) -> float:
    neg = np.asarray(neg_scores, dtype=np.float64)
    greater = int(np.count_nonzero(neg > pos_score))
    equal = int(np.count_nonzero(neg == pos_score))
    return 1.0 + greater + 0.5 * equal


def positive_ranks(pos_scores, neg_scores) -> np.ndarray:
    """Vectorized ``rank_of_positive``; ``neg_scores`` is (N,) shared or (P, k) per positive."""
    pos = np.asarray(pos_scores, dtype=np.float64).reshape(-1)
    neg = np.asarray(neg_scores, dtype=np.float64)
    if pos.size == 0:
        raise LinkMoeError(ErrorCode.EMPTY_POSITIVES)
    if neg.size == 0:
        raise LinkMoeError(ErrorCode.EMPTY_NEGATIVES)
    if neg.ndim == 1:
        ordered = np.sort(neg)
        right = np.searchsorted(ordered, pos, side="right")
        left = np.searchsorted(ordered, pos, side="left")
        greater = ordered.size - right
        equal = right - left
    elif neg.ndim == 2:
        if neg.shape[0] != pos.size:
            raise LinkMoeError(ErrorCode.NEG_COUNT_MISMATCH, rows=int(neg.shape[0]), positives=int(pos.size))
        greater = np.count_nonzero(neg > pos[:, None], axis=1)
        equal = np.count_nonzero(neg == pos[:, None], axis=1)
    else:
        raise LinkMoeError(ErrorCode.DIM_MISMATCH, "negative scores must be 1-D or 2-D", ndim=neg.ndim)
    return 1.0 + greater.astype(np.float64) + 0.5 * equal.astype(np.float64)


def report_from_ranks(ranks: np.ndarray, ks: Sequence[int]) -> RankingReport:
    ranks = np.asarray(ranks, dtype=np.float64)
    hits = {int(k): float(np.mean(ranks <= k)) for k in ks}
    return RankingReport(ranks=ranks, mrr=float(np.mean(1.0 / ranks)), hits=hits)


def evaluate(pos_scores, neg_scores, ks: Sequence[int] = (1, 3, 10, 20, 50, 100)) -> RankingReport:
    return report_from_ranks(positive_ranks(pos_scores, neg_scores), ks)


def mrr(pos_scores, neg_scores) -> float:
    return float(np.mean(1.0 / positive_ranks(pos_scores, neg_scores)))


def correct_set(report: RankingReport, k: int) -> FrozenSet[int]:
    """Indices of positives counted as correctly predicted at K (rank <= K)."""
    if k <= 0:
        return frozenset()
    return frozenset(np.flatnonzero(report.ranks <= k).tolist())
