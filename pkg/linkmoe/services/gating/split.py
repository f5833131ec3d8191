from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.core.rng import Rng
from linkmoe.services.graph_store.types import NegativeMode, NegativeSet, as_pairs

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GateSplit:
    pos: np.ndarray
    neg: NegativeSet


def _train_count(total: int, ratio: float) -> int:
    return int(np.floor(ratio * total + 0.5))


def split_validation(valid_pos, valid_neg: NegativeSet, ratio: float, seed: int) -> Tuple[GateSplit, GateSplit]:
    """Shuffle validation positives into gate-train (``ratio``) and gate-val parts.

    Shared negatives are partitioned with the same ratio; per-positive negatives follow their positive.
    """
    if not 0.0 < ratio < 1.0:
        raise LinkMoeError(ErrorCode.INVALID_CONFIG, "split ratio must lie in (0, 1)", ratio=ratio)
    pos = as_pairs(valid_pos)
    rng = Rng(seed).derive("split-validation")
    n_train = _train_count(pos.shape[0], ratio)
    if n_train == 0 or n_train == pos.shape[0]:
        raise LinkMoeError(ErrorCode.EMPTY_SPLIT, "positives", total=int(pos.shape[0]), ratio=ratio)
    order = rng.permutation(pos.shape[0])
    tr_idx, va_idx = np.sort(order[:n_train]), np.sort(order[n_train:])

    if valid_neg.mode is NegativeMode.SHARED:
        neg = valid_neg.shared_pairs
        n_neg_train = _train_count(neg.shape[0], ratio)
        if n_neg_train == 0 or n_neg_train == neg.shape[0]:
            raise LinkMoeError(ErrorCode.EMPTY_SPLIT, "negatives", total=int(neg.shape[0]), ratio=ratio)
        neg_order = rng.permutation(neg.shape[0])
        train_neg = NegativeSet.shared(neg[np.sort(neg_order[:n_neg_train])])
        val_neg = NegativeSet.shared(neg[np.sort(neg_order[n_neg_train:])])
    else:
        per = valid_neg.per_pos_pairs
        train_neg = NegativeSet.per_positive(per[tr_idx])
        val_neg = NegativeSet.per_positive(per[va_idx])

    logger.info(
        f"Validation re-split (ratio={ratio}): {tr_idx.size} gate-train / {va_idx.size} gate-val positives",
        extra={"seed": int(seed), "train_neg": train_neg.size, "val_neg": val_neg.size},
    )
    return GateSplit(pos[tr_idx], train_neg), GateSplit(pos[va_idx], val_neg)
