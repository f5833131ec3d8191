"""Global-Ensemble: one learned weight vector applied to every pair, sigmoid(w . scores)."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.core.rng import Rng
from linkmoe.models.schemas.training import EnsembleTrainConfig
from linkmoe.services.gating.data import LabeledBatch, RankingBatch
from linkmoe.services.gating.trainer import EarlyStopper, EpochRecord, TrainResult, check_labels, validation_metrics
from linkmoe.services.nn import adam_init, adam_step, bce_loss, sigmoid
from linkmoe.workers.pool import chunk_bounds

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GlobalWeights:
    w: np.ndarray

    def __post_init__(self) -> None:
        if not np.isfinite(self.w).all():
            raise LinkMoeError(ErrorCode.NON_FINITE_VALUE, "global weights")

    @property
    def m(self) -> int:
        return int(self.w.size)


def global_ensemble_logits(weights: GlobalWeights, scores_by_pair: np.ndarray) -> np.ndarray:
    scores = np.atleast_2d(np.asarray(scores_by_pair, dtype=np.float64))
    if scores.shape[1] != weights.m:
        raise LinkMoeError(ErrorCode.DIM_MISMATCH, expected=weights.m, got=int(scores.shape[1]))
    return scores @ weights.w


def global_ensemble_predict(weights: GlobalWeights, scores_by_pair: np.ndarray) -> np.ndarray:
    return sigmoid(global_ensemble_logits(weights, scores_by_pair))


def global_ensemble_weights(weights: GlobalWeights, n_pairs: int) -> np.ndarray:
    """Per-pair weight rows; identical for every pair."""
    return np.tile(weights.w, (n_pairs, 1))


def global_loss_and_grad(w: np.ndarray, scores_by_pair: np.ndarray, labels: np.ndarray) -> Tuple[float, np.ndarray]:
    """Mean BCE of sigmoid(S w) and its gradient S^T (sigmoid(S w) - y) / B."""
    loss, grad_logit = bce_loss(scores_by_pair @ w, labels)
    return float(loss.mean()), scores_by_pair.T @ grad_logit / labels.shape[0]


def initial_weights(m: int, cfg: EnsembleTrainConfig) -> np.ndarray:
    if cfg.init_weights is None:
        return np.full(m, 1.0 / m)
    w = np.asarray(cfg.init_weights, dtype=np.float64)
    if w.size != m:
        raise LinkMoeError(ErrorCode.DIM_MISMATCH, "init_weights length", expected=m, got=int(w.size))
    return w


def train_global_ensemble(
    train: LabeledBatch,
    val: RankingBatch,
    cfg: EnsembleTrainConfig | None = None,
    rng: Optional[Rng] = None,
) -> TrainResult:
    """Logistic regression on expert scores, early-stopped on gate-val MRR like the gate."""
    cfg = cfg or EnsembleTrainConfig()
    check_labels(train.labels)
    m = train.scores.shape[1]
    if m == 0:
        raise LinkMoeError(ErrorCode.EMPTY_REGISTRY)
    rng = rng or Rng(0).derive("global-ensemble")
    w = initial_weights(m, cfg)
    state = adam_init([w], cfg.lr, cfg.weight_decay)
    stopper = EarlyStopper(cfg.patience)
    history: List[EpochRecord] = []
    for epoch in range(1, cfg.max_epochs + 1):
        order = rng.permutation(len(train))
        total = 0.0
        for lo, hi in chunk_bounds(len(train), cfg.batch_size):
            idx = order[lo:hi]
            loss, grad = global_loss_and_grad(w, train.scores[idx], train.labels[idx])
            (w,), state = adam_step(state, [w], [grad])
            total += loss * idx.size
        val_mrr, val_loss = validation_metrics(val.pos_scores @ w, val.neg_scores @ w, val)
        history.append(EpochRecord(epoch, total / len(train), val_mrr, val_loss))
        if stopper.update(epoch, val_mrr, val_loss, GlobalWeights(w.copy())):
            break
    logger.info(f"Global ensemble: best epoch {stopper.best_epoch}, val MRR {stopper.best_key[0]:.6f}")
    return TrainResult(stopper.best_model, stopper.best_epoch, stopper.best_key[0], history)


def write_weights(path: str | Path, weights: GlobalWeights, names: List[str]) -> Path:
    """One "name weight" line per expert."""
    target = Path(path)
    target.write_text("".join(f"{n} {v!r}\n" for n, v in zip(names, weights.w.tolist())), encoding="utf-8")
    return target


def load_weights(path: str | Path) -> Tuple[List[str], GlobalWeights]:
    p = Path(path)
    if not p.is_file():
        raise LinkMoeError(ErrorCode.MISSING_FILE, "weights file not found", path=str(p))
    names, values = [], []
    for line_no, raw in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        parts = raw.split()
        if not parts:
            continue
        try:
            name, value = parts[0], float(parts[1])
        except (IndexError, ValueError):
            raise LinkMoeError(ErrorCode.MALFORMED_LINE, path=str(p), line_no=line_no) from None
        names.append(name)
        values.append(value)
    return names, GlobalWeights(np.asarray(values, dtype=np.float64))
