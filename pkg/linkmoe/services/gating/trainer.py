"""Gate training: Adam over minibatches, early stopping on gate-val MRR."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.core.rng import Rng
from linkmoe.models.schemas.training import GateTrainConfig
from linkmoe.services.evaluation.ranking import mrr
from linkmoe.services.gating.data import LabeledBatch, RankingBatch
from linkmoe.services.gating.network import GateNetwork, gate_forward, gate_loss_and_grads, moe_logits
from linkmoe.services.nn import adam_init, adam_step, bce_loss
from linkmoe.workers.pool import chunk_bounds

logger = logging.getLogger(__name__)

HISTORY_COLUMNS = ["epoch", "train_loss", "val_mrr", "val_loss"]


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    val_mrr: float
    val_loss: float


@dataclass
class TrainResult:
    """Best-on-validation parameters plus the per-epoch history."""

    model: object
    best_epoch: int
    best_val_mrr: float
    history: List[EpochRecord] = field(default_factory=list)

    def history_frame(self) -> pd.DataFrame:
        return pd.DataFrame([vars(r) for r in self.history], columns=HISTORY_COLUMNS)


def check_labels(labels: np.ndarray) -> None:
    if not np.any(labels == 0):
        raise LinkMoeError(ErrorCode.NO_NEGATIVES, "training pairs contain no negatives")
    if not np.any(labels == 1):
        raise LinkMoeError(ErrorCode.EMPTY_POSITIVES, "training pairs contain no positives")


def validation_metrics(logits_pos: np.ndarray, logits_neg: np.ndarray, val: RankingBatch) -> Tuple[float, float]:
    """(MRR, mean BCE) of mixture logits on the gate-val split."""
    loss_pos, _ = bce_loss(logits_pos, np.ones_like(logits_pos))
    loss_neg, _ = bce_loss(logits_neg, np.zeros_like(logits_neg))
    val_loss = float(np.concatenate([loss_pos, loss_neg]).mean())
    return mrr(logits_pos, val.layout(logits_neg)), val_loss


def gate_val_logits(gn: GateNetwork, val: RankingBatch) -> Tuple[np.ndarray, np.ndarray]:
    return (
        moe_logits(gate_forward(gn, val.pos_inputs), val.pos_scores),
        moe_logits(gate_forward(gn, val.neg_inputs), val.neg_scores),
    )


class EarlyStopper:
    """Tracks the best (val MRR, -val loss) key; patience resets only on strict improvement."""

    def __init__(self, patience: int) -> None:
        self.patience = patience
        self.best_key: Optional[Tuple[float, float]] = None
        self.best_epoch = 0
        self.best_model = None
        self.wait = 0

    def update(self, epoch: int, val_mrr: float, val_loss: float, model) -> bool:
        """Record an epoch; returns True when training should stop."""
        key = (val_mrr, -val_loss)
        if self.best_key is None or key > self.best_key:
            self.best_key, self.best_epoch, self.best_model, self.wait = key, epoch, model, 0
            return False
        self.wait += 1
        return self.wait >= self.patience


def train_gate(
    gn: GateNetwork,
    train: LabeledBatch,
    val: RankingBatch,
    cfg: GateTrainConfig,
    rng: Optional[Rng] = None,
) -> TrainResult:
    """Optimize only the gate; expert scores inside ``train``/``val`` are constants."""
    check_labels(train.labels)
    rng = rng or Rng(cfg.seed).derive("gate-train")
    shuffler, dropout_rng = rng.derive("shuffle"), rng.derive("dropout")
    arrays = gn.arrays()
    state = adam_init(arrays, cfg.lr, cfg.weight_decay)
    stopper = EarlyStopper(cfg.patience)
    history: List[EpochRecord] = []
    started = time.perf_counter()

    for epoch in range(1, cfg.max_epochs + 1):
        order = shuffler.permutation(len(train))
        total = 0.0
        for lo, hi in chunk_bounds(len(train), cfg.batch_size):
            batch = train.take(order[lo:hi])
            loss, grads = gate_loss_and_grads(gn, batch.inputs, batch.scores, batch.labels, True, dropout_rng)
            arrays, state = adam_step(state, arrays, grads)
            gn = gn.with_arrays(arrays)
            total += loss * len(batch)
        val_mrr, val_loss = validation_metrics(*gate_val_logits(gn, val), val)
        history.append(EpochRecord(epoch, total / len(train), val_mrr, val_loss))
        if epoch == 1 or epoch % 25 == 0:
            logger.info(f"gate epoch {epoch}: train_loss={total / len(train):.6f} val_mrr={val_mrr:.6f}")
        if stopper.update(epoch, val_mrr, val_loss, gn):
            logger.info(f"Early stopping at epoch {epoch} (best epoch {stopper.best_epoch})")
            break

    logger.info(
        f"Gate training done: best epoch {stopper.best_epoch}, val MRR {stopper.best_key[0]:.6f}",
        extra={"epochs": len(history), "seconds": round(time.perf_counter() - started, 3)},
    )
    return TrainResult(stopper.best_model, stopper.best_epoch, stopper.best_key[0], history)
