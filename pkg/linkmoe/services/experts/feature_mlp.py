"""Feature-only MLP expert over x_i * x_j, trained with BCE against resampled non-edges."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.core.rng import Rng
from linkmoe.models.schemas.training import FeatureMlpConfig
from linkmoe.services.graph_store.types import FeatureMatrix, as_pairs, pair_keys
from linkmoe.services.heuristics.features import batch_pair_features
from linkmoe.services.nn import (
    Checkpoint,
    CheckpointKind,
    MlpParams,
    adam_init,
    adam_step,
    bce_loss,
    init_mlp,
    load_checkpoint,
    mlp_backward,
    mlp_dims,
    mlp_forward,
    save_checkpoint,
)
from linkmoe.workers.pool import chunk_bounds

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FeatureMlpExpert:
    params: MlpParams
    name: str = "mlp"

    def logits(self, features: FeatureMatrix, pairs) -> np.ndarray:
        x = batch_pair_features(features, pairs)
        if x.shape[0] == 0:
            return np.zeros(0, dtype=np.float64)
        out, _ = mlp_forward(self.params, x, train_mode=False)
        return out[:, 0]


def sample_non_edges(n: int, count: int, forbidden_keys: np.ndarray, rng: Rng) -> np.ndarray:
    """Uniform node pairs (u != v) whose canonical key is not in ``forbidden_keys`` (sorted)."""
    if n < 2:
        raise LinkMoeError(ErrorCode.NO_NEGATIVES, "graph too small for negative sampling", n=n)
    picked: List[np.ndarray] = []
    have = 0
    for _ in range(64):
        draw = rng.integers(0, n, (2 * (count - have) + 8, 2))
        draw = draw[draw[:, 0] != draw[:, 1]]
        keys = pair_keys(draw, n)
        pos = np.searchsorted(forbidden_keys, keys)
        hit = (pos < forbidden_keys.size) & (forbidden_keys[np.minimum(pos, forbidden_keys.size - 1)] == keys) \
            if forbidden_keys.size else np.zeros(keys.size, dtype=bool)
        draw = draw[~hit]
        picked.append(draw)
        have += draw.shape[0]
        if have >= count:
            break
    else:
        raise LinkMoeError(ErrorCode.NO_NEGATIVES, "graph too dense to sample non-edges", n=n)
    return np.concatenate(picked)[:count]


def train_feature_mlp_expert(
    features: Optional[FeatureMatrix],
    train_pos,
    rng: Rng,
    hyper: FeatureMlpConfig | None = None,
    name: str = "mlp",
) -> FeatureMlpExpert:
    if features is None or features.d == 0:
        raise LinkMoeError(ErrorCode.NO_FEATURES, "feature MLP expert needs node features")
    hyper = hyper or FeatureMlpConfig()
    pos = as_pairs(train_pos)
    if pos.shape[0] == 0:
        raise LinkMoeError(ErrorCode.EMPTY_POSITIVES, "no training edges")
    forbidden = np.unique(pair_keys(pos, features.n))
    pos_x = batch_pair_features(features, pos)

    params = init_mlp(mlp_dims(features.d, hyper.hidden_dim, 1, hyper.layers), rng.derive("init"), hyper.dropout)
    arrays = params.arrays()
    state = adam_init(arrays, hyper.lr, hyper.weight_decay)
    sampler = rng.derive("negatives")
    shuffler = rng.derive("shuffle")
    dropout_rng = rng.derive("dropout")
    labels = np.concatenate([np.ones(pos.shape[0]), np.zeros(pos.shape[0])])

    for epoch in range(1, hyper.epochs + 1):
        neg = sample_non_edges(features.n, pos.shape[0], forbidden, sampler)
        x = np.concatenate([pos_x, batch_pair_features(features, neg)])
        order = shuffler.permutation(x.shape[0])
        total = 0.0
        for lo, hi in chunk_bounds(x.shape[0], hyper.batch_size):
            idx = order[lo:hi]
            out, tape = mlp_forward(params, x[idx], train_mode=True, rng=dropout_rng)
            loss, grad = bce_loss(out[:, 0], labels[idx])
            grads, _ = mlp_backward(tape, (grad / idx.size)[:, None])
            arrays, state = adam_step(state, arrays, grads)
            params = params.with_arrays(arrays)
            total += float(loss.sum())
        if epoch == 1 or epoch == hyper.epochs or epoch % 10 == 0:
            logger.info(f"feature-mlp epoch {epoch}: loss={total / x.shape[0]:.6f}")
    return FeatureMlpExpert(params=params, name=name)


def save_feature_mlp(path: str | Path, expert: FeatureMlpExpert, sidecar: dict | None = None) -> List[Path]:
    payload = {"name": expert.name, **(sidecar or {})}
    return save_checkpoint(path, Checkpoint(CheckpointKind.FEATURE_MLP, 0, [expert.params], [], payload))


def load_feature_mlp(path: str | Path, name: str | None = None) -> FeatureMlpExpert:
    ckpt = load_checkpoint(path, expected=CheckpointKind.FEATURE_MLP)
    if len(ckpt.slots) != 1 or ckpt.slots[0] is None or ckpt.slots[0].out_dim != 1:
        raise LinkMoeError(ErrorCode.BAD_CHECKPOINT, "feature MLP checkpoint layout", path=str(path))
    return FeatureMlpExpert(params=ckpt.slots[0], name=name or ckpt.sidecar.get("name", "mlp"))
