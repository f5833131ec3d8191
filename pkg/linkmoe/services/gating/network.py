"""Two-branch gating network and the mixture it drives.

weights = softmax(fusion(concat(struct_branch(s), feat_branch(x))))
moe logit = sum_o weights_o * score_o, probability = sigmoid(logit)
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.core.rng import Rng
from linkmoe.models.schemas.training import GateMode, GateTrainConfig
from linkmoe.services.gating.data import GateInputs
from linkmoe.services.heuristics.structural import (
    COLUMN_INDEX,
    DEGREE_COLUMNS,
    GLOBAL_COLUMNS,
    LOCAL_COLUMNS,
    STRUCTURAL_COLUMNS,
)
from linkmoe.services.nn import (
    MlpParams,
    Tape,
    bce_loss,
    init_mlp,
    mlp_backward,
    mlp_dims,
    mlp_forward,
    sigmoid,
    softmax,
    softmax_backward,
    zeros_mlp,
)

STRUCT_DIM = len(STRUCTURAL_COLUMNS)

_MODE_COLUMNS = {
    GateMode.ALL: STRUCTURAL_COLUMNS,
    GateMode.ONLY_STRUCT: STRUCTURAL_COLUMNS,
    GateMode.ONLY_LOCAL_STRUCT: DEGREE_COLUMNS + LOCAL_COLUMNS,
    GateMode.ONLY_GLOBAL_STRUCT: DEGREE_COLUMNS + GLOBAL_COLUMNS,
    GateMode.ONLY_FEAT: [],
}


def struct_columns_for(mode: GateMode) -> Tuple[int, ...]:
    return tuple(COLUMN_INDEX[c] for c in _MODE_COLUMNS[GateMode(mode)])


def uses_features(mode: GateMode, feat_dim: Optional[int]) -> bool:
    """Feature branch is on for ONLY_FEAT, and for ALL whenever features exist."""
    mode = GateMode(mode)
    if mode is GateMode.ONLY_FEAT:
        if not feat_dim:
            raise LinkMoeError(ErrorCode.MODE_INPUT_MISMATCH, "only-feat gate needs node features")
        return True
    return mode is GateMode.ALL and bool(feat_dim)


@dataclass(frozen=True)
class GateNetwork:
    mode: GateMode
    m: int
    fusion_head: MlpParams
    struct_branch: Optional[MlpParams] = None
    feat_branch: Optional[MlpParams] = None

    def __post_init__(self) -> None:
        if self.fusion_head.out_dim != self.m:
            raise LinkMoeError(ErrorCode.DIM_MISMATCH, "fusion head width", width=self.fusion_head.out_dim, m=self.m)
        if (self.struct_branch is None) != (self.mode is GateMode.ONLY_FEAT):
            raise LinkMoeError(ErrorCode.MODE_INPUT_MISMATCH, "structural branch does not match mode", mode=self.mode)
        if self.feat_branch is not None and self.mode not in (GateMode.ALL, GateMode.ONLY_FEAT):
            raise LinkMoeError(ErrorCode.MODE_INPUT_MISMATCH, "feature branch does not match mode", mode=self.mode)
        if self.mode is GateMode.ONLY_FEAT and self.feat_branch is None:
            raise LinkMoeError(ErrorCode.MODE_INPUT_MISMATCH, "only-feat gate without feature branch")
        width = sum(b.out_dim for b in (self.struct_branch, self.feat_branch) if b is not None)
        if width != self.fusion_head.in_dim:
            raise LinkMoeError(ErrorCode.DIM_MISMATCH, "branch widths vs fusion input", width=width)

    @property
    def struct_columns(self) -> Tuple[int, ...]:
        return struct_columns_for(self.mode)

    @property
    def slots(self) -> List[Optional[MlpParams]]:
        return [self.struct_branch, self.feat_branch, self.fusion_head]

    def arrays(self) -> List[np.ndarray]:
        out: List[np.ndarray] = []
        for slot in self.slots:
            if slot is not None:
                out.extend(slot.arrays())
        return out

    def with_arrays(self, arrays) -> "GateNetwork":
        rebuilt: List[Optional[MlpParams]] = []
        pos = 0
        for slot in self.slots:
            if slot is None:
                rebuilt.append(None)
                continue
            size = len(slot.arrays())
            rebuilt.append(slot.with_arrays(arrays[pos : pos + size]))
            pos += size
        return GateNetwork(self.mode, self.m, rebuilt[2], rebuilt[0], rebuilt[1])


def build_gate(
    mode: GateMode,
    m: int,
    cfg: GateTrainConfig,
    rng: Optional[Rng] = None,
    feat_dim: Optional[int] = None,
) -> GateNetwork:
    """Glorot-initialized gate; ``rng=None`` gives an all-zero network (uniform weights)."""
    mode = GateMode(mode)
    if m < 1:
        raise LinkMoeError(ErrorCode.EMPTY_REGISTRY)
    with_feat = uses_features(mode, feat_dim)

    def make(dims: List[int], tag: str) -> MlpParams:
        if rng is None:
            return zeros_mlp(dims, cfg.dropout)
        return init_mlp(dims, rng.derive(tag), cfg.dropout)

    struct = None
    if mode is not GateMode.ONLY_FEAT:
        struct = make(mlp_dims(len(struct_columns_for(mode)), cfg.hidden_dim, cfg.hidden_dim, cfg.layers), "struct")
    feat = make(mlp_dims(int(feat_dim), cfg.hidden_dim, cfg.hidden_dim, cfg.layers), "feat") if with_feat else None
    width = cfg.hidden_dim * ((struct is not None) + (feat is not None))
    fusion = make(mlp_dims(width, cfg.hidden_dim, m, cfg.layers), "fusion")
    return GateNetwork(mode=mode, m=m, fusion_head=fusion, struct_branch=struct, feat_branch=feat)


@dataclass
class GateTape:
    weights: np.ndarray
    fusion: Tape
    struct: Optional[Tape]
    feat: Optional[Tape]
    struct_width: int


def _branch_input(gn: GateNetwork, inputs: GateInputs) -> Tuple[Optional[np.ndarray], Optional[np.ndarray]]:
    s = x = None
    if gn.struct_branch is not None:
        if inputs.structural is None:
            raise LinkMoeError(ErrorCode.MODE_INPUT_MISMATCH, "gate needs structural input", mode=gn.mode)
        if inputs.structural.shape[1] != STRUCT_DIM:
            raise LinkMoeError(ErrorCode.DIM_MISMATCH, expected=STRUCT_DIM, got=int(inputs.structural.shape[1]))
        s = inputs.structural[:, list(gn.struct_columns)]
    if gn.feat_branch is not None:
        if inputs.feature is None:
            raise LinkMoeError(ErrorCode.MODE_INPUT_MISMATCH, "gate needs pair features", mode=gn.mode)
        x = inputs.feature
    elif inputs.feature is not None:
        raise LinkMoeError(ErrorCode.MODE_INPUT_MISMATCH, "pair features given to a gate without feature branch")
    return s, x


def gate_forward_tape(
    gn: GateNetwork,
    inputs: GateInputs,
    train_mode: bool = False,
    rng: Optional[Rng] = None,
) -> GateTape:
    s, x = _branch_input(gn, inputs)
    parts: List[np.ndarray] = []
    st_tape = ft_tape = None
    if s is not None:
        hs, st_tape = mlp_forward(gn.struct_branch, s, train_mode, rng)
        parts.append(hs)
    if x is not None:
        hx, ft_tape = mlp_forward(gn.feat_branch, x, train_mode, rng)
        parts.append(hx)
    z, fu_tape = mlp_forward(gn.fusion_head, np.concatenate(parts, axis=1), train_mode, rng)
    width = gn.struct_branch.out_dim if gn.struct_branch is not None else 0
    return GateTape(weights=softmax(z, axis=1), fusion=fu_tape, struct=st_tape, feat=ft_tape, struct_width=width)


def gate_forward(
    gn: GateNetwork,
    inputs: GateInputs,
    train_mode: bool = False,
    rng: Optional[Rng] = None,
) -> np.ndarray:
    """Expert weights, (B, m) or (m,) for a single-pair input; rows are positive and sum to 1."""
    weights = gate_forward_tape(gn, inputs, train_mode, rng).weights
    return weights[0] if inputs.squeeze else weights


def gate_backward(tape: GateTape, grad_weights: np.ndarray) -> List[np.ndarray]:
    """Gradients in ``GateNetwork.arrays()`` order for dL/dweights of shape (B, m)."""
    grad_z = softmax_backward(tape.weights, np.atleast_2d(grad_weights))
    fusion_grads, grad_cat = mlp_backward(tape.fusion, grad_z)
    grads: List[np.ndarray] = []
    if tape.struct is not None:
        g, _ = mlp_backward(tape.struct, grad_cat[:, : tape.struct_width])
        grads.extend(g)
    if tape.feat is not None:
        g, _ = mlp_backward(tape.feat, grad_cat[:, tape.struct_width :])
        grads.extend(g)
    return grads + fusion_grads


def moe_logits(weights: np.ndarray, scores: np.ndarray) -> np.ndarray:
    return np.sum(np.asarray(weights) * np.asarray(scores, dtype=np.float64), axis=-1)


def moe_predict(gn: GateNetwork, score_column, inputs: GateInputs) -> np.ndarray:
    """sigmoid(sum_o w_o * score_o) per pair."""
    return sigmoid(moe_logits(gate_forward(gn, inputs), score_column))


def gate_loss_and_grads(
    gn: GateNetwork,
    inputs: GateInputs,
    scores: np.ndarray,
    labels: np.ndarray,
    train_mode: bool = False,
    rng: Optional[Rng] = None,
) -> Tuple[float, List[np.ndarray]]:
    """Mean BCE of the mixture over a batch and its gradient w.r.t. every gate parameter."""
    tape = gate_forward_tape(gn, inputs, train_mode, rng)
    logits = moe_logits(tape.weights, scores)
    loss, grad_logit = bce_loss(logits, labels)
    grad_logit = grad_logit / labels.shape[0]
    grads = gate_backward(tape, grad_logit[:, None] * scores)
    return float(loss.mean()), grads
