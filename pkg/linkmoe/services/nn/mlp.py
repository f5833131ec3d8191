from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.core.rng import Rng
from linkmoe.services.nn.params import MlpParams


@dataclass
class Tape:
    """Intermediates of one forward pass, consumed by ``mlp_backward``."""

    params: MlpParams
    inputs: List[np.ndarray]
    pre_activations: List[np.ndarray]
    masks: List[Optional[np.ndarray]]
    squeeze: bool

    @property
    def out_shape(self) -> tuple:
        out = self.pre_activations[-1]
        return out.shape[1:] if self.squeeze else out.shape


def mlp_forward(
    p: MlpParams,
    x,
    train_mode: bool = False,
    rng: Optional[Rng] = None,
) -> Tuple[np.ndarray, Tape]:
    """Forward a vector or a (batch, in) matrix; dropout masks come from ``rng`` in train mode."""
    x = np.asarray(x, dtype=np.float64)
    squeeze = x.ndim == 1
    h = np.atleast_2d(x)
    if h.shape[1] != p.in_dim:
        raise LinkMoeError(ErrorCode.DIM_MISMATCH, expected=p.in_dim, got=int(h.shape[1]))
    use_dropout = train_mode and p.dropout_p > 0.0
    if use_dropout and rng is None:
        raise LinkMoeError(ErrorCode.INVALID_CONFIG, "dropout in train mode needs an rng")
    keep = 1.0 - p.dropout_p
    last = len(p.weights) - 1
    inputs, pres, masks = [], [], []
    for l, (w, b) in enumerate(zip(p.weights, p.biases)):
        inputs.append(h)
        z = h @ w.T + b
        pres.append(z)
        if l == last:
            h = z
            break
        h = np.maximum(z, 0.0)
        mask = None
        if use_dropout:
            # inverted dropout: no rescale needed at eval time
            mask = (rng.random(h.shape) < keep) / keep
            h = h * mask
        masks.append(mask)
    tape = Tape(params=p, inputs=inputs, pre_activations=pres, masks=masks, squeeze=squeeze)
    return (h[0] if squeeze else h), tape


def mlp_backward(tape: Tape, grad_out) -> Tuple[List[np.ndarray], np.ndarray]:
    """Reverse-mode pass; grads follow ``MlpParams.arrays()`` order."""
    grad_out = np.asarray(grad_out, dtype=np.float64)
    if grad_out.shape != tape.out_shape:
        raise LinkMoeError(ErrorCode.TAPE_MISMATCH, expected=tape.out_shape, got=grad_out.shape)
    g = np.atleast_2d(grad_out)
    p = tape.params
    grads: List[np.ndarray] = [None] * (2 * len(p.weights))  # type: ignore[list-item]
    for l in range(len(p.weights) - 1, -1, -1):
        grads[2 * l] = g.T @ tape.inputs[l]
        grads[2 * l + 1] = g.sum(axis=0)
        g = g @ p.weights[l]
        if l > 0:
            mask = tape.masks[l - 1]
            if mask is not None:
                g = g * mask
            g = g * (tape.pre_activations[l - 1] > 0.0)
    return grads, (g[0] if tape.squeeze else g)
