from __future__ import annotations

from typing import Tuple

import numpy as np
from scipy import special

LOGIT_CLAMP = 30.0


def softmax(v: np.ndarray, axis: int = -1) -> np.ndarray:
    """Max-subtracted softmax along ``axis``."""
    return special.softmax(np.asarray(v, dtype=np.float64), axis=axis)


def sigmoid(z) -> np.ndarray:
    return special.expit(np.asarray(z, dtype=np.float64))


def bce_loss(logit, y) -> Tuple[np.ndarray, np.ndarray]:
    """Elementwise binary cross-entropy of sigmoid(logit) against labels in {0, 1}.

    Returns (loss, dloss/dlogit); logits are clamped to +-30 first.
    """
    z = np.clip(np.asarray(logit, dtype=np.float64), -LOGIT_CLAMP, LOGIT_CLAMP)
    y = np.asarray(y, dtype=np.float64)
    loss = -(y * special.log_expit(z) + (1.0 - y) * special.log_expit(-z))
    return loss, special.expit(z) - y


def softmax_backward(weights: np.ndarray, grad_weights: np.ndarray) -> np.ndarray:
    """Pull a gradient w.r.t. softmax outputs back to its logits (row-wise)."""
    inner = np.sum(weights * grad_weights, axis=-1, keepdims=True)
    return weights * (grad_weights - inner)
