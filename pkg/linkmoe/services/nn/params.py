from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.core.rng import Rng


@dataclass(frozen=True)
class MlpParams:
    """Dense ReLU MLP: weights[l] is (out, in), biases[l] is (out,); no activation after the last layer."""

    weights: List[np.ndarray]
    biases: List[np.ndarray]
    dropout_p: float = 0.0

    def __post_init__(self) -> None:
        if not self.weights or len(self.weights) != len(self.biases):
            raise LinkMoeError(ErrorCode.DIM_MISMATCH, "weights and biases must pair up")
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.ndim != 2 or b.shape != (w.shape[0],):
                raise LinkMoeError(ErrorCode.DIM_MISMATCH, layer=l, weight=w.shape, bias=b.shape)
            if l and w.shape[1] != self.weights[l - 1].shape[0]:
                raise LinkMoeError(ErrorCode.DIM_MISMATCH, "layer dims do not chain", layer=l)
            if not (np.isfinite(w).all() and np.isfinite(b).all()):
                raise LinkMoeError(ErrorCode.NON_FINITE_VALUE, "non-finite parameter", layer=l)

    @property
    def dims(self) -> List[int]:
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    @property
    def in_dim(self) -> int:
        return int(self.weights[0].shape[1])

    @property
    def out_dim(self) -> int:
        return int(self.weights[-1].shape[0])

    def arrays(self) -> List[np.ndarray]:
        """Parameters in layer order: W0, b0, W1, b1, ..."""
        out: List[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def with_arrays(self, arrays: Sequence[np.ndarray]) -> "MlpParams":
        return MlpParams(
            weights=[np.array(a, dtype=np.float64) for a in arrays[0::2]],
            biases=[np.array(a, dtype=np.float64) for a in arrays[1::2]],
            dropout_p=self.dropout_p,
        )


def mlp_dims(in_dim: int, hidden_dim: int, out_dim: int, layers: int) -> List[int]:
    return [in_dim] + [hidden_dim] * (layers - 1) + [out_dim]


def init_mlp(dims: Sequence[int], rng: Rng, dropout_p: float = 0.0) -> MlpParams:
    """Glorot-uniform weights, zero biases."""
    weights, biases = [], []
    for fan_in, fan_out in zip(dims[:-1], dims[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, (fan_out, fan_in)))
        biases.append(np.zeros(fan_out, dtype=np.float64))
    return MlpParams(weights=weights, biases=biases, dropout_p=dropout_p)


def zeros_mlp(dims: Sequence[int], dropout_p: float = 0.0) -> MlpParams:
    return MlpParams(
        weights=[np.zeros((o, i), dtype=np.float64) for i, o in zip(dims[:-1], dims[1:])],
        biases=[np.zeros(o, dtype=np.float64) for o in dims[1:]],
        dropout_p=dropout_p,
    )
