from __future__ import annotations

from enum import StrEnum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field


class GateMode(StrEnum):
    ALL = "all"
    ONLY_STRUCT = "only-struct"
    ONLY_FEAT = "only-feat"
    ONLY_LOCAL_STRUCT = "only-local"
    ONLY_GLOBAL_STRUCT = "only-global"


class GateTrainConfig(BaseModel):
    """Gate hyperparameters; lr/dropout/weight_decay/layers/hidden_dim span the search grid."""

    model_config = ConfigDict(frozen=True)

    mode: GateMode = GateMode.ALL
    lr: float = Field(0.001, ge=0.0)
    dropout: float = Field(0.0, ge=0.0, lt=1.0)
    weight_decay: float = Field(0.0, ge=0.0)
    layers: int = Field(2, ge=1)
    hidden_dim: int = Field(32, ge=1)
    max_epochs: int = Field(500, ge=1)
    patience: int = Field(20, ge=1)
    batch_size: int = Field(4096, ge=1)
    seed: int = 0
    split_ratio: float = Field(0.9, gt=0.0, lt=1.0)


class FeatureMlpConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    lr: float = Field(0.01, ge=0.0)
    dropout: float = Field(0.0, ge=0.0, lt=1.0)
    weight_decay: float = Field(0.0, ge=0.0)
    layers: int = Field(2, ge=1)
    hidden_dim: int = Field(32, ge=1)
    epochs: int = Field(100, ge=1)
    batch_size: int = Field(4096, ge=1)


class EnsembleTrainConfig(BaseModel):
    """Global-Ensemble weight training; early stopping mirrors the gate."""

    model_config = ConfigDict(frozen=True)

    lr: float = Field(0.01, ge=0.0)
    weight_decay: float = Field(0.0, ge=0.0)
    max_epochs: int = Field(500, ge=1)
    patience: int = Field(20, ge=1)
    batch_size: int = Field(4096, ge=1)
    init_weights: Optional[list[float]] = None
