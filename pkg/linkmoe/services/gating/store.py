from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.models.schemas.training import GateMode
from linkmoe.services.experts.types import ScoreNormalizer
from linkmoe.services.gating.network import GateNetwork
from linkmoe.services.gating.standardizer import Standardizer
from linkmoe.services.nn import Checkpoint, CheckpointKind, load_checkpoint, save_checkpoint

_MODES = list(GateMode)


@dataclass(frozen=True)
class GateBundle:
    gate: GateNetwork
    standardizer: Optional[Standardizer]
    normalizer: Optional[ScoreNormalizer] = None
    sidecar: Dict[str, Any] = field(default_factory=dict)

    @property
    def experts(self) -> List[str]:
        return list(self.sidecar.get("experts", []))


def save_gate(
    path: str | Path,
    gate: GateNetwork,
    standardizer: Optional[Standardizer],
    sidecar: Dict[str, Any] | None = None,
    normalizer: Optional[ScoreNormalizer] = None,
) -> List[Path]:
    """Gate slots are (struct branch, feature branch, fusion head); the standardizer rides as extras."""
    extras = [np.zeros(0), np.zeros(0)] if standardizer is None else [standardizer.mean, standardizer.std]
    payload = dict(sidecar or {})
    payload.update({"mode": str(gate.mode), "m": gate.m})
    payload["score_normalizer"] = normalizer.to_dict() if normalizer is not None else None
    ckpt = Checkpoint(CheckpointKind.GATE, _MODES.index(gate.mode), gate.slots, extras, payload)
    return save_checkpoint(path, ckpt)


def load_gate(path: str | Path) -> GateBundle:
    ckpt = load_checkpoint(path, expected=CheckpointKind.GATE)
    if len(ckpt.slots) != 3 or ckpt.slots[2] is None or len(ckpt.extras) != 2 or ckpt.meta >= len(_MODES):
        raise LinkMoeError(ErrorCode.BAD_CHECKPOINT, "gate checkpoint layout", path=str(path))
    struct, feat, fusion = ckpt.slots
    try:
        gate = GateNetwork(_MODES[ckpt.meta], fusion.out_dim, fusion, struct, feat)
    except LinkMoeError as exc:
        raise LinkMoeError(ErrorCode.BAD_CHECKPOINT, exc.detail, path=str(path)) from exc
    mean, std = ckpt.extras
    standardizer = Standardizer(mean, std) if mean.size else None
    norm = ckpt.sidecar.get("score_normalizer")
    normalizer = ScoreNormalizer.from_dict(norm) if norm else None
    return GateBundle(gate, standardizer, normalizer, ckpt.sidecar)
