"""Hyperparameter grids for gate model selection."""
from __future__ import annotations

import itertools
from typing import Any, Dict, List, Sequence

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.models.schemas.run import parse_config_file
from linkmoe.models.schemas.training import GateTrainConfig

GRID_KEYS = ("lr", "dropout", "weight_decay", "layers", "hidden_dim")

_SMALL_GRAPH = {
    "dropout": [0.0, 0.3, 0.5],
    "weight_decay": [1e-4, 1e-7, 0.0],
    "layers": [1, 2, 3],
    "hidden_dim": [8, 16, 32, 64],
}

GRID_PRESETS: Dict[str, Dict[str, List[Any]]] = {
    "planetoid": {"lr": [1e-4, 5e-4], **_SMALL_GRAPH},
    "pubmed": {"lr": [1e-2, 1e-3], **_SMALL_GRAPH},
    "ogb": {
        "lr": [1e-2, 1e-3],
        "dropout": [0.0, 0.3, 0.5],
        "weight_decay": [0.0],
        "layers": [2, 3, 4],
        "hidden_dim": [32, 64, 128],
    },
}


def _parse_values(key: str, text: str) -> List[Any]:
    cast = int if key in ("layers", "hidden_dim") else float
    try:
        return [cast(v.strip()) for v in text.split(",") if v.strip()]
    except ValueError:
        raise LinkMoeError(ErrorCode.INVALID_CONFIG, "bad grid value", key=key, value=text) from None


def load_grid(source: str) -> Dict[str, List[Any]]:
    """``preset:<name>`` or a ``key = v1, v2`` file."""
    if source.startswith("preset:"):
        name = source.split(":", 1)[1]
        if name not in GRID_PRESETS:
            raise LinkMoeError(ErrorCode.INVALID_CONFIG, "unknown grid preset", preset=name,
                               known=",".join(GRID_PRESETS))
        return {k: list(v) for k, v in GRID_PRESETS[name].items()}
    grid: Dict[str, List[Any]] = {}
    for key, value in parse_config_file(source).items():
        if key not in GRID_KEYS:
            raise LinkMoeError(ErrorCode.INVALID_CONFIG, "unknown grid key", key=key, known=",".join(GRID_KEYS))
        grid[key] = _parse_values(key, value)
    return grid


def expand_grid(base: GateTrainConfig, grid: Dict[str, Sequence[Any]]) -> List[GateTrainConfig]:
    """Cartesian product over ``grid`` in key order, each point layered on ``base``."""
    keys = [k for k in GRID_KEYS if k in grid]
    points = []
    for values in itertools.product(*(grid[k] for k in keys)):
        points.append(base.model_copy(update=dict(zip(keys, values))))
    return points
