from .heuristics import HeuristicConfig
from .training import EnsembleTrainConfig, FeatureMlpConfig, GateMode, GateTrainConfig
from .run import RunConfig, RunManifest, parse_config_file
from .grid import GRID_PRESETS, expand_grid, load_grid

__all__ = [
    "HeuristicConfig",
    "GateMode",
    "GateTrainConfig",
    "FeatureMlpConfig",
    "EnsembleTrainConfig",
    "RunConfig",
    "RunManifest",
    "parse_config_file",
    "GRID_PRESETS",
    "load_grid",
    "expand_grid",
]
