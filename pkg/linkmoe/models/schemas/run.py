from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, ValidationError

from linkmoe.core.config import settings
from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.models.schemas.heuristics import HeuristicConfig
from linkmoe.models.schemas.training import EnsembleTrainConfig, FeatureMlpConfig, GateTrainConfig

DEFAULT_KS: List[int] = [1, 3, 10, 20, 50, 100]

_RUN_KEYS = {
    "split_dir", "graph_header", "features", "dataset", "experts", "out_dir", "seed",
    "threads", "include_valid_in_graph", "normalize_scores", "ks",
}
_LIST_KEYS = {"experts", "ks", "ensemble_init_weights"}


class RunConfig(BaseModel):
    split_dir: Path
    graph_header: Optional[Path] = None
    features: Optional[Path] = None
    dataset: Optional[str] = None
    experts: List[str] = Field(default_factory=list)
    heuristics: HeuristicConfig = Field(default_factory=HeuristicConfig)
    gate: GateTrainConfig = Field(default_factory=GateTrainConfig)
    mlp: FeatureMlpConfig = Field(default_factory=FeatureMlpConfig)
    ensemble: EnsembleTrainConfig = Field(default_factory=EnsembleTrainConfig)
    out_dir: Path = Path("out")
    seed: int = 0
    threads: Optional[int] = None
    include_valid_in_graph: bool = False
    normalize_scores: bool = False
    ks: List[int] = Field(default_factory=lambda: list(DEFAULT_KS))

    @property
    def header_path(self) -> Path:
        return self.graph_header or self.split_dir / "graph.txt"

    def check_paths(self) -> None:
        for name, path in (("split_dir", self.split_dir), ("graph_header", self.header_path)):
            if not path.exists():
                raise LinkMoeError(ErrorCode.MISSING_FILE, f"{name} not found", path=str(path))
        if self.features is not None and not self.features.exists():
            raise LinkMoeError(ErrorCode.MISSING_FILE, "feature file not found", path=str(self.features))

    @classmethod
    def from_sources(cls, file_values: Dict[str, str], flag_values: Dict[str, Any]) -> "RunConfig":
        """Merge flat key/value sources with precedence flag > config file > default."""
        flat: Dict[str, Any] = {}
        for key, value in file_values.items():
            flat[key] = [v.strip() for v in value.split(",") if v.strip()] if key in _LIST_KEYS else value
        flat.update({k: v for k, v in flag_values.items() if v is not None})

        nested: Dict[str, Dict[str, Any]] = {"heuristics": {}, "gate": {}, "mlp": {}, "ensemble": {}}
        top: Dict[str, Any] = {}
        for key, value in flat.items():
            if key in _RUN_KEYS:
                top[key] = value
            elif key in HeuristicConfig.model_fields:
                nested["heuristics"][key] = value
            elif key.startswith("mlp_") and key[4:] in FeatureMlpConfig.model_fields:
                nested["mlp"][key[4:]] = value
            elif key.startswith("ensemble_") and key[9:] in EnsembleTrainConfig.model_fields:
                nested["ensemble"][key[9:]] = value
            elif key in GateTrainConfig.model_fields:
                nested["gate"][key] = value
            else:
                raise LinkMoeError(ErrorCode.INVALID_CONFIG, "unknown config key", key=key)
        top.setdefault("seed", settings.DEFAULT_SEED)
        gate = nested["gate"]
        gate.setdefault("seed", top["seed"])
        gate.setdefault("split_ratio", settings.split_ratio_for(top.get("dataset")))
        gate.setdefault("max_epochs", settings.GATE_MAX_EPOCHS)
        gate.setdefault("patience", settings.GATE_PATIENCE)
        gate.setdefault("batch_size", settings.GATE_BATCH_SIZE)
        try:
            return cls(**top, **nested)
        except ValidationError as exc:
            raise LinkMoeError(ErrorCode.INVALID_CONFIG, str(exc).splitlines()[0], errors=exc.error_count())


def parse_config_file(path: str | Path) -> Dict[str, str]:
    """Line-oriented ``key = value`` text; '#' starts a comment."""
    values: Dict[str, str] = {}
    p = Path(path)
    if not p.is_file():
        raise LinkMoeError(ErrorCode.MISSING_FILE, "config file not found", path=str(p))
    for line_no, raw in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise LinkMoeError(ErrorCode.MALFORMED_LINE, "expected key = value", path=str(p), line_no=line_no)
        key, value = (part.strip() for part in text.split("=", 1))
        values[key] = value
    return values


class RunManifest(BaseModel):
    command: str
    toolkit_version: str
    seed: int
    config: Dict[str, Any]
    stages: Dict[str, float] = Field(default_factory=dict)
    files: Dict[str, str] = Field(default_factory=dict)
