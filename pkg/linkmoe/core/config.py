from functools import lru_cache
from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Dict, Optional
import os


class Settings(BaseSettings):
    APP_NAME: str = "linkmoe"
    VERSION: str = "0.1.0"

    # Runtime
    LOG_LEVEL: str = "INFO"
    LOG_JSON: bool = True
    # Worker cap for heuristic / scoring fan-out; None means machine parallelism
    LINKMOE_THREADS: Optional[int] = None
    DEFAULT_SEED: int = 0

    # Training defaults
    GATE_BATCH_SIZE: int = 4096
    GATE_MAX_EPOCHS: int = 500
    GATE_PATIENCE: int = 20
    DEFAULT_SPLIT_RATIO: float = 0.9

    # Validation re-split ratios per dataset name
    SPLIT_RATIO_PRESETS: Dict[str, float] = {
        "ogbl-citation2": 0.8,
        "ogbl-ppa": 0.8,
        "ogbl-collab": 0.9,
        "pubmed": 0.9,
    }

    @property
    def thread_count(self) -> int:
        if self.LINKMOE_THREADS and self.LINKMOE_THREADS > 0:
            return int(self.LINKMOE_THREADS)
        return os.cpu_count() or 1

    def split_ratio_for(self, dataset: str | None) -> float:
        if dataset:
            return self.SPLIT_RATIO_PRESETS.get(dataset.lower(), self.DEFAULT_SPLIT_RATIO)
        return self.DEFAULT_SPLIT_RATIO

    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True, extra="ignore")


@lru_cache()
def get_settings() -> Settings:
    return Settings()


settings = get_settings()
