"""Per-run output bookkeeping: tracked files, stage timings and the run manifest."""
from __future__ import annotations

import logging
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, Iterator, List

import pandas as pd

from linkmoe import __version__
from linkmoe.models.schemas.run import RunConfig, RunManifest
from linkmoe.utils.helpers.encryption import file_sha256
from linkmoe.utils.helpers.file_utils import ensure_dir, write_frame, write_json

logger = logging.getLogger(__name__)

MANIFEST_FILE = "run_manifest.json"


class RunContext:
    def __init__(self, command: str, cfg: RunConfig) -> None:
        self.command = command
        self.cfg = cfg
        self.out_dir = Path(cfg.out_dir)
        self._created_dir = not self.out_dir.exists()
        ensure_dir(self.out_dir)
        self.files: List[Path] = []
        self.stages: Dict[str, float] = {}
        self.started = time.perf_counter()
        logger.info(f"Starting {command}", extra={"out_dir": str(self.out_dir), "seed": cfg.seed})

    def path(self, name: str) -> Path:
        """Output path under the run directory; the file is tracked for the manifest and cleanup."""
        target = self.out_dir / name
        if target not in self.files:
            self.files.append(target)
        return target

    def track(self, paths) -> None:
        for p in paths:
            if Path(p) not in self.files:
                self.files.append(Path(p))

    def write_frame(self, name: str, frame: pd.DataFrame) -> Path:
        return write_frame(self.path(name), frame)

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.stages[name] = round(time.perf_counter() - t0, 6)
            logger.info(f"Stage {name} finished in {self.stages[name]:.3f}s")

    def finish(self) -> Path:
        manifest = RunManifest(
            command=self.command,
            toolkit_version=__version__,
            seed=self.cfg.seed,
            config=self.cfg.model_dump(mode="json"),
            stages=self.stages,
            files={p.name: file_sha256(p) for p in self.files if p.is_file()},
        )
        target = write_json(self.out_dir / MANIFEST_FILE, manifest.model_dump(mode="json"))
        elapsed = time.perf_counter() - self.started
        logger.info(f"Finished {self.command} in {elapsed:.2f}s", extra={"files": len(manifest.files)})
        return target

    def cleanup(self) -> None:
        """Remove everything this run wrote (used when the run fails)."""
        for p in self.files + [self.out_dir / MANIFEST_FILE]:
            if p.is_file():
                p.unlink()
        if self._created_dir and self.out_dir.is_dir() and not any(self.out_dir.iterdir()):
            self.out_dir.rmdir()
