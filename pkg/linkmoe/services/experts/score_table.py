"""External score files: one "u v score" line per pair, '#' comments allowed."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple

import numpy as np
import pandas as pd

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.services.graph_store.types import as_pairs, canonical_pairs
from linkmoe.utils.helpers.file_utils import iter_data_lines, require_file

logger = logging.getLogger(__name__)

_SHIFT = np.int64(32)
_COLUMNS = {0: np.int64, 1: np.int64, 2: np.float64}


def _keys(canon: np.ndarray) -> np.ndarray:
    return (canon[:, 0] << _SHIFT) | canon[:, 1]


@dataclass(frozen=True)
class ScoreTable:
    """Sorted canonical keys with their scores; lookups are vectorized binary searches."""

    keys: np.ndarray
    values: np.ndarray
    source: str = ""

    def __len__(self) -> int:
        return int(self.keys.size)

    def lookup(self, pairs) -> Tuple[np.ndarray, np.ndarray]:
        """Scores for ``pairs`` and a boolean mask of which were found."""
        canon = canonical_pairs(pairs)
        wanted = _keys(canon)
        pos = np.searchsorted(self.keys, wanted)
        pos_clipped = np.minimum(pos, max(self.keys.size - 1, 0))
        found = (pos < self.keys.size) & (self.keys[pos_clipped] == wanted) if self.keys.size else np.zeros(
            wanted.size, dtype=bool
        )
        out = np.zeros(wanted.size, dtype=np.float64)
        out[found] = self.values[pos_clipped[found]]
        return out, found

    def get(self, u: int, v: int) -> float | None:
        scores, found = self.lookup([[u, v]])
        return float(scores[0]) if found[0] else None


def _scan(path: Path) -> Tuple[np.ndarray, np.ndarray, List[int]]:
    pairs, scores, lines = [], [], []
    for line_no, text in iter_data_lines(path):
        parts = text.split()
        try:
            if len(parts) != 3:
                raise ValueError(text)
            u, v, s = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise LinkMoeError(ErrorCode.MALFORMED_LINE, path=str(path), line_no=line_no) from None
        if u < 0 or v < 0:
            raise LinkMoeError(ErrorCode.MALFORMED_LINE, "negative node id", path=str(path), line_no=line_no)
        pairs.append((u, v))
        scores.append(s)
        lines.append(line_no)
    return as_pairs(pairs), np.asarray(scores, dtype=np.float64), lines


def from_arrays(pairs, scores, source: str = "", lines: List[int] | None = None) -> ScoreTable:
    canon = canonical_pairs(pairs)
    scores = np.asarray(scores, dtype=np.float64)
    bad = np.flatnonzero(~np.isfinite(scores))
    if bad.size:
        where = lines[bad[0]] if lines else int(bad[0]) + 1
        raise LinkMoeError(ErrorCode.NON_FINITE_SCORE, path=source, line_no=where)
    keys = _keys(canon)
    order = np.argsort(keys, kind="stable")
    keys, scores = keys[order], scores[order]
    same = keys[1:] == keys[:-1]
    clash = np.flatnonzero(same & (scores[1:] != scores[:-1]))
    if clash.size:
        u, v = canon[order[clash[0]]]
        raise LinkMoeError(ErrorCode.CONFLICTING_DUPLICATE, path=source, pair=f"({u},{v})")
    keep = np.concatenate(([True], ~same)) if keys.size else np.zeros(0, dtype=bool)
    return ScoreTable(keys=keys[keep], values=scores[keep], source=source)


def load_score_table(path: str | Path) -> ScoreTable:
    p = require_file(path)
    try:
        frame = pd.read_csv(
            p, sep=r"\s+", comment="#", header=None, dtype=_COLUMNS, engine="c", float_precision="round_trip"
        )
        if frame.shape[1] != 3:
            raise ValueError("columns")
        pairs = frame.iloc[:, :2].to_numpy(dtype=np.int64)
        scores = frame.iloc[:, 2].to_numpy(dtype=np.float64)
        if (pairs < 0).any():
            raise ValueError("negative id")
        lines = None
    except pd.errors.EmptyDataError:
        pairs, scores, lines = as_pairs([]), np.zeros(0), []
    except (ValueError, TypeError, pd.errors.ParserError):
        pairs, scores, lines = _scan(p)
    if lines is None and not np.isfinite(scores).all():
        # rescan for the exact offending line
        pairs, scores, lines = _scan(p)
    table = from_arrays(pairs, scores, source=str(p), lines=lines)
    logger.info(f"Loaded score table {p.name}: {len(table)} pairs")
    return table


def write_score_file(path: str | Path, pairs, scores) -> Path:
    """Write "u v score" lines at full float precision so the file re-ingests exactly."""
    target = Path(path)
    canon = as_pairs(pairs)
    values = np.asarray(scores, dtype=np.float64)
    with open(target, "w", encoding="utf-8") as f:
        for (u, v), s in zip(canon.tolist(), values.tolist()):
            f.write(f"{u} {v} {s!r}\n")
    return target
