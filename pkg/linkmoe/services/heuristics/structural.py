from __future__ import annotations

import logging
import time
from functools import lru_cache
from typing import Dict, List, Optional

import numpy as np

from linkmoe.models.schemas.heuristics import HeuristicConfig
from linkmoe.services.graph_store.types import Graph
from linkmoe.services.heuristics.common import check_pair, check_pairs
from linkmoe.services.heuristics.local import shared_neighbors
from linkmoe.services.heuristics.paths import (
    MAX_KATZ_LEN,
    katz_from_walks,
    shortest_path,
    sp_score,
    walk_counts,
)
from linkmoe.services.heuristics.ppr import ppr, ppr_pair_from
from linkmoe.workers.pool import chunk_bounds, ordered_map

logger = logging.getLogger(__name__)

STRUCTURAL_COLUMNS: List[str] = ["deg_sum", "deg_absdiff", "CN", "AA", "RA", "SP_score", "Katz", "PPR_sym"]
COLUMN_INDEX: Dict[str, int] = {name: k for k, name in enumerate(STRUCTURAL_COLUMNS)}
LOCAL_COLUMNS = ["CN", "AA", "RA"]
GLOBAL_COLUMNS = ["SP_score", "Katz", "PPR_sym"]
DEGREE_COLUMNS = ["deg_sum", "deg_absdiff"]

_CACHE_SIZE = 4096
_CHUNK = 256


class HeuristicCache:
    """Per-source Katz walks and PPR tables reused across the pairs of one batch.

    Not shared between threads; every chunk of a batch builds its own.
    """

    def __init__(self, g: Graph, cfg: HeuristicConfig) -> None:
        self.g = g
        self.cfg = cfg
        self.walks = lru_cache(maxsize=_CACHE_SIZE)(self._walks)
        self.ppr_table = lru_cache(maxsize=_CACHE_SIZE)(self._ppr_table)

    def _walks(self, src: int) -> List[np.ndarray]:
        return walk_counts(self.g, src, min(self.cfg.katz_max_len, MAX_KATZ_LEN))

    def _ppr_table(self, src: int) -> Dict[int, float]:
        return ppr(self.g, src, self.cfg.ppr_alpha, self.cfg.ppr_eps)

    def vector(self, i: int, j: int) -> np.ndarray:
        """Structural vector of a canonical (i < j) pair, already validated."""
        g = self.g
        di, dj = float(g.degrees[i]), float(g.degrees[j])
        common = shared_neighbors(g, i, j)
        deg = g.degrees[common]
        aa_deg = deg[deg >= 2]
        ra_deg = deg[deg >= 1]
        aa = float(np.sum(1.0 / np.log(aa_deg))) if aa_deg.size else 0.0
        ra = float(np.sum(1.0 / ra_deg)) if ra_deg.size else 0.0
        distance = shortest_path(g, i, j, self.cfg.sp_cap)
        katz_value = katz_from_walks(self.walks(i), j, self.cfg.katz_beta)
        ppr_value = ppr_pair_from(self.ppr_table(i), self.ppr_table(j), i, j)
        return np.array(
            [di + dj, abs(di - dj), float(common.size), aa, ra, sp_score(distance), katz_value, ppr_value],
            dtype=np.float64,
        )


def structural_vector(g: Graph, cfg: HeuristicConfig, i: int, j: int) -> np.ndarray:
    """[d_i+d_j, |d_i-d_j|, CN, AA, RA, 1/SP, Katz, PPR_sym] for one pair."""
    i, j = check_pair(g.n, i, j)
    return HeuristicCache(g, cfg).vector(i, j)


def batch_structural(
    g: Graph,
    cfg: HeuristicConfig,
    pairs,
    threads: Optional[int] = None,
) -> np.ndarray:
    """Pairs x 8 matrix in input order; identical for any worker count."""
    canon = check_pairs(g.n, pairs)
    if canon.shape[0] == 0:
        return np.zeros((0, len(STRUCTURAL_COLUMNS)), dtype=np.float64)
    started = time.perf_counter()

    def _run(bounds: tuple[int, int]) -> np.ndarray:
        cache = HeuristicCache(g, cfg)
        lo, hi = bounds
        return np.stack([cache.vector(int(u), int(v)) for u, v in canon[lo:hi]])

    blocks = ordered_map(_run, chunk_bounds(canon.shape[0], _CHUNK), threads)
    out = np.vstack(blocks)
    logger.info(
        "Computed structural heuristics",
        extra={"pairs": int(out.shape[0]), "elapsed_s": round(time.perf_counter() - started, 3)},
    )
    return out
