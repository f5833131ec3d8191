"""Single-heuristic score columns, used by heuristic experts and by group keys."""
from __future__ import annotations

from typing import Callable, Dict, Optional

import numpy as np

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.models.schemas.heuristics import HeuristicConfig
from linkmoe.services.graph_store.types import FeatureMatrix, Graph
from linkmoe.services.heuristics.common import check_pairs
from linkmoe.services.heuristics.features import feature_cosine
from linkmoe.services.heuristics.local import adamic_adar, common_neighbors, resource_allocation
from linkmoe.services.heuristics.paths import katz_from_walks, shortest_path, sp_group_distance, sp_score
from linkmoe.services.heuristics.ppr import ppr_pair_from
from linkmoe.services.heuristics.structural import HeuristicCache
from linkmoe.workers.pool import chunk_bounds, ordered_map

HEURISTIC_NAMES = ("cn", "aa", "ra", "sp", "katz", "ppr", "fcs")
GROUP_KEYS = ("cn", "sp", "fcs")

_CHUNK = 512

PairScorer = Callable[[HeuristicCache, Optional[FeatureMatrix], int, int], float]

_SCORERS: Dict[str, PairScorer] = {
    "cn": lambda c, f, i, j: float(common_neighbors(c.g, i, j)),
    "aa": lambda c, f, i, j: adamic_adar(c.g, i, j),
    "ra": lambda c, f, i, j: resource_allocation(c.g, i, j),
    "sp": lambda c, f, i, j: sp_score(shortest_path(c.g, i, j, c.cfg.sp_cap)),
    "katz": lambda c, f, i, j: katz_from_walks(c.walks(i), j, c.cfg.katz_beta),
    "ppr": lambda c, f, i, j: ppr_pair_from(c.ppr_table(i), c.ppr_table(j), i, j),
    "fcs": lambda c, f, i, j: feature_cosine(f, i, j),
}


def _require(name: str, features: Optional[FeatureMatrix]) -> PairScorer:
    scorer = _SCORERS.get(name.lower())
    if scorer is None:
        raise LinkMoeError(ErrorCode.UNKNOWN_HEURISTIC, name=name, known=",".join(HEURISTIC_NAMES))
    if name.lower() == "fcs" and (features is None or features.d == 0):
        raise LinkMoeError(ErrorCode.NO_FEATURES, "feature cosine needs node features")
    return scorer


def heuristic_scores(
    name: str,
    g: Graph,
    features: Optional[FeatureMatrix],
    pairs,
    cfg: HeuristicConfig | None = None,
    threads: Optional[int] = None,
) -> np.ndarray:
    """One heuristic evaluated on every pair, in input order."""
    scorer = _require(name, features)
    cfg = cfg or HeuristicConfig()
    canon = check_pairs(g.n, pairs)

    def _run(bounds: tuple[int, int]) -> np.ndarray:
        cache = HeuristicCache(g, cfg)
        lo, hi = bounds
        return np.array([scorer(cache, features, int(u), int(v)) for u, v in canon[lo:hi]], dtype=np.float64)

    if canon.shape[0] == 0:
        return np.zeros(0, dtype=np.float64)
    return np.concatenate(ordered_map(_run, chunk_bounds(canon.shape[0], _CHUNK), threads))


def group_values(
    g: Graph,
    features: Optional[FeatureMatrix],
    cfg: HeuristicConfig,
    pairs,
    key: str,
) -> np.ndarray:
    """Grouping key per pair: CN count, raw SP distance (unreachable = cap + 1) or FCS."""
    key = key.lower()
    if key == "cn":
        return heuristic_scores("cn", g, features, pairs, cfg)
    if key == "fcs":
        return heuristic_scores("fcs", g, features, pairs, cfg)
    if key == "sp":
        canon = check_pairs(g.n, pairs)
        return np.array(
            [sp_group_distance(shortest_path(g, int(u), int(v), cfg.sp_cap), cfg.sp_cap) for u, v in canon],
            dtype=np.float64,
        )
    raise LinkMoeError(ErrorCode.INVALID_GROUPS, "unknown grouping key", key=key, known=",".join(GROUP_KEYS))
