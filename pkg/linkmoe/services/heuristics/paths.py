"""Global structural proximity by paths: bidirectional BFS distance and truncated Katz."""
from __future__ import annotations

from typing import List, Optional

import numpy as np

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.services.graph_store.types import Graph
from linkmoe.services.heuristics.common import check_pair

# returned by shortest_path when no path of length <= cap exists
UNREACHABLE = None
MAX_KATZ_LEN = 6


def _expand(g: Graph, frontier: np.ndarray) -> np.ndarray:
    starts = g.csr_offsets[frontier]
    ends = g.csr_offsets[frontier + 1]
    if frontier.size == 1:
        return g.csr_neighbors[starts[0] : ends[0]]
    return np.unique(np.concatenate([g.csr_neighbors[s:e] for s, e in zip(starts, ends)]))


def shortest_path(g: Graph, i: int, j: int, cap: int) -> Optional[int]:
    """Hop distance between i and j, or UNREACHABLE when it exceeds ``cap``."""
    i, j = check_pair(g.n, i, j)
    seen = (np.zeros(g.n, dtype=bool), np.zeros(g.n, dtype=bool))
    seen[0][i] = True
    seen[1][j] = True
    frontiers = [np.array([i], dtype=np.int64), np.array([j], dtype=np.int64)]
    depth = [0, 0]
    while frontiers[0].size and frontiers[1].size:
        if depth[0] + depth[1] >= cap:
            return UNREACHABLE
        side = 0 if frontiers[0].size <= frontiers[1].size else 1
        nxt = _expand(g, frontiers[side])
        nxt = nxt[~seen[side][nxt]]
        depth[side] += 1
        if seen[1 - side][nxt].any():
            return depth[0] + depth[1]
        seen[side][nxt] = True
        frontiers[side] = nxt
    return UNREACHABLE


def sp_score(distance: Optional[int]) -> float:
    """Higher-is-better transform used for ranking and as a gate feature."""
    return 0.0 if distance is UNREACHABLE else 1.0 / distance


def sp_group_distance(distance: Optional[int], cap: int) -> int:
    return cap + 1 if distance is UNREACHABLE else int(distance)


def walk_counts(g: Graph, src: int, max_len: int) -> List[np.ndarray]:
    """Rows of A^1..A^L for ``src`` via repeated sparse expansion."""
    vec = np.zeros(g.n, dtype=np.float64)
    vec[src] = 1.0
    out: List[np.ndarray] = []
    adj = g.adjacency
    for _ in range(max_len):
        vec = adj @ vec
        out.append(vec)
    return out


def katz_from_walks(walks: List[np.ndarray], j: int, beta: float) -> float:
    total = 0.0
    for length, counts in enumerate(walks, start=1):
        total += beta**length * counts[j]
    return float(total)


def katz(g: Graph, i: int, j: int, beta: float, max_len: int) -> float:
    """Truncated Katz index sum_{l<=L} beta^l (A^l)_ij."""
    if max_len < 1 or max_len > MAX_KATZ_LEN:
        raise LinkMoeError(ErrorCode.INVALID_CONFIG, "katz walk length out of range", max_len=max_len)
    i, j = check_pair(g.n, i, j)
    return katz_from_walks(walk_counts(g, i, max_len), j, beta)
