"""Personalized PageRank by forward push (local residual propagation)."""
from __future__ import annotations

from collections import deque
from typing import Dict

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.services.graph_store.types import Graph
from linkmoe.services.heuristics.common import check_pair


def ppr(g: Graph, src: int, alpha: float, eps: float) -> Dict[int, float]:
    """Approximate PPR vector of ``src`` as a sparse {node: score} table.

    Push until every residual r[u] < eps * deg(u). Mass reaching a node with
    no neighbors restarts in place, so an isolated source keeps score 1.
    """
    if not 0.0 < alpha < 1.0:
        raise LinkMoeError(ErrorCode.INVALID_CONFIG, "ppr alpha must be in (0, 1)", alpha=alpha)
    src = int(src)
    if src < 0 or src >= g.n:
        raise LinkMoeError(ErrorCode.NODE_OUT_OF_RANGE, node=src, n=g.n)
    deg = g.degrees
    offsets = g.csr_offsets
    nbrs = g.csr_neighbors
    score: Dict[int, float] = {}
    residual: Dict[int, float] = {src: 1.0}
    queue = deque([src])
    queued = {src}
    while queue:
        u = queue.popleft()
        queued.discard(u)
        ru = residual.get(u, 0.0)
        du = int(deg[u])
        if du == 0:
            score[u] = score.get(u, 0.0) + ru
            residual[u] = 0.0
            continue
        if ru < eps * du:
            continue
        score[u] = score.get(u, 0.0) + alpha * ru
        residual[u] = 0.0
        share = (1.0 - alpha) * ru / du
        for v in nbrs[offsets[u] : offsets[u + 1]].tolist():
            rv = residual.get(v, 0.0) + share
            residual[v] = rv
            if v not in queued and rv >= eps * deg[v]:
                queue.append(v)
                queued.add(v)
    return score


def ppr_pair_from(table_i: Dict[int, float], table_j: Dict[int, float], i: int, j: int) -> float:
    return table_i.get(j, 0.0) + table_j.get(i, 0.0)


def ppr_pair(g: Graph, i: int, j: int, alpha: float, eps: float) -> float:
    """Symmetrized pair score ppr(i)[j] + ppr(j)[i]."""
    i, j = check_pair(g.n, i, j)
    return ppr_pair_from(ppr(g, i, alpha, eps), ppr(g, j, alpha, eps), i, j)
