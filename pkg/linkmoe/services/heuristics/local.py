"""Local structural proximity: Common Neighbors, Adamic-Adar, Resource Allocation."""
from __future__ import annotations

import numpy as np

from linkmoe.services.graph_store.types import Graph
from linkmoe.services.heuristics.common import check_pair


def shared_neighbors(g: Graph, i: int, j: int) -> np.ndarray:
    return np.intersect1d(g.neighbors(i), g.neighbors(j), assume_unique=True)


def common_neighbors(g: Graph, i: int, j: int) -> int:
    i, j = check_pair(g.n, i, j)
    return int(shared_neighbors(g, i, j).size)


def adamic_adar(g: Graph, i: int, j: int) -> float:
    i, j = check_pair(g.n, i, j)
    deg = g.degrees[shared_neighbors(g, i, j)]
    # ln(d) <= 0 for d < 2
    deg = deg[deg >= 2]
    if deg.size == 0:
        return 0.0
    return float(np.sum(1.0 / np.log(deg)))


def resource_allocation(g: Graph, i: int, j: int) -> float:
    i, j = check_pair(g.n, i, j)
    deg = g.degrees[shared_neighbors(g, i, j)]
    deg = deg[deg >= 1]
    if deg.size == 0:
        return 0.0
    return float(np.sum(1.0 / deg))
