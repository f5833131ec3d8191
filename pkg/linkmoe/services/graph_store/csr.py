from __future__ import annotations

import numpy as np

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.services.graph_store.types import Graph, as_pairs


def check_nodes(n: int, *nodes: int) -> None:
    for v in nodes:
        if v < 0 or v >= n:
            raise LinkMoeError(ErrorCode.NODE_OUT_OF_RANGE, node=int(v), n=int(n))


def build_graph(pairs, n: int) -> Graph:
    """Symmetrize and deduplicate ``pairs`` into a CSR graph over ``n`` nodes."""
    arr = as_pairs(pairs)
    if arr.size and (arr.min() < 0 or arr.max() >= n):
        bad = arr[(arr < 0) | (arr >= n)][0]
        raise LinkMoeError(ErrorCode.NODE_OUT_OF_RANGE, node=int(bad), n=int(n))
    loops = np.flatnonzero(arr[:, 0] == arr[:, 1])
    if loops.size:
        raise LinkMoeError(ErrorCode.SELF_LOOP, pair_index=int(loops[0]), node=int(arr[loops[0], 0]))

    both = np.concatenate([arr, arr[:, ::-1]], axis=0)
    keys = np.unique(both[:, 0] * np.int64(n) + both[:, 1])
    rows = keys // n
    cols = keys % n
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=offsets[1:])
    return Graph(n=int(n), csr_offsets=offsets, csr_neighbors=cols.astype(np.int64))


def degree(g: Graph, v: int) -> int:
    check_nodes(g.n, v)
    return int(g.csr_offsets[v + 1] - g.csr_offsets[v])


def graph_to_pairs(g: Graph) -> np.ndarray:
    """Each undirected edge once as (u, v) with u < v, in CSR order."""
    keys = g.edge_keys
    return np.stack([keys // g.n, keys % g.n], axis=1)
