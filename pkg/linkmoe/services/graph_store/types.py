from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum
from functools import cached_property
from typing import Optional

import numpy as np
from scipy import sparse


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def as_pairs(pairs) -> np.ndarray:
    """Coerce any sequence of (u, v) into an (P, 2) int64 array."""
    arr = np.asarray(pairs, dtype=np.int64)
    if arr.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    return arr.reshape(-1, 2)


def canonical_pairs(pairs: np.ndarray) -> np.ndarray:
    return np.sort(as_pairs(pairs), axis=1)


def pair_keys(pairs: np.ndarray, n: int) -> np.ndarray:
    """Order-invariant integer key per pair."""
    canon = canonical_pairs(pairs)
    return canon[:, 0] * np.int64(n) + canon[:, 1]


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph in CSR form; neighbor lists are strictly increasing."""

    n: int
    csr_offsets: np.ndarray
    csr_neighbors: np.ndarray
    undirected: bool = True

    def __post_init__(self) -> None:
        _frozen(self.csr_offsets)
        _frozen(self.csr_neighbors)

    @cached_property
    def degrees(self) -> np.ndarray:
        return _frozen(np.diff(self.csr_offsets))

    @property
    def num_edges(self) -> int:
        return int(self.csr_neighbors.size // 2)

    def neighbors(self, v: int) -> np.ndarray:
        return self.csr_neighbors[self.csr_offsets[v] : self.csr_offsets[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        pos = np.searchsorted(row, v)
        return bool(pos < row.size and row[pos] == v)

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        """0/1 float adjacency over the CSR index arrays (walk counts stay exact below 2**53)."""
        data = np.ones(self.csr_neighbors.size, dtype=np.float64)
        return sparse.csr_matrix(
            (data, self.csr_neighbors, self.csr_offsets), shape=(self.n, self.n)
        )

    @cached_property
    def edge_keys(self) -> np.ndarray:
        """Sorted canonical keys u*n+v (u<v) of every edge."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        mask = rows < self.csr_neighbors
        return _frozen(rows[mask] * np.int64(self.n) + self.csr_neighbors[mask])


@dataclass(frozen=True)
class FeatureMatrix:
    n: int
    d: int
    rows: np.ndarray

    def __post_init__(self) -> None:
        _frozen(self.rows)


class NegativeMode(StrEnum):
    SHARED = "SHARED"
    PER_POSITIVE = "PER_POSITIVE"


@dataclass(frozen=True)
class NegativeSet:
    mode: NegativeMode
    shared_pairs: Optional[np.ndarray] = None
    per_pos_pairs: Optional[np.ndarray] = None  # (P, k, 2)

    @classmethod
    def shared(cls, pairs) -> "NegativeSet":
        return cls(NegativeMode.SHARED, shared_pairs=_frozen(as_pairs(pairs).copy()))

    @classmethod
    def per_positive(cls, pairs) -> "NegativeSet":
        arr = np.asarray(pairs, dtype=np.int64)
        if arr.size == 0:
            arr = np.zeros((0, 0, 2), dtype=np.int64)
        return cls(NegativeMode.PER_POSITIVE, per_pos_pairs=_frozen(arr.reshape(arr.shape[0], -1, 2)))

    @property
    def flat_pairs(self) -> np.ndarray:
        """All negative pairs in a single (N, 2) array (per-positive rows concatenated)."""
        if self.mode is NegativeMode.SHARED:
            return self.shared_pairs
        return self.per_pos_pairs.reshape(-1, 2)

    @property
    def size(self) -> int:
        return int(self.flat_pairs.shape[0])

    def layout(self, flat_scores: np.ndarray) -> np.ndarray:
        """Shape flat negative scores for ranking: (N,) shared or (P, k) per positive."""
        flat_scores = np.asarray(flat_scores, dtype=np.float64)
        if self.mode is NegativeMode.SHARED:
            return flat_scores
        return flat_scores.reshape(self.per_pos_pairs.shape[0], self.per_pos_pairs.shape[1])


@dataclass(frozen=True)
class EdgeSplit:
    train_pos: np.ndarray
    valid_pos: np.ndarray
    test_pos: np.ndarray
    valid_neg: NegativeSet
    test_neg: NegativeSet

    def evaluation_set(self, name: str) -> tuple[np.ndarray, NegativeSet]:
        if name == "valid":
            return self.valid_pos, self.valid_neg
        if name == "test":
            return self.test_pos, self.test_neg
        raise KeyError(name)


@dataclass(frozen=True)
class LinkDataset:
    graph: Graph
    split: EdgeSplit
    features: Optional[FeatureMatrix] = None
    name: Optional[str] = None
    extras: dict = field(default_factory=dict)

    def all_split_pairs(self) -> dict[str, np.ndarray]:
        """Every scored pair keyed by role, in a fixed order."""
        return {
            "train_pos": self.split.train_pos,
            "valid_pos": self.split.valid_pos,
            "valid_neg": self.split.valid_neg.flat_pairs,
            "test_pos": self.split.test_pos,
            "test_neg": self.split.test_neg.flat_pairs,
        }
