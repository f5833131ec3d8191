"""Planted two-regime link prediction fixture.

Evaluation pairs come in two regimes: pairs with at least one common neighbor
and pairs with none. ``struct_expert`` separates positives from negatives only
in the first regime, ``feat_expert`` only in the second; elsewhere each emits
wide zero-mean noise. A gate reading the structural profile can route every
pair to the expert that knows its regime.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Set, Tuple

import numpy as np

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.core.rng import Rng
from linkmoe.services.experts.score_table import write_score_file
from linkmoe.services.graph_store.csr import build_graph
from linkmoe.services.graph_store.loader import (
    HEADER_FILE,
    write_edge_list,
    write_graph_header,
    write_negative_set,
)
from linkmoe.services.graph_store.types import EdgeSplit, FeatureMatrix, Graph, LinkDataset, NegativeSet
from linkmoe.utils.helpers.file_utils import ensure_dir

logger = logging.getLogger(__name__)

STRUCT_EXPERT = "struct_expert"
FEAT_EXPERT = "feat_expert"
FEATURES_FILE = "features.txt"
ROLES = ("valid_pos", "valid_neg", "test_pos", "test_neg")

_MAX_ATTEMPTS = 200_000


@dataclass(frozen=True)
class PlantedDataset:
    dataset: LinkDataset
    # role -> pairs, plus expert -> role -> scores
    pairs: Dict[str, np.ndarray]
    scores: Dict[str, Dict[str, np.ndarray]]
    # role -> True where the pair has a common neighbor
    regime: Dict[str, np.ndarray]

    def expert_table(self, expert: str) -> Tuple[np.ndarray, np.ndarray]:
        return (
            np.concatenate([self.pairs[r] for r in ROLES]),
            np.concatenate([self.scores[expert][r] for r in ROLES]),
        )


class _PairSampler:
    def __init__(self, g: Graph, rng: Rng) -> None:
        self.g = g
        self.rng = rng
        self.used: Set[Tuple[int, int]] = set()
        self.hubs = np.flatnonzero(g.degrees >= 2)

    def _accept(self, u: int, v: int) -> bool:
        key = (min(u, v), max(u, v))
        if u == v or key in self.used or self.g.has_edge(u, v):
            return False
        self.used.add(key)
        return True

    def with_common_neighbor(self) -> Tuple[int, int]:
        for _ in range(_MAX_ATTEMPTS):
            hub = int(self.hubs[self.rng.integers(0, self.hubs.size)])
            u, v = (int(t) for t in self.rng.generator.choice(self.g.neighbors(hub), 2, replace=False))
            if self._accept(u, v):
                return min(u, v), max(u, v)
        raise LinkMoeError(ErrorCode.INVALID_CONFIG, "graph too sparse for common-neighbor pairs")

    def without_common_neighbor(self) -> Tuple[int, int]:
        for _ in range(_MAX_ATTEMPTS):
            u, v = (int(t) for t in self.rng.integers(0, self.g.n, 2))
            if u != v and np.intersect1d(self.g.neighbors(u), self.g.neighbors(v)).size == 0 and self._accept(u, v):
                return min(u, v), max(u, v)
        raise LinkMoeError(ErrorCode.INVALID_CONFIG, "graph too dense for far pairs")

    def draw(self, count: int) -> Tuple[np.ndarray, np.ndarray]:
        near = count // 2
        pairs = [self.with_common_neighbor() for _ in range(near)]
        pairs += [self.without_common_neighbor() for _ in range(count - near)]
        regime = np.arange(count) < near
        order = self.rng.permutation(count)
        return np.asarray(pairs, dtype=np.int64)[order], regime[order]


def _expert_scores(regime: np.ndarray, positive: bool, informative_when: bool, rng: Rng,
                   signal: float, noise: float) -> np.ndarray:
    sign = 1.0 if positive else -1.0
    informed = regime == informative_when
    clean = rng.normal(sign * signal, 1.0, regime.size)
    noisy = rng.normal(0.0, noise, regime.size)
    return np.where(informed, clean, noisy)


def generate_planted_dataset(
    seed: int = 0,
    n: int = 300,
    edge_prob: float = 0.02,
    feat_dim: int = 8,
    valid_pos: int = 200,
    valid_neg: int = 400,
    test_pos: int = 200,
    test_neg: int = 400,
    signal: float = 3.0,
    noise: float = 5.0,
) -> PlantedDataset:
    rng = Rng(seed)
    upper = np.triu_indices(n, 1)
    keep = rng.derive("graph").random(upper[0].size) < edge_prob
    train = np.stack([upper[0][keep], upper[1][keep]], axis=1).astype(np.int64)
    graph = build_graph(train, n)
    features = FeatureMatrix(n=n, d=feat_dim, rows=rng.derive("features").normal(0.0, 1.0, (n, feat_dim)))

    sampler = _PairSampler(graph, rng.derive("pairs"))
    pairs: Dict[str, np.ndarray] = {}
    regime: Dict[str, np.ndarray] = {}
    for role, count in zip(ROLES, (valid_pos, valid_neg, test_pos, test_neg)):
        pairs[role], regime[role] = sampler.draw(count)

    score_rng = rng.derive("scores")
    scores: Dict[str, Dict[str, np.ndarray]] = {STRUCT_EXPERT: {}, FEAT_EXPERT: {}}
    for role in ROLES:
        positive = role.endswith("_pos")
        scores[STRUCT_EXPERT][role] = _expert_scores(regime[role], positive, True, score_rng, signal, noise)
        scores[FEAT_EXPERT][role] = _expert_scores(regime[role], positive, False, score_rng, signal, noise)

    split = EdgeSplit(
        train_pos=train,
        valid_pos=pairs["valid_pos"],
        test_pos=pairs["test_pos"],
        valid_neg=NegativeSet.shared(pairs["valid_neg"]),
        test_neg=NegativeSet.shared(pairs["test_neg"]),
    )
    dataset = LinkDataset(graph=graph, split=split, features=features, name="planted")
    logger.info(f"Planted dataset: n={n}, {graph.num_edges} train edges, seed={seed}")
    return PlantedDataset(dataset=dataset, pairs=pairs, scores=scores, regime=regime)


def write_dataset(out_dir: str | Path, planted: PlantedDataset) -> List[Path]:
    """Write header, split files, features and both expert score files."""
    root = Path(out_dir)
    ensure_dir(root)
    ds = planted.dataset
    written = [root / HEADER_FILE, root / "train.txt", root / "valid.txt", root / "test.txt",
               root / "valid_neg.txt", root / "test_neg.txt", root / FEATURES_FILE]
    write_graph_header(written[0], ds.graph.n)
    write_edge_list(written[1], ds.split.train_pos)
    write_edge_list(written[2], ds.split.valid_pos)
    write_edge_list(written[3], ds.split.test_pos)
    write_negative_set(written[4], ds.split.valid_neg)
    write_negative_set(written[5], ds.split.test_neg)
    np.savetxt(written[6], ds.features.rows, fmt="%.17g")
    for expert in (STRUCT_EXPERT, FEAT_EXPERT):
        target = root / f"{expert}.scores"
        write_score_file(target, *planted.expert_table(expert))
        written.append(target)
    return written
