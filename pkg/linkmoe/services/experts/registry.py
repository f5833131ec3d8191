"""Expert declarations and the score matrix they produce."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.models.schemas.heuristics import HeuristicConfig
from linkmoe.services.experts.feature_mlp import FeatureMlpExpert, load_feature_mlp
from linkmoe.services.experts.score_table import ScoreTable, load_score_table
from linkmoe.services.experts.types import ExpertId, ExpertKind, ScoreMatrix
from linkmoe.services.graph_store.types import FeatureMatrix, Graph, as_pairs
from linkmoe.services.heuristics.common import check_pairs
from linkmoe.services.heuristics.scores import HEURISTIC_NAMES, heuristic_scores
from linkmoe.workers.pool import ordered_map

logger = logging.getLogger(__name__)

EXTERNAL_PREFIX = "external:"
MLP_PREFIX = "mlp:"


@dataclass
class Expert:
    id: ExpertId
    declaration: str = ""
    source: Optional[Path] = None
    mlp: Optional[FeatureMlpExpert] = None
    _table: Optional[ScoreTable] = field(default=None, repr=False)

    @property
    def name(self) -> str:
        return self.id.name

    def table(self) -> ScoreTable:
        if self._table is None:
            self._table = load_score_table(self.source)
        return self._table

    def score(
        self,
        g: Graph,
        features: Optional[FeatureMatrix],
        pairs: np.ndarray,
        cfg: HeuristicConfig,
        threads: Optional[int] = None,
    ) -> np.ndarray:
        if self.id.kind is ExpertKind.HEURISTIC:
            return heuristic_scores(self.name, g, features, pairs, cfg, threads)
        if self.id.kind is ExpertKind.FEATURE_MLP:
            if features is None or features.d == 0:
                raise LinkMoeError(ErrorCode.NO_FEATURES, expert=self.name)
            if self.mlp is None:
                self.mlp = load_feature_mlp(self.source, self.name)
            return self.mlp.logits(features, pairs)
        scores, found = self.table().lookup(pairs)
        if not found.all():
            u, v = pairs[int(np.flatnonzero(~found)[0])]
            raise LinkMoeError(ErrorCode.MISSING_SCORE, expert=self.name, pair=f"({u},{v})")
        return scores


@dataclass(frozen=True)
class ExpertRegistry:
    experts: Tuple[Expert, ...]

    @property
    def names(self) -> List[str]:
        return [e.name for e in self.experts]

    @property
    def ids(self) -> List[ExpertId]:
        return [e.id for e in self.experts]

    @property
    def declarations(self) -> List[str]:
        return [e.declaration for e in self.experts]

    @property
    def m(self) -> int:
        return len(self.experts)

    def without(self, name: str) -> "ExpertRegistry":
        if name not in self.names:
            raise LinkMoeError(ErrorCode.UNKNOWN_SOURCE, "no such expert", expert=name)
        return ExpertRegistry(tuple(e for e in self.experts if e.name != name))

    def heuristic_only(self) -> bool:
        return all(e.id.kind is ExpertKind.HEURISTIC for e in self.experts)


def _split_named(body: str) -> Tuple[str, str]:
    """``name=path`` or bare ``path`` (name taken from the file stem)."""
    if "=" in body:
        name, path = body.split("=", 1)
        return name.strip(), path.strip()
    return Path(body).stem, body.strip()


def parse_declaration(decl: str) -> Expert:
    text = decl.strip()
    if text.startswith(EXTERNAL_PREFIX):
        name, path = _split_named(text[len(EXTERNAL_PREFIX):])
        return Expert(ExpertId(name, ExpertKind.EXTERNAL), text, source=Path(path))
    if text.startswith(MLP_PREFIX):
        name, path = _split_named(text[len(MLP_PREFIX):])
        return Expert(ExpertId(name, ExpertKind.FEATURE_MLP), text, source=Path(path))
    if text.lower() not in HEURISTIC_NAMES:
        raise LinkMoeError(ErrorCode.UNKNOWN_HEURISTIC, name=text, known=",".join(HEURISTIC_NAMES))
    return Expert(ExpertId(text.lower(), ExpertKind.HEURISTIC), text.lower())


def register_experts(declarations: Iterable[str]) -> ExpertRegistry:
    """Build a registry from declarations such as ``cn``, ``external:ncn=ncn.scores`` or ``mlp:mlp.lmoe``."""
    experts: List[Expert] = []
    seen: Dict[str, str] = {}
    for decl in declarations:
        expert = parse_declaration(decl)
        if expert.name in seen:
            raise LinkMoeError(ErrorCode.DUPLICATE_NAME, expert=expert.name)
        if expert.id.kind is ExpertKind.FEATURE_MLP and any(e.id.kind is ExpertKind.FEATURE_MLP for e in experts):
            raise LinkMoeError(ErrorCode.DUPLICATE_NAME, "at most one feature-MLP expert", expert=expert.name)
        seen[expert.name] = decl
        experts.append(expert)
    logger.info(f"Registered {len(experts)} experts: {', '.join(seen)}")
    return ExpertRegistry(tuple(experts))


def score_pairs(
    registry: ExpertRegistry,
    g: Graph,
    features: Optional[FeatureMatrix],
    pairs,
    cfg: HeuristicConfig | None = None,
    threads: Optional[int] = None,
) -> ScoreMatrix:
    """Score every pair with every expert; one row per expert in registry order."""
    if registry.m == 0:
        raise LinkMoeError(ErrorCode.EMPTY_REGISTRY)
    cfg = cfg or HeuristicConfig()
    pairs = as_pairs(pairs)
    check_pairs(g.n, pairs)
    # experts run in turn; each heuristic parallelizes over pair chunks itself
    rows = ordered_map(lambda e: e.score(g, features, pairs, cfg, threads), list(registry.experts), threads=1)
    scores = np.vstack(rows) if pairs.shape[0] else np.zeros((registry.m, 0))
    return ScoreMatrix(expert_ids=registry.ids, pairs=pairs, scores=scores)
