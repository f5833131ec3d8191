"""Named score sources for evaluation and analysis."""
from __future__ import annotations

from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import orjson

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.models.schemas.heuristics import HeuristicConfig
from linkmoe.models.schemas.run import RunConfig
from linkmoe.services.ensembles import global_ensemble_logits, load_weights, mean_ensemble
from linkmoe.services.experts import ExpertRegistry, ScoreNormalizer, load_score_table, register_experts, score_pairs
from linkmoe.services.gating import GateBundle, load_gate, score_evaluation_set
from linkmoe.services.graph_store.types import LinkDataset
from linkmoe.services.heuristics.scores import HEURISTIC_NAMES, heuristic_scores

PREFIXED = ("global:<weights file>", "gate:<checkpoint>", "file:<score file>")

Scores = Tuple[np.ndarray, np.ndarray]


def _check_experts(expected: List[str], registry: ExpertRegistry, what: str) -> None:
    if expected and expected != registry.names:
        raise LinkMoeError(
            ErrorCode.INVALID_CONFIG, f"{what} was trained on other experts",
            expected=",".join(expected), configured=",".join(registry.names),
        )


def registry_for_bundle(bundle: GateBundle, registry: ExpertRegistry) -> ExpertRegistry:
    """Configured registry, or the one recorded in the checkpoint when none is configured."""
    if registry.m == 0 and bundle.sidecar.get("expert_declarations"):
        registry = register_experts(bundle.sidecar["expert_declarations"])
    _check_experts(bundle.experts, registry, "gate checkpoint")
    return registry


def heuristics_for_bundle(bundle: GateBundle, fallback: HeuristicConfig) -> HeuristicConfig:
    recorded = bundle.sidecar.get("heuristics")
    return HeuristicConfig(**recorded) if recorded else fallback


class SourceResolver:
    """Resolves a source name to (positive scores, laid-out negative scores) on one split."""

    def __init__(self, cfg: RunConfig, dataset: LinkDataset, registry: ExpertRegistry, split: str = "test") -> None:
        self.cfg = cfg
        self.dataset = dataset
        self.registry = registry
        self.split = split
        self.pos, self.negatives = dataset.split.evaluation_set(split)
        self._rows: Optional[Scores] = None
        self._cache: Dict[str, Scores] = {}

    def available(self) -> List[str]:
        names = list(self.registry.names)
        names += [h for h in HEURISTIC_NAMES if h not in names]
        return names + ["mean", *PREFIXED]

    def _expert_rows(self) -> Scores:
        if self._rows is None:
            g, f = self.dataset.graph, self.dataset.features
            pos = score_pairs(self.registry, g, f, self.pos, self.cfg.heuristics, self.cfg.threads).scores
            neg = score_pairs(self.registry, g, f, self.negatives.flat_pairs, self.cfg.heuristics, self.cfg.threads)
            self._rows = (pos, neg.scores)
        return self._rows

    def _layout(self, pos: np.ndarray, neg_flat: np.ndarray) -> Scores:
        return np.asarray(pos, dtype=np.float64), self.negatives.layout(neg_flat)

    def resolve(self, name: str) -> Scores:
        if name not in self._cache:
            self._cache[name] = self._resolve(name)
        return self._cache[name]

    def _resolve(self, name: str) -> Scores:
        g, f = self.dataset.graph, self.dataset.features
        if name in self.registry.names:
            o = self.registry.names.index(name)
            pos, neg = self._expert_rows()
            return self._layout(pos[o], neg[o])
        if name in HEURISTIC_NAMES:
            h = self.cfg.heuristics
            return self._layout(
                heuristic_scores(name, g, f, self.pos, h, self.cfg.threads),
                heuristic_scores(name, g, f, self.negatives.flat_pairs, h, self.cfg.threads),
            )
        if name == "mean":
            pos, neg = self._expert_rows()
            return self._layout(mean_ensemble(pos), mean_ensemble(neg))
        kind, _, path = name.partition(":")
        if path and kind == "global":
            return self._global(Path(path))
        if path and kind == "gate":
            bundle = load_gate(path)
            registry = registry_for_bundle(bundle, self.registry)
            heur = heuristics_for_bundle(bundle, self.cfg.heuristics)
            return score_evaluation_set(bundle, registry, self.dataset, self.split, heur, self.cfg.threads)
        if path and kind == "file":
            return self._file(Path(path))
        raise LinkMoeError(ErrorCode.UNKNOWN_SOURCE, source=name, available=", ".join(self.available()))

    def _global(self, path: Path) -> Scores:
        names, weights = load_weights(path)
        _check_experts(names, self.registry, "global weights")
        pos, neg = self._expert_rows()
        pos, neg = pos.T, neg.T
        sidecar = path.with_suffix(".json")
        if sidecar.is_file():
            norm = orjson.loads(sidecar.read_bytes()).get("score_normalizer")
            if norm:
                normalizer = ScoreNormalizer.from_dict(norm)
                pos, neg = normalizer.apply(pos), normalizer.apply(neg)
        return self._layout(global_ensemble_logits(weights, pos), global_ensemble_logits(weights, neg))

    def _file(self, path: Path) -> Scores:
        table = load_score_table(path)
        out = []
        for pairs in (self.pos, self.negatives.flat_pairs):
            scores, found = table.lookup(pairs)
            if not found.all():
                u, v = pairs[int(np.flatnonzero(~found)[0])]
                raise LinkMoeError(ErrorCode.MISSING_SCORE, expert=path.name, pair=f"({u},{v})")
            out.append(scores)
        return self._layout(*out)
