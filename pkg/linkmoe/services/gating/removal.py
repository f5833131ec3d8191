from __future__ import annotations

import logging
from typing import Dict, Optional, Sequence

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.models.schemas.heuristics import HeuristicConfig
from linkmoe.models.schemas.training import GateTrainConfig
from linkmoe.services.evaluation.ranking import RankingReport
from linkmoe.services.experts.registry import ExpertRegistry
from linkmoe.services.gating.pipeline import evaluate_link_moe, fit_link_moe
from linkmoe.services.graph_store.types import LinkDataset

logger = logging.getLogger(__name__)

BASELINE = "none"


def expert_removal_study(
    registry: ExpertRegistry,
    dataset: LinkDataset,
    gate_cfg: GateTrainConfig,
    ks: Sequence[int],
    heur_cfg: HeuristicConfig | None = None,
    normalize: bool = False,
    threads: Optional[int] = None,
) -> Dict[str, RankingReport]:
    """Test reports keyed by the removed expert; the gate is retrained on each reduced registry."""
    if registry.m < 2:
        raise LinkMoeError(ErrorCode.EMPTY_REGISTRY, "removal study needs at least two experts", m=registry.m)
    reports: Dict[str, RankingReport] = {}
    for removed in [BASELINE] + registry.names:
        subset = registry if removed == BASELINE else registry.without(removed)
        fitted = fit_link_moe(subset, dataset, gate_cfg, heur_cfg, normalize, threads)
        reports[removed] = evaluate_link_moe(fitted.bundle, subset, dataset, ks, "test", heur_cfg, threads)
        logger.info(f"Removal study: without {removed} -> test MRR {reports[removed].mrr:.6f}")
    return reports
