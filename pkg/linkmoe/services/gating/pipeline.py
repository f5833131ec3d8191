"""End-to-end gate pipeline: profile pairs, re-split validation, fit, predict."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.core.rng import Rng
from linkmoe.models.schemas.heuristics import HeuristicConfig
from linkmoe.models.schemas.training import GateMode, GateTrainConfig
from linkmoe.services.evaluation.ranking import RankingReport, evaluate
from linkmoe.services.experts.registry import ExpertRegistry, score_pairs
from linkmoe.services.experts.types import ScoreNormalizer
from linkmoe.services.gating.data import GateInputs, LabeledBatch, RankingBatch
from linkmoe.services.gating.network import GateNetwork, build_gate, gate_forward, moe_logits, uses_features
from linkmoe.services.gating.split import GateSplit, split_validation
from linkmoe.services.gating.standardizer import Standardizer, standardizer_fit
from linkmoe.services.gating.store import GateBundle
from linkmoe.services.gating.trainer import TrainResult, train_gate
from linkmoe.services.graph_store.types import FeatureMatrix, Graph, LinkDataset, NegativeMode, NegativeSet, as_pairs
from linkmoe.services.heuristics.features import batch_pair_features
from linkmoe.services.heuristics.structural import batch_structural
from linkmoe.services.nn import sigmoid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PairBlock:
    """Raw per-pair material: expert scores (P, m) plus optional structural rows and pair features."""

    pairs: np.ndarray
    scores: np.ndarray
    structural: Optional[np.ndarray] = None
    feature: Optional[np.ndarray] = None


def profile_pairs(
    registry: ExpertRegistry,
    g: Graph,
    features: Optional[FeatureMatrix],
    pairs,
    heur_cfg: HeuristicConfig,
    with_struct: bool,
    with_feat: bool,
    threads: Optional[int] = None,
) -> PairBlock:
    pairs = as_pairs(pairs)
    scores = score_pairs(registry, g, features, pairs, heur_cfg, threads).by_pair()
    structural = batch_structural(g, heur_cfg, pairs, threads) if with_struct else None
    feature = batch_pair_features(features, pairs) if with_feat else None
    return PairBlock(pairs, scores, structural, feature)


@dataclass(frozen=True)
class Preprocessor:
    standardizer: Optional[Standardizer] = None
    normalizer: Optional[ScoreNormalizer] = None

    @classmethod
    def fit(cls, blocks: Sequence[PairBlock], normalize: bool) -> "Preprocessor":
        standardizer = None
        if blocks[0].structural is not None:
            standardizer = standardizer_fit(np.concatenate([b.structural for b in blocks]))
        normalizer = ScoreNormalizer.fit(np.concatenate([b.scores for b in blocks])) if normalize else None
        return cls(standardizer, normalizer)

    def inputs(self, block: PairBlock) -> GateInputs:
        structural = block.structural
        if structural is not None and self.standardizer is not None:
            structural = self.standardizer.apply(structural)
        return GateInputs(structural, block.feature)

    def scores(self, block: PairBlock) -> np.ndarray:
        return block.scores if self.normalizer is None else self.normalizer.apply(block.scores)


def _neg_shape(negatives: NegativeSet) -> Optional[Tuple[int, int]]:
    if negatives.mode is NegativeMode.SHARED:
        return None
    return tuple(negatives.per_pos_pairs.shape[:2])


def ranking_batch(prep: Preprocessor, pos: PairBlock, neg: PairBlock, negatives: NegativeSet) -> RankingBatch:
    return RankingBatch(prep.inputs(pos), prep.scores(pos), prep.inputs(neg), prep.scores(neg), _neg_shape(negatives))


@dataclass(frozen=True)
class SplitData:
    """Gate-train pairs as a labeled batch and gate-val pairs ready for ranking."""

    prep: Preprocessor
    train: LabeledBatch
    val: RankingBatch
    gate_train: GateSplit
    gate_val: GateSplit


def prepare_split_data(
    registry: ExpertRegistry,
    dataset: LinkDataset,
    ratio: float,
    seed: int,
    heur_cfg: HeuristicConfig,
    with_struct: bool,
    with_feat: bool,
    normalize: bool = False,
    threads: Optional[int] = None,
) -> SplitData:
    """Re-split validation edges and profile both halves; shared by the gate and the ensembles."""
    gate_train, gate_val = split_validation(dataset.split.valid_pos, dataset.split.valid_neg, ratio, seed)
    profile = lambda pairs: profile_pairs(  # noqa: E731
        registry, dataset.graph, dataset.features, pairs, heur_cfg, with_struct, with_feat, threads
    )
    tr_pos, tr_neg = profile(gate_train.pos), profile(gate_train.neg.flat_pairs)
    va_pos, va_neg = profile(gate_val.pos), profile(gate_val.neg.flat_pairs)
    prep = Preprocessor.fit([tr_pos, tr_neg], normalize)
    train = ranking_batch(prep, tr_pos, tr_neg, gate_train.neg).labeled()
    val = ranking_batch(prep, va_pos, va_neg, gate_val.neg)
    return SplitData(prep, train, val, gate_train, gate_val)


@dataclass(frozen=True)
class FittedMoE:
    bundle: GateBundle
    result: TrainResult
    data: SplitData

    @property
    def gate(self) -> GateNetwork:
        return self.bundle.gate


def feature_dim(dataset: LinkDataset) -> Optional[int]:
    return dataset.features.d if dataset.features is not None and dataset.features.d else None


def fit_link_moe(
    registry: ExpertRegistry,
    dataset: LinkDataset,
    gate_cfg: GateTrainConfig,
    heur_cfg: HeuristicConfig | None = None,
    normalize: bool = False,
    threads: Optional[int] = None,
    data: Optional[SplitData] = None,
) -> FittedMoE:
    """Two-step training, step two: experts are frozen, only the gate learns on re-split validation data.

    ``data`` lets grid searches reuse one profiled re-split across points that share mode and ratio.
    """
    heur_cfg = heur_cfg or HeuristicConfig()
    started = time.perf_counter()
    feat_dim = feature_dim(dataset)
    with_feat = uses_features(gate_cfg.mode, feat_dim)
    if GateMode(gate_cfg.mode) is GateMode.ALL and not with_feat:
        logger.warning("No node features; training the gate without its feature branch", extra={"mode": "all"})
    with_struct = GateMode(gate_cfg.mode) is not GateMode.ONLY_FEAT
    if data is None:
        data = prepare_split_data(
            registry, dataset, gate_cfg.split_ratio, gate_cfg.seed, heur_cfg, with_struct, with_feat, normalize,
            threads,
        )
    rng = Rng(gate_cfg.seed)
    gate = build_gate(gate_cfg.mode, registry.m, gate_cfg, rng.derive("gate-init"), feat_dim if with_feat else None)
    result = train_gate(gate, data.train, data.val, gate_cfg, rng.derive("gate-train"))
    sidecar = {
        "experts": registry.names,
        "expert_declarations": registry.declarations,
        "gate": gate_cfg.model_dump(mode="json"),
        "heuristics": heur_cfg.model_dump(mode="json"),
        "best_epoch": result.best_epoch,
        "best_val_mrr": result.best_val_mrr,
    }
    bundle = GateBundle(result.model, data.prep.standardizer, data.prep.normalizer, sidecar)
    logger.info(f"Fitted Link-MoE over {registry.m} experts in {time.perf_counter() - started:.2f}s")
    return FittedMoE(bundle, result, data)


def gate_inputs_for(
    gate: GateNetwork,
    g: Graph,
    features: Optional[FeatureMatrix],
    standardizer: Optional[Standardizer],
    pairs,
    heur_cfg: HeuristicConfig | None = None,
    threads: Optional[int] = None,
) -> GateInputs:
    heur_cfg = heur_cfg or HeuristicConfig()
    structural = feature = None
    if gate.struct_branch is not None:
        structural = batch_structural(g, heur_cfg, pairs, threads)
        if standardizer is not None:
            structural = standardizer.apply(structural)
    if gate.feat_branch is not None:
        if features is None or features.d == 0:
            raise LinkMoeError(ErrorCode.MODE_INPUT_MISMATCH, "gate was trained with node features")
        feature = batch_pair_features(features, pairs)
    return GateInputs(structural, feature)


def predict_pairs(
    gate: GateNetwork,
    registry: ExpertRegistry,
    g: Graph,
    features: Optional[FeatureMatrix],
    standardizer: Optional[Standardizer],
    pairs,
    heur_cfg: HeuristicConfig | None = None,
    normalizer: Optional[ScoreNormalizer] = None,
    threads: Optional[int] = None,
    as_logits: bool = False,
) -> np.ndarray:
    """heuristics -> standardize -> gate -> mix -> sigmoid, in input pair order."""
    pairs = as_pairs(pairs)
    if pairs.shape[0] == 0:
        return np.zeros(0, dtype=np.float64)
    heur_cfg = heur_cfg or HeuristicConfig()
    scores = score_pairs(registry, g, features, pairs, heur_cfg, threads).by_pair()
    if normalizer is not None:
        scores = normalizer.apply(scores)
    inputs = gate_inputs_for(gate, g, features, standardizer, pairs, heur_cfg, threads)
    logits = moe_logits(gate_forward(gate, inputs), scores)
    return logits if as_logits else sigmoid(logits)


def predict_bundle(bundle: GateBundle, registry: ExpertRegistry, dataset: LinkDataset, pairs, heur_cfg=None,
                   threads: Optional[int] = None, as_logits: bool = False) -> np.ndarray:
    return predict_pairs(
        bundle.gate, registry, dataset.graph, dataset.features, bundle.standardizer, pairs,
        heur_cfg, bundle.normalizer, threads, as_logits,
    )


def score_evaluation_set(
    bundle: GateBundle,
    registry: ExpertRegistry,
    dataset: LinkDataset,
    name: str = "test",
    heur_cfg: HeuristicConfig | None = None,
    threads: Optional[int] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Mixture logits for a split's positives and its laid-out negatives."""
    pos, negatives = dataset.split.evaluation_set(name)
    pos_logits = predict_bundle(bundle, registry, dataset, pos, heur_cfg, threads, as_logits=True)
    neg_logits = predict_bundle(bundle, registry, dataset, negatives.flat_pairs, heur_cfg, threads, as_logits=True)
    return pos_logits, negatives.layout(neg_logits)


def evaluate_link_moe(
    bundle: GateBundle,
    registry: ExpertRegistry,
    dataset: LinkDataset,
    ks: Sequence[int],
    name: str = "test",
    heur_cfg: HeuristicConfig | None = None,
    threads: Optional[int] = None,
) -> RankingReport:
    return evaluate(*score_evaluation_set(bundle, registry, dataset, name, heur_cfg, threads), ks=ks)
