"""`ensemble`: Mean-Ensemble and Global-Ensemble baselines."""
from __future__ import annotations

import argparse
import logging

import numpy as np

from linkmoe.cli.commands.common import (
    add_data_args,
    add_ensemble_args,
    add_expert_args,
    build_registry,
    load_run_dataset,
)
from linkmoe.cli.commands.export_scores import export_pairs
from linkmoe.cli.middleware.run_context import RunContext
from linkmoe.core.rng import Rng
from linkmoe.models.schemas.run import RunConfig
from linkmoe.services.ensembles import global_ensemble_logits, mean_ensemble, train_global_ensemble, write_weights
from linkmoe.services.experts import score_pairs, write_score_file
from linkmoe.services.gating import prepare_split_data
from linkmoe.utils.helpers.file_utils import write_json

logger = logging.getLogger(__name__)

NAME = "ensemble"
KINDS = ("mean", "global")


def register(subparsers) -> None:
    p = subparsers.add_parser(NAME, help="mean or globally weighted expert ensembles")
    add_data_args(p)
    add_expert_args(p)
    add_ensemble_args(p)
    p.add_argument("--kind", choices=KINDS, default="mean")
    p.add_argument("--split-ratio", dest="split_ratio", type=float, default=None,
                   help="share of validation edges used to fit the global weights")
    p.add_argument("--pairs", default=None, help="pairs to score (default: all valid/test pairs)")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace, cfg: RunConfig, ctx: RunContext) -> None:
    with ctx.stage("load"):
        dataset = load_run_dataset(cfg)
        registry = build_registry(cfg)
        pairs = export_pairs(dataset, args.pairs)
    with ctx.stage("score"):
        by_pair = score_pairs(registry, dataset.graph, dataset.features, pairs, cfg.heuristics, cfg.threads).by_pair()

    if args.kind == "mean":
        write_score_file(ctx.path("mean.scores"), pairs, mean_ensemble(by_pair.T))
        return

    ratio = args.split_ratio if args.split_ratio is not None else cfg.gate.split_ratio
    with ctx.stage("train"):
        data = prepare_split_data(
            registry, dataset, ratio, cfg.seed, cfg.heuristics, with_struct=False, with_feat=False,
            normalize=cfg.normalize_scores, threads=cfg.threads,
        )
        result = train_global_ensemble(data.train, data.val, cfg.ensemble, Rng(cfg.seed).derive("global-ensemble"))
    weights = result.model
    normalizer = data.prep.normalizer
    scores = normalizer.apply(by_pair) if normalizer is not None else by_pair
    write_weights(ctx.path("global_weights.txt"), weights, registry.names)
    write_json(ctx.path("global_weights.json"), {
        "experts": registry.names,
        "score_normalizer": normalizer.to_dict() if normalizer is not None else None,
        "best_epoch": result.best_epoch,
        "best_val_mrr": result.best_val_mrr,
        "split_ratio": ratio,
    })
    ctx.write_frame("global_history.csv", result.history_frame())
    write_score_file(ctx.path("global.scores"), pairs, global_ensemble_logits(weights, scores))
    logger.info(f"Global weights {np.round(weights.w, 6).tolist()} for {registry.names}")
