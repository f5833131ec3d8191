"""`export-scores`: score files for built-in experts, in the external score-file format."""
from __future__ import annotations

import argparse
import logging

import numpy as np

from linkmoe.cli.commands.common import add_data_args, add_expert_args, build_registry, load_run_dataset
from linkmoe.cli.middleware.run_context import RunContext
from linkmoe.models.schemas.run import RunConfig
from linkmoe.services.experts import score_pairs, write_score_file
from linkmoe.services.graph_store.loader import load_edge_list
from linkmoe.services.graph_store.types import canonical_pairs

logger = logging.getLogger(__name__)

NAME = "export-scores"


def register(subparsers) -> None:
    p = subparsers.add_parser(NAME, help="write '<expert>.scores' files for every configured expert")
    add_data_args(p)
    add_expert_args(p)
    p.add_argument("--pairs", default=None, help="edge-list of pairs to score (default: all valid/test pairs)")
    p.set_defaults(handler=run)


def export_pairs(dataset, pairs_path=None) -> np.ndarray:
    """Unique canonical pairs, sorted, so every expert file covers the same rows."""
    if pairs_path:
        pairs = load_edge_list(pairs_path)
    else:
        s = dataset.split
        pairs = np.concatenate(
            [s.valid_pos, s.valid_neg.flat_pairs, s.test_pos, s.test_neg.flat_pairs]
        ).reshape(-1, 2)
    return np.unique(canonical_pairs(pairs), axis=0) if pairs.size else pairs.reshape(0, 2)


def run(args: argparse.Namespace, cfg: RunConfig, ctx: RunContext) -> None:
    with ctx.stage("load"):
        dataset = load_run_dataset(cfg)
        registry = build_registry(cfg)
        pairs = export_pairs(dataset, args.pairs)
    with ctx.stage("score"):
        matrix = score_pairs(registry, dataset.graph, dataset.features, pairs, cfg.heuristics, cfg.threads)
    for name in matrix.names:
        write_score_file(ctx.path(f"{name}.scores"), pairs, matrix.row(name))
    logger.info(f"Exported {matrix.m} experts over {pairs.shape[0]} pairs")
