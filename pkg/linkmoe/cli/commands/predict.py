"""`predict`: Link-MoE probabilities in the expert score-file format."""
from __future__ import annotations

import argparse

from linkmoe.cli.commands.common import add_data_args, add_expert_args, build_registry, load_run_dataset
from linkmoe.cli.commands.export_scores import export_pairs
from linkmoe.cli.commands.sources import heuristics_for_bundle, registry_for_bundle
from linkmoe.cli.middleware.run_context import RunContext
from linkmoe.models.schemas.run import RunConfig
from linkmoe.services.experts import write_score_file
from linkmoe.services.gating import load_gate, predict_bundle

NAME = "predict"


def register(subparsers) -> None:
    p = subparsers.add_parser(NAME, help="score pairs with a trained gate checkpoint")
    add_data_args(p)
    add_expert_args(p)
    p.add_argument("--checkpoint", required=True, help="gate checkpoint written by train-gate")
    p.add_argument("--pairs", default=None, help="pairs to score (default: all valid/test pairs)")
    p.add_argument("--output", default="predictions.scores", help="score file name under the output directory")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace, cfg: RunConfig, ctx: RunContext) -> None:
    with ctx.stage("load"):
        dataset = load_run_dataset(cfg)
        bundle = load_gate(args.checkpoint)
        registry = registry_for_bundle(bundle, build_registry(cfg))
        pairs = export_pairs(dataset, args.pairs)
    with ctx.stage("predict"):
        probs = predict_bundle(bundle, registry, dataset, pairs, heuristics_for_bundle(bundle, cfg.heuristics),
                               cfg.threads)
    write_score_file(ctx.path(args.output), pairs, probs)
