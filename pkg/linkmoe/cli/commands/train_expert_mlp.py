"""`train-expert-mlp`: the feature-only MLP expert."""
from __future__ import annotations

import argparse

from linkmoe.cli.commands.common import add_data_args, add_mlp_args, load_run_dataset
from linkmoe.cli.middleware.run_context import RunContext
from linkmoe.core.rng import Rng
from linkmoe.models.schemas.run import RunConfig
from linkmoe.services.experts import save_feature_mlp, train_feature_mlp_expert

NAME = "train-expert-mlp"


def register(subparsers) -> None:
    p = subparsers.add_parser(NAME, help="train the feature MLP expert on training edges")
    add_data_args(p)
    p.add_argument("--name", default="mlp", help="expert name stored in the checkpoint")
    add_mlp_args(p)
    p.set_defaults(handler=run)


def run(args: argparse.Namespace, cfg: RunConfig, ctx: RunContext) -> None:
    with ctx.stage("load"):
        dataset = load_run_dataset(cfg)
    with ctx.stage("train"):
        expert = train_feature_mlp_expert(
            dataset.features, dataset.split.train_pos, Rng(cfg.seed).derive("feature-mlp"), cfg.mlp, args.name
        )
    sidecar = {"mlp": cfg.mlp.model_dump(mode="json"), "seed": cfg.seed}
    ctx.track(save_feature_mlp(ctx.path("mlp.lmoe"), expert, sidecar))
