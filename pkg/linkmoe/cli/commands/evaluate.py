"""`evaluate`: MRR and Hits@K of one score source on a split."""
from __future__ import annotations

import argparse
import logging

import pandas as pd

from linkmoe.cli.commands.common import add_data_args, add_expert_args, add_ks_arg, build_registry, load_run_dataset
from linkmoe.cli.commands.sources import SourceResolver
from linkmoe.cli.middleware.run_context import RunContext
from linkmoe.models.schemas.run import RunConfig
from linkmoe.services.evaluation import evaluate

logger = logging.getLogger(__name__)

NAME = "evaluate"


def register(subparsers) -> None:
    p = subparsers.add_parser(NAME, help="ranked evaluation of an expert, ensemble or gate")
    add_data_args(p)
    add_expert_args(p)
    add_ks_arg(p)
    p.add_argument("--source", required=True,
                   help="expert or heuristic name, mean, global:<weights>, gate:<checkpoint> or file:<scores>")
    p.add_argument("--split", choices=("valid", "test"), default="test")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace, cfg: RunConfig, ctx: RunContext) -> None:
    with ctx.stage("load"):
        dataset = load_run_dataset(cfg)
        resolver = SourceResolver(cfg, dataset, build_registry(cfg), args.split)
    with ctx.stage("evaluate"):
        report = evaluate(*resolver.resolve(args.source), ks=cfg.ks)
    ctx.write_frame("report.csv", pd.DataFrame(report.as_rows(), columns=["metric", "value"]))
    logger.info(f"{args.source} on {args.split}: MRR {report.mrr:.6f}")
