"""`heuristics`: the 8-column structural table for every split pair."""
from __future__ import annotations

import argparse
import logging

import numpy as np
import pandas as pd

from linkmoe.cli.commands.common import add_data_args, load_run_dataset
from linkmoe.cli.middleware.run_context import RunContext
from linkmoe.models.schemas.run import RunConfig
from linkmoe.services.heuristics.structural import STRUCTURAL_COLUMNS, batch_structural
from linkmoe.utils.helpers.file_utils import write_json

logger = logging.getLogger(__name__)

NAME = "heuristics"


def register(subparsers) -> None:
    p = subparsers.add_parser(NAME, help="write the structural heuristic table for all split pairs")
    add_data_args(p)
    p.set_defaults(handler=run)


def run(args: argparse.Namespace, cfg: RunConfig, ctx: RunContext) -> None:
    with ctx.stage("load"):
        dataset = load_run_dataset(cfg)
    frames = []
    with ctx.stage("heuristics"):
        for role, pairs in dataset.all_split_pairs().items():
            pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
            table = pd.DataFrame(batch_structural(dataset.graph, cfg.heuristics, pairs, cfg.threads),
                                 columns=STRUCTURAL_COLUMNS)
            table.insert(0, "v", pairs[:, 1])
            table.insert(0, "u", pairs[:, 0])
            table.insert(0, "role", role)
            frames.append(table)
    out = pd.concat(frames, ignore_index=True)
    ctx.write_frame("heuristics.csv", out)
    write_json(ctx.path("heuristics.json"), cfg.heuristics.model_dump(mode="json"))
    logger.info(f"Wrote {len(out)} heuristic rows")
