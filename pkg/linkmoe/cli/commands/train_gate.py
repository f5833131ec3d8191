"""`train-gate`: two-step training of the gate, optionally over a hyperparameter grid."""
from __future__ import annotations

import argparse
import logging
from typing import List

import pandas as pd

from linkmoe.cli.commands.common import (
    add_data_args,
    add_expert_args,
    add_gate_args,
    build_registry,
    load_run_dataset,
)
from linkmoe.cli.middleware.run_context import RunContext
from linkmoe.models.schemas.grid import GRID_KEYS, expand_grid, load_grid
from linkmoe.models.schemas.run import RunConfig
from linkmoe.services.evaluation import mrr
from linkmoe.services.gating import FittedMoE, fit_link_moe, save_gate
from linkmoe.services.gating.pipeline import SplitData

logger = logging.getLogger(__name__)

NAME = "train-gate"


def register(subparsers) -> None:
    p = subparsers.add_parser(NAME, help="train the Link-MoE gate on the re-split validation edges")
    add_data_args(p)
    add_expert_args(p)
    add_gate_args(p)
    p.add_argument("--grid", default=None, help="grid file (key = v1, v2) or preset:<planetoid|pubmed|ogb>")
    p.add_argument("--exclude-expert", action="append", default=[], help="drop an expert before training")
    p.set_defaults(handler=run)


def val_summary(fitted: FittedMoE, names: List[str]) -> pd.DataFrame:
    """Gate-val MRR of the mixture next to every single expert on the same pairs."""
    val = fitted.data.val
    rows = [{"method": "link-moe", "val_mrr": fitted.result.best_val_mrr}]
    for o, name in enumerate(names):
        rows.append({"method": name, "val_mrr": mrr(val.pos_scores[:, o], val.layout(val.neg_scores[:, o]))})
    return pd.DataFrame(rows)


def run(args: argparse.Namespace, cfg: RunConfig, ctx: RunContext) -> None:
    with ctx.stage("load"):
        dataset = load_run_dataset(cfg)
        registry = build_registry(cfg, exclude=args.exclude_expert)
    points = expand_grid(cfg.gate, load_grid(args.grid)) if args.grid else [cfg.gate]
    logger.info(f"Training {len(points)} gate configuration(s) over experts {registry.names}")

    best: FittedMoE | None = None
    data: SplitData | None = None
    summary = []
    with ctx.stage("train"):
        for index, point in enumerate(points):
            fitted = fit_link_moe(
                registry, dataset, point, cfg.heuristics, cfg.normalize_scores, cfg.threads, data=data
            )
            data = fitted.data
            row = {"point": index, **{k: getattr(point, k) for k in GRID_KEYS}}
            row.update(best_epoch=fitted.result.best_epoch, best_val_mrr=fitted.result.best_val_mrr)
            summary.append(row)
            if len(points) > 1:
                ctx.write_frame(f"history_{index:03d}.csv", fitted.result.history_frame())
            if best is None or fitted.result.best_val_mrr > best.result.best_val_mrr:
                best = fitted

    bundle = best.bundle
    ctx.track(save_gate(ctx.path("gate.lmoe"), bundle.gate, bundle.standardizer, bundle.sidecar, bundle.normalizer))
    ctx.write_frame("history.csv", best.result.history_frame())
    ctx.write_frame("val_summary.csv", val_summary(best, registry.names))
    if len(points) > 1:
        frame = pd.DataFrame(summary)
        frame["selected"] = frame["point"] == int(frame["best_val_mrr"].idxmax())
        ctx.write_frame("grid_summary.csv", frame)
    logger.info(
        f"Selected gate: best epoch {best.result.best_epoch}, val MRR {best.result.best_val_mrr:.6f}",
        extra={"points": len(points)},
    )
