"""`analyze`: overlap, per-group, combination-grid, gate-weight and expert-removal analyses."""
from __future__ import annotations

import argparse
import logging
from typing import Dict, List, Tuple

import numpy as np
import pandas as pd

from linkmoe.cli.commands.common import (
    add_data_args,
    add_expert_args,
    add_gate_args,
    add_ks_arg,
    build_registry,
    load_run_dataset,
)
from linkmoe.cli.commands.sources import SourceResolver, heuristics_for_bundle
from linkmoe.cli.middleware.run_context import RunContext
from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.models.schemas.run import RunConfig
from linkmoe.services.evaluation import (
    GroupSpec,
    avg_gate_weights_per_group,
    combination_grid,
    default_group_spec,
    group_breakdown,
    overlap_matrix,
)
from linkmoe.services.gating import expert_removal_study, gate_inputs_for, load_gate
from linkmoe.services.gating.removal import BASELINE
from linkmoe.services.heuristics.scores import GROUP_KEYS, HEURISTIC_NAMES, group_values

logger = logging.getLogger(__name__)

NAME = "analyze"
KINDS = ("overlap", "groups", "grid", "gate-weights", "removal")


def register(subparsers) -> None:
    p = subparsers.add_parser(NAME, help="overlap and breakdown analyses over score sources")
    add_data_args(p)
    add_expert_args(p)
    add_gate_args(p)
    add_ks_arg(p)
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--source", action="append", default=[], help="score source (repeatable)")
    p.add_argument("--k", type=int, default=20, help="K for Hits@K based analyses")
    p.add_argument("--group-key", choices=GROUP_KEYS, default="cn")
    p.add_argument("--checkpoint", default=None, help="gate checkpoint for gate-weights")
    p.add_argument("--heuristic", action="append", default=[], help="heuristic for the combination grid")
    p.add_argument("--split", choices=("valid", "test"), default="test")
    p.set_defaults(handler=run)


def _edges_frame(spec: GroupSpec, counts: np.ndarray) -> pd.DataFrame:
    total = float(counts.sum()) or 1.0
    return pd.DataFrame({
        "bin": spec.labels,
        "lower": spec.bin_edges[:-1],
        "upper": spec.bin_edges[1:],
        "count": counts,
        "proportion": counts / total,
    })


def _resolve_all(resolver: SourceResolver, names: List[str]) -> Dict[str, Tuple[np.ndarray, np.ndarray]]:
    if not names:
        raise LinkMoeError(ErrorCode.UNKNOWN_SOURCE, "no --source given", available=", ".join(resolver.available()))
    return {name: resolver.resolve(name) for name in names}


def _grouping(args, cfg: RunConfig, resolver: SourceResolver) -> Tuple[np.ndarray, GroupSpec]:
    dataset = resolver.dataset
    values = group_values(dataset.graph, dataset.features, cfg.heuristics, resolver.pos, args.group_key)
    return values, default_group_spec(args.group_key, values)


def _overlap(args, cfg, resolver, ctx: RunContext) -> None:
    result = overlap_matrix(_resolve_all(resolver, args.source), args.k)
    ctx.write_frame("overlap.csv", result.to_frame().reset_index(names="method"))
    if result.both_empty.any():
        empty = pd.DataFrame(result.both_empty, index=result.methods, columns=result.methods)
        ctx.write_frame("overlap_empty.csv", empty.reset_index(names="method"))


def _groups(args, cfg, resolver, ctx: RunContext) -> None:
    methods = _resolve_all(resolver, args.source)
    values, spec = _grouping(args, cfg, resolver)
    breakdown = group_breakdown(values, spec, methods, args.k)
    ctx.write_frame("groups.csv", pd.DataFrame(breakdown.rows(), columns=["bin", "proportion", "method", "hits"]))
    ctx.write_frame("group_edges.csv", _edges_frame(spec, breakdown.counts))


def _grid(args, cfg, resolver, ctx: RunContext) -> None:
    names = args.heuristic or [h for h in HEURISTIC_NAMES if h != "fcs" or resolver.dataset.features is not None]
    result = combination_grid({h: resolver.resolve(h) for h in names}, args.k)
    frame = pd.DataFrame(result.matrix, index=result.names, columns=result.names)
    ctx.write_frame("grid.csv", frame.reset_index(names="heuristic"))


def _gate_weights(args, cfg, resolver, ctx: RunContext) -> None:
    if not args.checkpoint:
        raise LinkMoeError(ErrorCode.INVALID_CONFIG, "gate-weights needs --checkpoint")
    bundle = load_gate(args.checkpoint)
    dataset = resolver.dataset
    heur = heuristics_for_bundle(bundle, cfg.heuristics)
    inputs = gate_inputs_for(bundle.gate, dataset.graph, dataset.features, bundle.standardizer, resolver.pos, heur,
                             cfg.threads)
    values, spec = _grouping(args, cfg, resolver)
    table = avg_gate_weights_per_group(bundle.gate, inputs, values, spec, bundle.experts or None)
    columns = ["bin", "count", *table.experts]
    ctx.write_frame("gate_weights.csv", pd.DataFrame(table.rows(), columns=columns))
    ctx.write_frame("group_edges.csv", _edges_frame(spec, table.counts))


def _removal(args, cfg, resolver, ctx: RunContext) -> None:
    reports = expert_removal_study(
        resolver.registry, resolver.dataset, cfg.gate, cfg.ks, cfg.heuristics, cfg.normalize_scores, cfg.threads
    )
    rows = [{"removed": name, **dict(report.as_rows())} for name, report in reports.items()]
    ctx.write_frame("removal.csv", pd.DataFrame(rows))
    logger.info(f"Removal study baseline MRR {reports[BASELINE].mrr:.6f}")


_HANDLERS = {
    "overlap": _overlap,
    "groups": _groups,
    "grid": _grid,
    "gate-weights": _gate_weights,
    "removal": _removal,
}


def run(args: argparse.Namespace, cfg: RunConfig, ctx: RunContext) -> None:
    with ctx.stage("load"):
        dataset = load_run_dataset(cfg)
        resolver = SourceResolver(cfg, dataset, build_registry(cfg), args.split)
    with ctx.stage(args.kind):
        _HANDLERS[args.kind](args, cfg, resolver, ctx)
