"""Flags shared by subcommands and the config/dataset/registry plumbing behind them."""
from __future__ import annotations

import argparse
from typing import Any, Dict, Iterable, Optional

from linkmoe.models.schemas.run import RunConfig, parse_config_file
from linkmoe.models.schemas.training import GateMode
from linkmoe.services.experts.registry import ExpertRegistry, register_experts
from linkmoe.services.graph_store.loader import load_dataset
from linkmoe.services.graph_store.types import LinkDataset
from linkmoe.utils.helpers.text_utils import parse_int_list

# argparse dests that map onto RunConfig keys; everything else is command-local
CONFIG_DESTS: set[str] = set()


def _add(parser: argparse.ArgumentParser, flag: str, dest: str, **kwargs: Any) -> None:
    CONFIG_DESTS.add(dest)
    kwargs.setdefault("default", None)
    parser.add_argument(flag, dest=dest, **kwargs)


def add_data_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help="key = value config file; flags override it")
    _add(p, "--split-dir", "split_dir", help="directory with train/valid/test and negative files")
    _add(p, "--graph-header", "graph_header", help="graph header file (default <split-dir>/graph.txt)")
    _add(p, "--features", "features", help="node feature file")
    _add(p, "--dataset", "dataset", help="dataset name, selects the validation re-split ratio")
    _add(p, "--out-dir", "out_dir", help="output directory")
    _add(p, "--seed", "seed", type=int)
    _add(p, "--threads", "threads", type=int, help="worker cap (env LINKMOE_THREADS)")
    _add(p, "--include-valid-in-graph", "include_valid_in_graph", action="store_const", const=True)
    _add(p, "--katz-beta", "katz_beta", type=float)
    _add(p, "--katz-max-len", "katz_max_len", type=int)
    _add(p, "--ppr-alpha", "ppr_alpha", type=float)
    _add(p, "--ppr-eps", "ppr_eps", type=float)
    _add(p, "--sp-cap", "sp_cap", type=int)


def add_expert_args(p: argparse.ArgumentParser) -> None:
    _add(p, "--expert", "experts", action="append",
         help="expert declaration: heuristic name, external:[name=]file or mlp:[name=]checkpoint (repeatable)")
    _add(p, "--normalize-scores", "normalize_scores", action="store_const", const=True,
         help="z-score each expert on gate-train pairs")


def add_gate_args(p: argparse.ArgumentParser) -> None:
    _add(p, "--mode", "mode", choices=[m.value for m in GateMode])
    _add(p, "--split-ratio", "split_ratio", type=float, help="share of validation edges used to train the gate")
    _add(p, "--lr", "lr", type=float)
    _add(p, "--dropout", "dropout", type=float)
    _add(p, "--weight-decay", "weight_decay", type=float)
    _add(p, "--layers", "layers", type=int)
    _add(p, "--hidden-dim", "hidden_dim", type=int)
    _add(p, "--max-epochs", "max_epochs", type=int)
    _add(p, "--patience", "patience", type=int)
    _add(p, "--batch-size", "batch_size", type=int)


def add_mlp_args(p: argparse.ArgumentParser) -> None:
    for key, cast in (("lr", float), ("dropout", float), ("weight_decay", float), ("layers", int),
                      ("hidden_dim", int), ("epochs", int), ("batch_size", int)):
        _add(p, f"--mlp-{key.replace('_', '-')}", f"mlp_{key}", type=cast)


def add_ensemble_args(p: argparse.ArgumentParser) -> None:
    for key, cast in (("lr", float), ("weight_decay", float), ("max_epochs", int), ("patience", int),
                      ("batch_size", int)):
        _add(p, f"--ensemble-{key.replace('_', '-')}", f"ensemble_{key}", type=cast)


def add_ks_arg(p: argparse.ArgumentParser) -> None:
    _add(p, "--ks", "ks", type=parse_int_list, help='comma-separated K values, e.g. "1,3,10,20,50,100"')


def flag_values(args: argparse.Namespace) -> Dict[str, Any]:
    return {dest: getattr(args, dest) for dest in CONFIG_DESTS if hasattr(args, dest)}


def build_run_config(args: argparse.Namespace) -> RunConfig:
    file_values = parse_config_file(args.config) if getattr(args, "config", None) else {}
    return RunConfig.from_sources(file_values, flag_values(args))


def load_run_dataset(cfg: RunConfig) -> LinkDataset:
    cfg.check_paths()
    return load_dataset(cfg.split_dir, cfg.header_path, cfg.features, cfg.include_valid_in_graph, cfg.dataset)


def build_registry(cfg: RunConfig, exclude: Optional[Iterable[str]] = None,
                   fallback: Optional[Iterable[str]] = None) -> ExpertRegistry:
    """Registry from the configured declarations (or ``fallback`` when none are configured)."""
    declarations = cfg.experts or list(fallback or [])
    registry = register_experts(declarations)
    for name in exclude or []:
        registry = registry.without(name)
    return registry
