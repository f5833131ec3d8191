import argparse

from linkmoe import __version__
from linkmoe.cli.commands import (
    analyze,
    ensemble,
    evaluate,
    export_scores,
    heuristics,
    predict,
    train_expert_mlp,
    train_gate,
)

COMMANDS = (heuristics, export_scores, train_expert_mlp, train_gate, ensemble, predict, evaluate, analyze)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linkmoe", description="Mixture-of-experts link prediction toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser
