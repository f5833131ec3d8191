"""CN baselines on public splits; runs only when LINKMOE_DATA_DIR holds converted split dirs."""
import os
from pathlib import Path

import pytest

from linkmoe.services.evaluation import evaluate
from linkmoe.services.experts import register_experts, score_pairs
from linkmoe.services.graph_store import load_dataset

DATA_DIR = os.environ.get("LINKMOE_DATA_DIR")


def split_dir(name):
    if not DATA_DIR or not (Path(DATA_DIR) / name).is_dir():
        pytest.skip(f"{name} split not available")
    return Path(DATA_DIR) / name


def cn_report(ds, ks):
    registry = register_experts(["cn"])
    pos, negatives = ds.split.evaluation_set("test")
    pos_cn = score_pairs(registry, ds.graph, ds.features, pos).scores[0]
    neg_cn = score_pairs(registry, ds.graph, ds.features, negatives.flat_pairs).scores[0]
    return evaluate(pos_cn, negatives.layout(neg_cn), ks=ks)


def test_citeseer_cn_mrr():
    ds = load_dataset(split_dir("citeseer"))
    assert cn_report(ds, (1,)).mrr * 100 == pytest.approx(28.34, abs=0.5)


def test_collab_cn_hits50():
    ds = load_dataset(split_dir("ogbl-collab"), include_valid_in_graph=True)
    assert cn_report(ds, (50,)).hits[50] * 100 == pytest.approx(61.37, abs=0.5)
