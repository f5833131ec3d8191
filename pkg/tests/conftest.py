import numpy as np
import pytest

from linkmoe.models.schemas.training import GateTrainConfig
from linkmoe.services.datasets import FEAT_EXPERT, STRUCT_EXPERT, generate_planted_dataset, write_dataset
from linkmoe.services.experts import register_experts
from linkmoe.services.gating import fit_link_moe
from linkmoe.services.graph_store import (
    NegativeSet,
    build_graph,
    write_edge_list,
    write_graph_header,
    write_negative_set,
)

# reference graph: 4 nodes, degrees [2, 3, 3, 2]
G1_EDGES = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]


@pytest.fixture
def g1():
    return build_graph(G1_EDGES, 4)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def write_split(root, n, train, valid, valid_neg, test, test_neg):
    root.mkdir(parents=True, exist_ok=True)
    write_graph_header(root / "graph.txt", n)
    write_edge_list(root / "train.txt", train)
    write_edge_list(root / "valid.txt", valid)
    write_negative_set(root / "valid_neg.txt", valid_neg)
    write_edge_list(root / "test.txt", test)
    write_negative_set(root / "test_neg.txt", test_neg)
    return root


@pytest.fixture
def small_split_dir(tmp_path):
    """G1 plus a pendant node 4 and an isolated node 5.

    Test CN scores: positives (0,3)=2, (1,4)=1; shared negatives (0,4)=0, (2,4)=1, (0,5)=0.
    """
    return write_split(
        tmp_path / "small",
        n=6,
        train=G1_EDGES + [(3, 4)],
        valid=[(2, 5)],
        valid_neg=NegativeSet.shared([(0, 5), (1, 5)]),
        test=[(0, 3), (1, 4)],
        test_neg=NegativeSet.shared([(0, 4), (2, 4), (0, 5)]),
    )


@pytest.fixture(scope="session")
def planted():
    return generate_planted_dataset(seed=7)


@pytest.fixture(scope="session")
def planted_dir(planted, tmp_path_factory):
    root = tmp_path_factory.mktemp("planted")
    write_dataset(root, planted)
    return root


@pytest.fixture(scope="session")
def planted_registry(planted_dir):
    return register_experts([
        f"external:{STRUCT_EXPERT}={planted_dir / (STRUCT_EXPERT + '.scores')}",
        f"external:{FEAT_EXPERT}={planted_dir / (FEAT_EXPERT + '.scores')}",
    ])


@pytest.fixture(scope="session")
def planted_cfg():
    return GateTrainConfig(lr=0.01, hidden_dim=16, layers=2, max_epochs=200, patience=200, seed=0)


@pytest.fixture(scope="session")
def planted_moe(planted, planted_registry, planted_cfg):
    return fit_link_moe(planted_registry, planted.dataset, planted_cfg)
