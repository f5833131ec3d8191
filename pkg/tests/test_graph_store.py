import numpy as np
import pytest

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.services.graph_store import (
    NegativeMode,
    NegativeSet,
    build_graph,
    degree,
    graph_to_pairs,
    load_dataset,
    load_edge_list,
    load_features,
    load_split,
    write_edge_list,
)
from tests.conftest import G1_EDGES, write_split


def test_build_graph_collapses_duplicates():
    g = build_graph([(0, 1), (1, 0)], 2)
    assert degree(g, 0) == 1 and degree(g, 1) == 1
    assert g.num_edges == 1


def test_reference_graph_degrees(g1):
    assert g1.degrees.tolist() == [2, 3, 3, 2]
    assert degree(g1, 1) == 3
    assert degree(g1, 0) == 2
    assert sorted(map(tuple, graph_to_pairs(g1).tolist())) == sorted(G1_EDGES)


def test_empty_graph_keeps_isolated_nodes():
    g = build_graph([], 3)
    assert g.n == 3
    assert g.degrees.tolist() == [0, 0, 0]


def test_neighbors_sorted_and_symmetric(g1):
    for v in range(g1.n):
        row = g1.neighbors(v)
        assert np.all(np.diff(row) > 0)
        for u in row:
            assert g1.has_edge(int(u), v)


def test_build_graph_rejects_self_loop_and_range():
    with pytest.raises(LinkMoeError) as exc:
        build_graph([(0, 1), (2, 2)], 3)
    assert exc.value.code is ErrorCode.SELF_LOOP
    with pytest.raises(LinkMoeError) as exc:
        build_graph([(0, 5)], 3)
    assert exc.value.code is ErrorCode.NODE_OUT_OF_RANGE


def test_degree_out_of_range(g1):
    with pytest.raises(LinkMoeError) as exc:
        degree(g1, 4)
    assert exc.value.code is ErrorCode.NODE_OUT_OF_RANGE


def test_load_edge_list(tmp_path):
    path = tmp_path / "edges.txt"
    path.write_text("0 1\n1 2\n")
    assert load_edge_list(path).tolist() == [[0, 1], [1, 2]]


def test_load_edge_list_empty_and_comments(tmp_path):
    path = tmp_path / "edges.txt"
    path.write_text("")
    assert load_edge_list(path).shape == (0, 2)
    path.write_text("# header\n\n3 4\n")
    assert load_edge_list(path).tolist() == [[3, 4]]


def test_load_edge_list_self_loop_names_line(tmp_path):
    path = tmp_path / "edges.txt"
    path.write_text("0 0\n")
    with pytest.raises(LinkMoeError) as exc:
        load_edge_list(path)
    assert exc.value.code is ErrorCode.SELF_LOOP
    assert exc.value.context["line_no"] == 1


def test_load_edge_list_malformed(tmp_path):
    path = tmp_path / "edges.txt"
    path.write_text("0 1\n1 x\n")
    with pytest.raises(LinkMoeError) as exc:
        load_edge_list(path)
    assert exc.value.code is ErrorCode.MALFORMED_LINE
    assert exc.value.context["line_no"] == 2


def test_write_then_load_edge_list(tmp_path):
    path = tmp_path / "edges.txt"
    write_edge_list(path, G1_EDGES)
    assert [tuple(p) for p in load_edge_list(path).tolist()] == G1_EDGES


def test_load_features(tmp_path):
    path = tmp_path / "x.txt"
    path.write_text("1 0\n0 1\n")
    f = load_features(path, 2)
    assert (f.n, f.d) == (2, 2)
    np.testing.assert_array_equal(f.rows, np.eye(2))


def test_load_features_row_count_mismatch(tmp_path):
    path = tmp_path / "x.txt"
    path.write_text("1 0\n0 1\n1 1\n")
    with pytest.raises(LinkMoeError) as exc:
        load_features(path, 2)
    assert exc.value.code is ErrorCode.ROW_COUNT_MISMATCH


def test_load_features_non_finite(tmp_path):
    path = tmp_path / "x.txt"
    path.write_text("1 nan\n0 1\n")
    with pytest.raises(LinkMoeError) as exc:
        load_features(path, 2)
    assert exc.value.code is ErrorCode.NON_FINITE_VALUE


def test_load_features_ragged(tmp_path):
    path = tmp_path / "x.txt"
    path.write_text("1 0\n0 1 2\n")
    with pytest.raises(LinkMoeError) as exc:
        load_features(path, 2)
    assert exc.value.code in (ErrorCode.RAGGED_ROW, ErrorCode.MALFORMED_LINE)


def test_load_split_minimal_shared(tmp_path):
    root = write_split(tmp_path / "s", 4, G1_EDGES, [(0, 3)], NegativeSet.shared([(0, 1), (1, 2)]),
                       [(0, 3)], NegativeSet.shared([(1, 3), (2, 3)]))
    split = load_split(root)
    assert split.test_neg.mode is NegativeMode.SHARED
    assert split.test_neg.size == 2
    assert split.train_pos.shape == (5, 2)


def test_load_split_per_positive(tmp_path):
    root = write_split(tmp_path / "s", 4, G1_EDGES, [(0, 3)], NegativeSet.per_positive([[[0, 1], [1, 2]]]),
                       [(0, 3)], NegativeSet.shared([(1, 3)]))
    split = load_split(root)
    assert split.valid_neg.mode is NegativeMode.PER_POSITIVE
    assert split.valid_neg.per_pos_pairs.shape == (1, 2, 2)
    assert split.valid_neg.layout(np.array([0.1, 0.2])).shape == (1, 2)


def test_load_split_per_positive_count_mismatch(tmp_path):
    root = write_split(tmp_path / "s", 4, G1_EDGES, [(0, 3), (1, 3)], NegativeSet.per_positive([[[0, 1]]]),
                       [(0, 3)], NegativeSet.shared([(1, 3)]))
    with pytest.raises(LinkMoeError) as exc:
        load_split(root)
    assert exc.value.code is ErrorCode.NEG_COUNT_MISMATCH


def test_load_split_missing_file(small_split_dir):
    (small_split_dir / "valid.txt").unlink()
    with pytest.raises(LinkMoeError) as exc:
        load_split(small_split_dir)
    assert exc.value.code is ErrorCode.MISSING_FILE
    assert exc.value.context["name"] == "valid.txt"


def test_load_split_node_beyond_header(tmp_path):
    root = write_split(tmp_path / "s", 4, G1_EDGES, [(0, 7)], NegativeSet.shared([(0, 1)]),
                       [(0, 3)], NegativeSet.shared([(1, 3)]))
    with pytest.raises(LinkMoeError) as exc:
        load_split(root)
    assert exc.value.code is ErrorCode.NODE_OUT_OF_RANGE


def test_load_dataset_graph_holds_training_edges_only(small_split_dir):
    ds = load_dataset(small_split_dir)
    assert ds.graph.n == 6
    assert ds.graph.num_edges == 6
    assert not ds.graph.has_edge(2, 5)
    with_valid = load_dataset(small_split_dir, include_valid_in_graph=True)
    assert with_valid.graph.has_edge(2, 5)
