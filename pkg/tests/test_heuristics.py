import numpy as np
import pytest
from scipy.sparse.csgraph import floyd_warshall

from linkmoe.core.errors import ErrorCode, LinkMoeError
from linkmoe.models.schemas.heuristics import HeuristicConfig
from linkmoe.services.graph_store import FeatureMatrix, build_graph
from linkmoe.services.heuristics import (
    UNREACHABLE,
    adamic_adar,
    batch_feature_cosine,
    batch_pair_features,
    batch_structural,
    common_neighbors,
    feature_cosine,
    group_values,
    heuristic_scores,
    katz,
    pair_feature,
    ppr,
    ppr_pair,
    resource_allocation,
    shortest_path,
    sp_score,
    structural_vector,
)


def random_graph(n, p, seed):
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, 1)
    keep = rng.random(iu[0].size) < p
    return build_graph(np.stack([iu[0][keep], iu[1][keep]], axis=1), n)


def dense_ppr(g, src, alpha, iters=2000):
    a = g.adjacency.toarray()
    deg = a.sum(axis=1)
    walk = a / np.where(deg > 0, deg, 1.0)[:, None]
    e = np.zeros(g.n)
    e[src] = 1.0
    x = e.copy()
    for _ in range(iters):
        x = alpha * e + (1.0 - alpha) * walk.T @ x
    return x


def test_common_neighbors(g1):
    assert common_neighbors(g1, 0, 3) == 2
    assert common_neighbors(g1, 3, 0) == 2
    assert common_neighbors(g1, 0, 1) == 1


def test_adamic_adar(g1):
    assert adamic_adar(g1, 0, 3) == pytest.approx(2 / np.log(3), abs=1e-6)
    assert adamic_adar(g1, 1, 2) == pytest.approx(2 / np.log(2), abs=1e-6)


def test_resource_allocation(g1):
    assert resource_allocation(g1, 0, 3) == pytest.approx(2 / 3, abs=1e-6)
    assert resource_allocation(g1, 1, 2) == pytest.approx(1.0)


def test_local_heuristics_on_isolated_node():
    g = build_graph([(0, 1)], 3)
    assert common_neighbors(g, 0, 2) == 0
    assert adamic_adar(g, 0, 2) == 0.0
    assert resource_allocation(g, 0, 2) == 0.0


def test_self_pair_and_out_of_range(g1):
    with pytest.raises(LinkMoeError) as exc:
        common_neighbors(g1, 1, 1)
    assert exc.value.code is ErrorCode.SELF_PAIR
    with pytest.raises(LinkMoeError) as exc:
        katz(g1, 0, 9, 0.05, 3)
    assert exc.value.code is ErrorCode.NODE_OUT_OF_RANGE


def test_shortest_path_reference(g1):
    assert shortest_path(g1, 0, 3, cap=7) == 2
    assert sp_score(2) == 0.5
    assert shortest_path(g1, 0, 1, cap=7) == 1


def test_shortest_path_unreachable_and_cap():
    g = build_graph([(0, 1), (1, 2), (2, 3)], 5)
    assert shortest_path(g, 0, 4, cap=7) is UNREACHABLE
    assert sp_score(UNREACHABLE) == 0.0
    assert shortest_path(g, 0, 3, cap=3) == 3
    assert shortest_path(g, 0, 3, cap=2) is UNREACHABLE


def test_shortest_path_matches_floyd_warshall():
    g = random_graph(40, 0.06, seed=3)
    dist = floyd_warshall(g.adjacency, directed=False, unweighted=True)
    cap = 6
    for i in range(g.n):
        for j in range(i + 1, g.n):
            got = shortest_path(g, i, j, cap)
            expected = dist[i, j]
            if np.isinf(expected) or expected > cap:
                assert got is UNREACHABLE
            else:
                assert got == int(expected)


def test_katz_reference(g1):
    assert katz(g1, 0, 3, beta=0.05, max_len=3) == pytest.approx(0.00525, abs=1e-12)
    assert katz(g1, 0, 1, beta=0.05, max_len=1) == pytest.approx(0.05)


def test_katz_matches_matrix_power():
    g = random_graph(25, 0.15, seed=5)
    a = g.adjacency.toarray()
    beta, max_len = 0.05, 4
    oracle = sum(beta**l * np.linalg.matrix_power(a, l) for l in range(1, max_len + 1))
    for i, j in [(0, 1), (2, 17), (5, 24), (10, 11)]:
        assert katz(g, i, j, beta, max_len) == pytest.approx(oracle[i, j], rel=1e-12, abs=1e-15)


def test_katz_rejects_long_walks(g1):
    with pytest.raises(LinkMoeError) as exc:
        katz(g1, 0, 3, 0.05, 7)
    assert exc.value.code is ErrorCode.INVALID_CONFIG


def test_ppr_matches_power_iteration(g1):
    table = ppr(g1, 0, alpha=0.15, eps=1e-8)
    oracle = dense_ppr(g1, 0, 0.15)
    for v in range(g1.n):
        assert table.get(v, 0.0) == pytest.approx(oracle[v], abs=1e-5)


def test_ppr_pair_symmetric(g1):
    forward = dense_ppr(g1, 0, 0.15)[3] + dense_ppr(g1, 3, 0.15)[0]
    assert ppr_pair(g1, 0, 3, 0.15, 1e-8) == pytest.approx(forward, abs=2e-5)
    assert ppr_pair(g1, 3, 0, 0.15, 1e-8) == ppr_pair(g1, 0, 3, 0.15, 1e-8)


def test_ppr_isolated_source_keeps_mass():
    g = build_graph([(0, 1)], 3)
    assert ppr(g, 2, 0.15, 1e-6) == {2: 1.0}


def test_structural_vector_reference(g1):
    cfg = HeuristicConfig(ppr_eps=1e-8)
    vec = structural_vector(g1, cfg, 0, 3)
    p = dense_ppr(g1, 0, 0.15)[3] + dense_ppr(g1, 3, 0.15)[0]
    expected = [4, 0, 2, 2 / np.log(3), 2 / 3, 0.5, 0.00525, p]
    np.testing.assert_allclose(vec, expected, atol=2e-5)
    np.testing.assert_array_equal(vec, structural_vector(g1, cfg, 3, 0))


def test_batch_structural_independent_of_thread_count():
    g = random_graph(60, 0.08, seed=11)
    rng = np.random.default_rng(0)
    pairs = rng.integers(0, 60, (300, 2))
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    cfg = HeuristicConfig()
    one = batch_structural(g, cfg, pairs, threads=1)
    many = batch_structural(g, cfg, pairs, threads=4)
    np.testing.assert_array_equal(one, many)
    assert one.shape == (pairs.shape[0], 8)
    assert batch_structural(g, cfg, [], threads=2).shape == (0, 8)


def test_feature_cosine_and_pair_feature():
    f = FeatureMatrix(n=3, d=2, rows=np.array([[1.0, 0.0], [1.0, 1.0], [0.0, 0.0]]))
    assert feature_cosine(f, 0, 1) == pytest.approx(1 / np.sqrt(2))
    assert feature_cosine(f, 0, 2) == 0.0
    np.testing.assert_array_equal(batch_pair_features(f, [(0, 1), (1, 0)]), [[1.0, 0.0], [1.0, 0.0]])
    np.testing.assert_array_equal(pair_feature(f, 1, 0), pair_feature(f, 0, 1))
    np.testing.assert_allclose(batch_feature_cosine(f, [(1, 0), (2, 1)]), [1 / np.sqrt(2), 0.0])


def test_heuristic_scores_named(g1):
    np.testing.assert_array_equal(heuristic_scores("cn", g1, None, [(0, 3), (1, 2)]), [2.0, 2.0])
    with pytest.raises(LinkMoeError) as exc:
        heuristic_scores("fcs", g1, None, [(0, 3)])
    assert exc.value.code is ErrorCode.NO_FEATURES
    with pytest.raises(LinkMoeError) as exc:
        heuristic_scores("foo", g1, None, [(0, 3)])
    assert exc.value.code is ErrorCode.UNKNOWN_HEURISTIC


def test_group_values_sp_unreachable_is_cap_plus_one():
    g = build_graph([(0, 1), (1, 2)], 4)
    cfg = HeuristicConfig(sp_cap=5)
    np.testing.assert_array_equal(group_values(g, None, cfg, [(0, 2), (0, 3)], "sp"), [2, 6])


ORACLE_PROBS = (0.05, 0.15, 0.3)


def oracle_graph(seed):
    gen = np.random.default_rng(10_000 + seed)
    n = int(gen.integers(8, 51))
    return random_graph(n, ORACLE_PROBS[seed % len(ORACLE_PROBS)], seed), gen


@pytest.mark.parametrize("seed", range(100))
def test_heuristics_match_brute_force_on_random_graphs(seed):
    g, gen = oracle_graph(seed)
    a = g.adjacency.toarray()
    nbr = [set(np.flatnonzero(a[v]).tolist()) for v in range(g.n)]
    deg = a.sum(axis=1)
    for i in range(g.n):
        for j in range(i + 1, g.n):
            shared = sorted(nbr[i] & nbr[j])
            assert common_neighbors(g, i, j) == len(shared)
            assert adamic_adar(g, i, j) == pytest.approx(sum(1.0 / np.log(deg[k]) for k in shared), rel=1e-12)
            assert resource_allocation(g, i, j) == pytest.approx(sum(1.0 / deg[k] for k in shared), rel=1e-12)

    dist = floyd_warshall(g.adjacency, directed=False, unweighted=True)
    powers = [np.linalg.matrix_power(a, l) for l in range(1, 5)]
    beta = 0.05
    pairs = [tuple(sorted(gen.choice(g.n, size=2, replace=False).tolist())) for _ in range(20)]
    for i, j in pairs:
        got = shortest_path(g, i, j, cap=g.n)
        assert (got is UNREACHABLE) if np.isinf(dist[i, j]) else got == int(dist[i, j])
        for max_len in range(1, 5):
            oracle = sum(beta ** (l + 1) * powers[l][i, j] for l in range(max_len))
            assert katz(g, i, j, beta, max_len) == pytest.approx(oracle, rel=0, abs=1e-10)

    sources = [v for v in gen.permutation(g.n)[:3].tolist() if deg[v] > 0]
    for src in sources:
        table = ppr(g, src, alpha=0.15, eps=1e-6)
        oracle = dense_ppr(g, src, 0.15, iters=300)
        approx = np.array([table.get(v, 0.0) for v in range(g.n)])
        assert np.max(np.abs(approx - oracle)) < 1e-4


def test_adding_a_wedge_edge_raises_common_neighbors_by_one():
    for seed in range(20):
        g, gen = oracle_graph(seed)
        a = g.adjacency.toarray()
        edges = [tuple(e) for e in np.argwhere(np.triu(a, 1))]
        for _ in range(10):
            i, j = gen.choice(g.n, size=2, replace=False).tolist()
            candidates = [k for k in np.flatnonzero(a[j]).tolist() if k != i and not a[i, k]]
            if not candidates:
                continue
            k = candidates[0]
            grown = build_graph(edges + [(k, i)], g.n)
            assert common_neighbors(grown, i, j) == common_neighbors(g, i, j) + 1


def test_katz_never_decreases_with_walk_length():
    for seed in range(20):
        g, gen = oracle_graph(seed)
        for _ in range(5):
            i, j = gen.choice(g.n, size=2, replace=False).tolist()
            values = [katz(g, i, j, 0.05, max_len) for max_len in range(1, 7)]
            assert all(b >= a for a, b in zip(values, values[1:]))
