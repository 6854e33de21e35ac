import numpy as np
import pytest

from trustsim.graph import (
    FormationConfig,
    erdos_renyi,
    flatten_adjacency,
    form_network,
    from_json,
    neighbors,
    to_json,
)

from conftest import make_graph


class TestFormNetwork:
    def test_negative_base_gives_empty_graph(self):
        cfg = FormationConfig(rounds=100, theta_base=-1.0, seed=0)
        g = form_network(cfg, 10)
        assert g.edge_count == 0

    def test_large_base_reaches_complete_graph(self):
        # both-side utilities are 10 > 0 regardless, so every proposal forms
        cfg_kwargs = dict(rounds=4 * 3 * 10, theta_base=10.0,
                          theta_homophily=0.0, theta_degree=0.0,
                          theta_distance=0.0)
        complete = 0
        for seed in range(1000):
            g = form_network(FormationConfig(seed=seed, **cfg_kwargs), 4)
            if g.edge_count == 6:
                complete += 1
        assert complete >= 990

    def test_deterministic_given_seed(self):
        cfg = FormationConfig(seed=42)
        g1 = form_network(cfg, 15)
        g2 = form_network(cfg, 15)
        assert np.array_equal(g1.adj, g2.adj)
        assert np.array_equal(g1.attrs, g2.attrs)

    def test_rejects_tiny_n(self):
        with pytest.raises(ValueError):
            form_network(FormationConfig(), 1)

    def test_symmetry_and_zero_diagonal(self):
        for seed in range(20):
            g = form_network(FormationConfig(seed=seed), 15)
            assert np.array_equal(g.adj, g.adj.T)
            assert not np.diag(g.adj).any()

    def test_edge_count_monotone_in_rounds(self):
        # the first k proposals are identical for the same seed
        for seed in range(5):
            g_small = form_network(FormationConfig(seed=seed, rounds=100), 15)
            g_big = form_network(FormationConfig(seed=seed, rounds=400), 15)
            assert np.all(g_big.adj >= g_small.adj)

    def test_default_config_yields_sparse_graphs_with_isolates(self):
        isolates = [len(form_network(FormationConfig(seed=s), 15).isolated_nodes())
                    for s in range(50)]
        assert max(isolates) <= 4
        assert any(k > 0 for k in isolates)


class TestNeighbors:
    def test_path_graph_middle(self, path_graph):
        assert neighbors(path_graph, 1) == {0, 2}

    def test_isolated_node(self):
        g = make_graph(3, [(0, 1)])
        assert neighbors(g, 2) == set()

    def test_complete_graph(self, complete4):
        assert neighbors(complete4, 0) == {1, 2, 3}

    def test_out_of_range_rejected(self, path_graph):
        with pytest.raises(IndexError):
            neighbors(path_graph, 3)


class TestFlattenAdjacency:
    def test_empty_two_nodes(self):
        g = make_graph(2, [])
        assert flatten_adjacency(g).tolist() == [0, 0, 0, 0]

    def test_single_edge(self):
        g = make_graph(2, [(0, 1)])
        assert flatten_adjacency(g).tolist() == [0, 1, 1, 0]

    def test_triangle(self):
        g = make_graph(3, [(0, 1), (1, 2), (0, 2)])
        flat = flatten_adjacency(g)
        assert flat.sum() == 6
        assert all(flat[i * 3 + i] == 0 for i in range(3))


class TestErdosRenyi:
    def test_p_zero_empty(self):
        assert erdos_renyi(15, 0.0, seed=0).edge_count == 0

    def test_p_one_complete(self):
        assert erdos_renyi(15, 1.0, seed=0).edge_count == 105

    def test_mean_edge_count(self):
        counts = [erdos_renyi(15, 0.2, seed=s).edge_count for s in range(1000)]
        # Binomial(105, 0.2): mean 21, per-graph sd ~4.1
        se = np.sqrt(105 * 0.2 * 0.8 / 1000)
        assert abs(np.mean(counts) - 21) < 3 * se

    def test_invalid_p_rejected(self):
        with pytest.raises(ValueError):
            erdos_renyi(15, 1.2, seed=0)
        with pytest.raises(ValueError):
            erdos_renyi(15, -0.1, seed=0)


def test_json_round_trip():
    g = form_network(FormationConfig(seed=9), 15)
    g2 = from_json(to_json(g))
    assert np.array_equal(g.adj, g2.adj)
    assert np.allclose(g.attrs, g2.attrs)
