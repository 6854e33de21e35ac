import numpy as np
import pytest

from trustsim.graph import CommunityGraph


def make_graph(n: int, edges: list[tuple[int, int]], attrs=None) -> CommunityGraph:
    adj = np.zeros((n, n), dtype=np.int8)
    for i, j in edges:
        adj[i, j] = adj[j, i] = 1
    if attrs is None:
        attrs = np.full(n, 0.5)
    return CommunityGraph(n=n, adj=adj, attrs=np.asarray(attrs, dtype=np.float64))


@pytest.fixture
def path_graph():
    # 0 - 1 - 2
    return make_graph(3, [(0, 1), (1, 2)])


@pytest.fixture
def complete4():
    return make_graph(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
