"""Random small attributed graphs for property tests."""

import numpy as np

from gnan.em import init_params
from gnan.model import attributes_from_dense, build_graph


def random_instance(rng, n=None, c=None, k=None, directed=None):
    n = int(rng.integers(10, 51)) if n is None else n
    c = int(rng.integers(1, 5)) if c is None else c
    k = int(rng.integers(0, 21)) if k is None else k
    directed = bool(rng.integers(2)) if directed is None else directed
    a = rng.random((n, n)) < rng.uniform(0.03, 0.3)
    a[0, 1 % n] = True      # at least one edge
    graph = build_graph(n, np.argwhere(a), directed=directed)
    x = (rng.random((n, k)) < rng.uniform(0.05, 0.5)) * rng.integers(1, 3, (n, k))
    attrs = attributes_from_dense(x)
    params = init_params(n, c, k, 0.45, rng)
    return graph, attrs, params
