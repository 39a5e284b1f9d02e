import math

import numpy as np

from potentials.application.graph_core import param_rate_graph, rate_graph
from potentials.domain.graph import ParamRateGraph, RateGraph


def two_state(p: float = 2.0, q: float = 1.0) -> RateGraph:
    """States a, b with k(a, b) = p and k(b, a) = q"""
    return rate_graph(("a", "b"), [("a", "b", p), ("b", "a", q)])


def directed_ring(n: int = 3, rate: float = 1.0) -> RateGraph:
    states = tuple(str(i) for i in range(1, n + 1))
    arcs = [(states[i], states[(i + 1) % n], rate) for i in range(n)]
    return rate_graph(states, arcs)


def complete_graph(n: int, rate: float = 1.0) -> RateGraph:
    states = tuple(str(i) for i in range(1, n + 1))
    arcs = [(x, y, rate) for x in states for y in states if x != y]
    return rate_graph(states, arcs)


def random_irreducible_graph(
    rng: np.random.Generator,
    n: int,
    *,
    density: float = 0.25,
    low: float = 0.1,
    high: float = 10.0,
) -> RateGraph:
    """Directed ring through a random permutation plus random extra arcs,
    rates log-uniform in [low, high]"""
    states = tuple(f"s{i}" for i in range(n))
    order = rng.permutation(n)
    pairs = {
        (int(order[i]), int(order[(i + 1) % n])) for i in range(n)
    }
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < density:
                pairs.add((i, j))
    log_low, log_high = math.log(low), math.log(high)
    arcs = [
        (states[i], states[j], float(math.exp(rng.uniform(log_low, log_high))))
        for i, j in sorted(pairs)
    ]
    return rate_graph(states, arcs)


def barrier_tree_graph() -> ParamRateGraph:
    """Three states whose zero-barrier arcs form a spanning in-tree to 'c';
    every other arc has barrier 1"""
    return param_rate_graph(
        ("a", "b", "c"),
        [
            ("a", "b", 1.0, 0.0),
            ("b", "c", 2.0, 0.0),
            ("c", "a", 1.0, 1.0),
            ("b", "a", 3.0, 1.0),
            ("c", "b", 1.5, 1.0),
        ],
    )
