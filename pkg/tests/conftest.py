from collections.abc import Callable
from pathlib import Path
from typing import Any

import numpy as np
import orjson
import pytest

from potentials.application.reference_graphs import (
    complete_graph,
    directed_ring,
    two_state,
)
from potentials.domain.graph import RateGraph, ScalarField

ABS = 1e-10


@pytest.fixture
def two() -> RateGraph:
    """Two states with k(a, b) = 2, k(b, a) = 1"""
    return two_state()


@pytest.fixture
def ring() -> RateGraph:
    """Directed 3-ring with unit rates"""
    return directed_ring()


@pytest.fixture
def k3() -> RateGraph:
    """Complete digraph on three states with unit rates"""
    return complete_graph(3)


@pytest.fixture
def f_two(two: RateGraph) -> ScalarField:
    """Centered source (2/3, −1/3) on the two-state chain"""
    return ScalarField(two.states, [2 / 3, -1 / 3])


@pytest.fixture
def f_ring(ring: RateGraph) -> ScalarField:
    """Centered source (1, 0, −1) on the 3-ring"""
    return ScalarField(ring.states, [1.0, 0.0, -1.0])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def write_json(tmp_path: Path) -> Callable[[str, Any], str]:
    """Writes a JSON document under tmp_path and returns its path"""

    def write(name: str, document: Any) -> str:
        path = tmp_path / name
        path.write_bytes(orjson.dumps(document))
        return str(path)

    return write


@pytest.fixture
def two_state_file(write_json: Callable[[str, Any], str]) -> str:
    return write_json(
        "twostate.json",
        {
            "states": ["a", "b"],
            "arcs": [
                {"from": "a", "to": "b", "rate": 2},
                {"from": "b", "to": "a", "rate": 1},
            ],
        },
    )


@pytest.fixture
def ring_file(write_json: Callable[[str, Any], str]) -> str:
    return write_json(
        "ring3.json",
        {
            "states": ["1", "2", "3"],
            "arcs": [
                {"from": "1", "to": "2", "rate": 1},
                {"from": "2", "to": "3", "rate": 1},
                {"from": "3", "to": "1", "rate": 1},
            ],
        },
    )


@pytest.fixture
def barrier_file(write_json: Callable[[str, Any], str]) -> str:
    """Zero-barrier arcs a→b→c form a spanning in-tree rooted at c"""
    return write_json(
        "barrier.json",
        {
            "states": ["a", "b", "c"],
            "arcs": [
                {"from": "a", "to": "b", "prefactor": 1, "barrier": 0},
                {"from": "b", "to": "c", "prefactor": 2, "barrier": 0},
                {"from": "c", "to": "a", "prefactor": 1, "barrier": 1},
                {"from": "b", "to": "a", "prefactor": 3, "barrier": 1},
                {"from": "c", "to": "b", "prefactor": 1.5, "barrier": 1},
            ],
        },
    )
