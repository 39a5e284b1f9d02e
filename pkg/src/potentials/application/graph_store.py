from abc import abstractmethod
from typing import Protocol

from potentials.domain.graph import ParamRateGraph, RateGraph, ScalarField


class GraphStore(Protocol):
    """Abstract source of rate graphs and scalar fields"""

    @abstractmethod
    def read_graph(self, path: str) -> RateGraph | ParamRateGraph:
        """Load a plain or parameterized rate graph"""
        raise NotImplementedError

    @abstractmethod
    def read_field(self, path: str, states: tuple[str, ...]) -> ScalarField:
        """Load a scalar field aligned to ``states``"""
        raise NotImplementedError
