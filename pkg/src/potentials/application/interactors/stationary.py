import logging
from dataclasses import dataclass

import numpy as np

from potentials.application.forest_engine import (
    enumerate_in_trees,
    kirchhoff_balance_residual,
    tree_weight_vector,
    uses_enumeration,
)
from potentials.application.graph_core import generator
from potentials.application.graph_store import GraphStore
from potentials.application.interactors.graphs import (
    Vector,
    as_vector,
    load_rate_graph,
    relative_difference,
)
from potentials.application.settings import DumpSettings, EngineSettings
from potentials.application.sinks import ForestSink
from potentials.application.spectral_algebra import stationary_distribution

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True, kw_only=True)
class StationaryRequest:
    graph_path: str
    lam: float | None = None


@dataclass(frozen=True, slots=True)
class StationaryResult:
    """ρ by the Kirchhoff tree formula and by the null-space solve.

    ``residual`` holds |(ρL)(x)| of the Kirchhoff vector per state.
    """

    states: tuple[str, ...]
    kirchhoff: Vector
    linear: Vector
    tree_weights: Vector
    residual: Vector
    total_weight: float
    agreement: float
    linear_residual: float
    balance_residual: float
    route: str
    notes: tuple[str, ...] = ()


@dataclass(slots=True, frozen=True)
class StationaryInteractor:
    store: GraphStore
    settings: EngineSettings
    dumps: DumpSettings
    forest_sink: ForestSink

    def __call__(self, request_data: StationaryRequest) -> StationaryResult:
        logger.info("Computing stationary distribution: %s", request_data.graph_path)

        g = load_rate_graph(self.store, request_data.graph_path, request_data.lam)
        L = generator(g)
        weights, total = tree_weight_vector(g, self.settings)
        kirchhoff = weights.values / total
        linear = stationary_distribution(L).values
        enumerated = uses_enumeration(g, self.settings)

        if self.dumps.forest_path is not None and enumerated:
            for root in g.states:
                enumerate_in_trees(g, root, self.settings, sink=self.forest_sink)
            logger.info("In-trees dumped to %s", self.dumps.forest_path)

        result = StationaryResult(
            states=g.states,
            kirchhoff=as_vector(kirchhoff),
            linear=as_vector(linear),
            tree_weights=as_vector(weights.values),
            residual=as_vector(np.abs(kirchhoff @ L.matrix)),
            total_weight=total,
            agreement=relative_difference(kirchhoff, linear),
            linear_residual=float(np.max(np.abs(linear @ L.matrix)) / L.norm),
            balance_residual=kirchhoff_balance_residual(g, weights.values),
            route="enumeration" if enumerated else "cofactor",
            notes=g.notes,
        )
        logger.info(
            "Stationary distribution computed by %s; agreement %.3g",
            result.route,
            result.agreement,
        )
        return result
