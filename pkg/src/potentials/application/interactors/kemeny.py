import logging
from dataclasses import dataclass

from potentials.application.forest_engine import (
    total_two_tree_weight,
    tree_weight_vector,
)
from potentials.application.graph_store import GraphStore
from potentials.application.interactors.graphs import Vector, load_rate_graph
from potentials.application.potential_theory import kemeny_functional
from potentials.application.settings import EngineSettings

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True, kw_only=True)
class KemenyRequest:
    graph_path: str
    lam: float | None = None


@dataclass(frozen=True, slots=True)
class KemenyReport:
    """Σ_y ρ(y)τ(x, y) per start state and the forest ratio W₂/W"""

    states: tuple[str, ...]
    value: float
    per_state: Vector
    spread: float
    forest_value: float
    identity_residual: float
    notes: tuple[str, ...] = ()


@dataclass(slots=True, frozen=True)
class KemenyInteractor:
    store: GraphStore
    settings: EngineSettings

    def __call__(self, request_data: KemenyRequest) -> KemenyReport:
        logger.info("Computing Kemeny constant: %s", request_data.graph_path)

        g = load_rate_graph(self.store, request_data.graph_path, request_data.lam)
        kemeny = kemeny_functional(g)
        _, total = tree_weight_vector(g, self.settings)
        forest_value = total_two_tree_weight(g, self.settings) / total
        residual = abs(kemeny.value - forest_value) / max(abs(forest_value), 1e-300)

        logger.info("Kemeny constant %.12g, spread %.3g", kemeny.value, kemeny.max_spread)
        return KemenyReport(
            states=g.states,
            value=kemeny.value,
            per_state=kemeny.per_state,
            spread=kemeny.max_spread,
            forest_value=forest_value,
            identity_residual=residual,
            notes=g.notes,
        )
