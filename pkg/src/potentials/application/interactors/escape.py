import logging
from dataclasses import dataclass

from potentials.application.graph_store import GraphStore
from potentials.application.interactors.graphs import (
    Vector,
    as_vector,
    load_rate_graph,
)
from potentials.application.potential_theory import (
    escape_sum_rule_residual,
    mean_escape_time,
    proper_subset,
    stopped_spectral_bound,
)
from potentials.application.settings import EngineSettings

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True, kw_only=True)
class EscapeRequest:
    graph_path: str
    interior: tuple[str, ...]
    lam: float | None = None


@dataclass(frozen=True, slots=True)
class EscapeResult:
    """Mean escape time from H per start state (zero outside H)"""

    states: tuple[str, ...]
    interior: tuple[str, ...]
    escape_times: Vector
    sum_rule_residual: float
    decay_rate: float
    notes: tuple[str, ...] = ()


@dataclass(slots=True, frozen=True)
class EscapeInteractor:
    store: GraphStore
    settings: EngineSettings

    def __call__(self, request_data: EscapeRequest) -> EscapeResult:
        logger.info(
            "Computing escape times from %s: %s",
            ",".join(request_data.interior),
            request_data.graph_path,
        )

        g = load_rate_graph(self.store, request_data.graph_path, request_data.lam)
        interior = proper_subset(g, request_data.interior)
        times = mean_escape_time(g, interior, self.settings)
        residual = escape_sum_rule_residual(g, interior, self.settings)

        logger.info("Escape times computed; sum rule residual %.3g", residual)
        return EscapeResult(
            states=g.states,
            interior=tuple(s for s in g.states if s in interior),
            escape_times=as_vector(times.values),
            sum_rule_residual=residual,
            decay_rate=stopped_spectral_bound(g, interior),
            notes=g.notes,
        )
