import logging
from dataclasses import dataclass

from potentials.application.bounds_analysis import (
    chained_bound,
    decomposed_bound,
    global_bound,
    pair_bounds,
)
from potentials.application.graph_store import GraphStore
from potentials.application.interactors.graphs import load_rate_graph
from potentials.application.potential_theory import mfpt_matrix
from potentials.application.settings import EngineSettings
from potentials.domain.reports import BoundReport

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True, kw_only=True)
class BoundsRequest:
    """``decomposition_path`` and ``decomposition_states`` come together:
    E and the set D where h = f − LE may be nonzero"""

    graph_path: str
    field_path: str
    lam: float | None = None
    decomposition_path: str | None = None
    decomposition_states: tuple[str, ...] | None = None
    pairs: tuple[tuple[str, str], ...] | None = None


@dataclass(frozen=True, slots=True)
class BoundsResult:
    states: tuple[str, ...]
    reports: list[BoundReport]
    notes: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.reports)


@dataclass(slots=True, frozen=True)
class BoundsInteractor:
    store: GraphStore
    settings: EngineSettings

    def __call__(self, request_data: BoundsRequest) -> BoundsResult:
        logger.info("Checking quasipotential bounds: %s", request_data.graph_path)

        g = load_rate_graph(self.store, request_data.graph_path, request_data.lam)
        f = self.store.read_field(request_data.field_path, g.states)
        tau = mfpt_matrix(g, settings=self.settings)

        reports = [
            pair_bounds(g, f, request_data.pairs, self.settings, tau=tau),
            global_bound(g, f, self.settings),
            chained_bound(g, f, self.settings, tau=tau),
        ]
        if request_data.decomposition_path is not None:
            e = self.store.read_field(request_data.decomposition_path, g.states)
            reports.append(
                decomposed_bound(
                    g,
                    f,
                    e,
                    request_data.decomposition_states or (),
                    self.settings,
                    pairs=request_data.pairs,
                    tau=tau,
                ),
            )

        failed = sum(1 for report in reports for row in report.rows if not row.passed)
        logger.info("%s bound reports produced, %s rows failed", len(reports), failed)
        return BoundsResult(states=g.states, reports=reports, notes=g.notes)
