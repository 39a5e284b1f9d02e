import logging
from dataclasses import dataclass

import numpy as np

from potentials.application.bounds_analysis import uniform_bound_sweep
from potentials.application.graph_store import GraphStore
from potentials.application.interactors.graphs import load_param_graph
from potentials.application.settings import EngineSettings
from potentials.domain.graph import ScalarField
from potentials.domain.reports import BoundReport

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True, kw_only=True)
class SweepRequest:
    """Without ``field_path`` the source is the indicator of the first state"""

    graph_path: str
    lambdas: tuple[float, ...]
    field_path: str | None = None


@dataclass(frozen=True, slots=True)
class SweepResult:
    states: tuple[str, ...]
    source: tuple[float, ...]
    report: BoundReport


@dataclass(slots=True, frozen=True)
class SweepInteractor:
    store: GraphStore
    settings: EngineSettings

    def __call__(self, request_data: SweepRequest) -> SweepResult:
        logger.info(
            "Sweeping %s lambda values: %s",
            len(request_data.lambdas),
            request_data.graph_path,
        )

        pg = load_param_graph(self.store, request_data.graph_path)
        if request_data.field_path is None:
            values = np.zeros(pg.n)
            values[0] = 1.0
            f = ScalarField(pg.states, values)
        else:
            f = self.store.read_field(request_data.field_path, pg.states)
        report = uniform_bound_sweep(pg, f, request_data.lambdas, self.settings)

        logger.info(
            "Sweep finished; uniform constant %s",
            report.extra.get("uniform_constant"),
        )
        return SweepResult(
            states=pg.states,
            source=tuple(float(v) for v in f.values),
            report=report,
        )
