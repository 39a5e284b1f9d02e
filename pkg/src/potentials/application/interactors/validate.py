import logging
from dataclasses import dataclass

from potentials.application.graph_store import GraphStore
from potentials.application.interactors.graphs import load_rate_graph
from potentials.application.settings import EngineSettings
from potentials.application.validation import validate_suite
from potentials.domain.reports import ValidationReport

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True, kw_only=True)
class ValidateRequest:
    graph_paths: tuple[str, ...] = ()
    n_random: int = 20
    seed: int = 0
    mc_samples: int = 10_000


@dataclass(slots=True, frozen=True)
class ValidateInteractor:
    store: GraphStore
    settings: EngineSettings

    def __call__(self, request_data: ValidateRequest) -> ValidationReport:
        logger.info(
            "Running identity suite: %s random graph(s), seed %s",
            request_data.n_random,
            request_data.seed,
        )

        graphs = [load_rate_graph(self.store, path) for path in request_data.graph_paths]
        report = validate_suite(
            graphs,
            n_random=request_data.n_random,
            seed=request_data.seed,
            settings=self.settings,
            mc_samples=request_data.mc_samples,
        )

        logger.info(
            "Identity suite finished: %s checks, %s failed",
            len(report.checks),
            len(report.failures),
        )
        return report
