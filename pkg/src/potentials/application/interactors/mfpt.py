import itertools
import logging
from dataclasses import dataclass

import numpy as np

from potentials.application.graph_store import GraphStore
from potentials.application.interactors.graphs import (
    Matrix,
    as_matrix,
    load_rate_graph,
)
from potentials.application.potential_theory import (
    MfptMatrix,
    MfptMethod,
    green_function_residual,
    mfpt_matrix,
    mfpt_residual,
)
from potentials.application.settings import EngineSettings

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True, kw_only=True)
class MfptRequest:
    graph_path: str
    lam: float | None = None
    methods: tuple[MfptMethod, ...] = tuple(MfptMethod)


@dataclass(frozen=True, slots=True)
class MfptResult:
    """τ(x, z) per method: row x is the start, column z the target"""

    states: tuple[str, ...]
    matrices: dict[str, Matrix]
    residuals: dict[str, float]
    green_residual: float
    agreement: float
    notes: tuple[str, ...] = ()


def _relative_gap(a: MfptMatrix, b: MfptMatrix) -> float:
    scale = max(float(np.max(np.abs(b.matrix))), 1e-300)
    return float(np.max(np.abs(a.matrix - b.matrix)) / scale)


@dataclass(slots=True, frozen=True)
class MfptInteractor:
    store: GraphStore
    settings: EngineSettings

    def __call__(self, request_data: MfptRequest) -> MfptResult:
        logger.info("Computing mean first-passage times: %s", request_data.graph_path)

        g = load_rate_graph(self.store, request_data.graph_path, request_data.lam)
        computed = {
            method: mfpt_matrix(g, method, self.settings)
            for method in request_data.methods
        }
        agreement = max(
            (
                _relative_gap(a, b)
                for a, b in itertools.combinations(computed.values(), 2)
            ),
            default=0.0,
        )
        reference = next(iter(computed.values()))

        logger.info(
            "First-passage matrix computed by %d method(s); agreement %.3g",
            len(computed),
            agreement,
        )
        return MfptResult(
            states=g.states,
            matrices={m.value: as_matrix(tau.matrix) for m, tau in computed.items()},
            residuals={m.value: mfpt_residual(g, tau) for m, tau in computed.items()},
            green_residual=green_function_residual(g, reference),
            agreement=agreement,
            notes=g.notes,
        )
