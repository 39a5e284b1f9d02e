import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from potentials.application.graph_core import generator
from potentials.application.graph_store import GraphStore
from potentials.application.interactors.graphs import (
    Vector,
    as_vector,
    load_rate_graph,
)
from potentials.application.potential_theory import (
    QuasipotentialMethod,
    center_source,
    poisson_residual,
    quasipotential,
)
from potentials.application.settings import EngineSettings
from potentials.application.spectral_algebra import stationary_distribution

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True, kw_only=True)
class QuasipotentialRequest:
    graph_path: str
    field_path: str
    lam: float | None = None
    auto_center: bool = True
    methods: tuple[QuasipotentialMethod, ...] = tuple(QuasipotentialMethod)


@dataclass(frozen=True, slots=True)
class QuasipotentialResult:
    states: tuple[str, ...]
    source: Vector
    source_mean: float
    solutions: dict[str, Vector]
    residuals: dict[str, float]
    agreement: float
    notes: tuple[str, ...] = field(default=())


@dataclass(slots=True, frozen=True)
class QuasipotentialInteractor:
    store: GraphStore
    settings: EngineSettings

    def __call__(self, request_data: QuasipotentialRequest) -> QuasipotentialResult:
        logger.info(
            "Solving Poisson equation: %s with source %s",
            request_data.graph_path,
            request_data.field_path,
        )

        g = load_rate_graph(self.store, request_data.graph_path, request_data.lam)
        f = self.store.read_field(request_data.field_path, g.states)
        rho = stationary_distribution(generator(g)).values
        source = center_source(f, rho, auto_center=request_data.auto_center)

        solutions: dict[str, Vector] = {}
        residuals: dict[str, float] = {}
        notes = [*g.notes, *source.notes]
        for method in request_data.methods:
            v = quasipotential(g, source, method, settings=self.settings)
            solutions[method.value] = as_vector(v.values)
            residuals[method.value] = poisson_residual(g, v.values, source.values)
            notes.extend(note for note in v.notes if note not in notes)

        scale = max(source.sup_norm, 1e-300)
        agreement = max(
            (
                float(np.max(np.abs(np.subtract(a, b)))) / scale
                for a, b in itertools.combinations(solutions.values(), 2)
            ),
            default=0.0,
        )

        logger.info(
            "Quasipotential solved by %d method(s); agreement %.3g",
            len(solutions),
            agreement,
        )
        return QuasipotentialResult(
            states=g.states,
            source=as_vector(source.values),
            source_mean=f.mean(rho),
            solutions=solutions,
            residuals=residuals,
            agreement=agreement,
            notes=tuple(notes),
        )
