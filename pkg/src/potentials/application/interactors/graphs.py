import logging

import numpy as np
import numpy.typing as npt

from potentials.application.exceptions.base import GraphFileError
from potentials.application.graph_core import evaluate_at
from potentials.application.graph_store import GraphStore
from potentials.domain.graph import ParamRateGraph, RateGraph

logger = logging.getLogger(__name__)

Vector = tuple[float, ...]
Matrix = tuple[Vector, ...]


def load_rate_graph(
    store: GraphStore,
    path: str,
    lam: float | None = None,
) -> RateGraph:
    """Plain graph as stored, or a parameterized one evaluated at ``lam``
    (prefactors when ``lam`` is not given)"""
    graph = store.read_graph(path)
    if isinstance(graph, ParamRateGraph):
        lam = 0.0 if lam is None else lam
        logger.info("Evaluating parameterized graph at lambda=%r", lam)
        return evaluate_at(graph, lam)
    if lam is not None:
        raise GraphFileError(path, "a lambda value needs prefactor/barrier arcs")
    return graph


def load_param_graph(store: GraphStore, path: str) -> ParamRateGraph:
    graph = store.read_graph(path)
    if not isinstance(graph, ParamRateGraph):
        raise GraphFileError(path, "expected prefactor/barrier arcs")
    return graph


def as_vector(values: npt.ArrayLike) -> Vector:
    return tuple(float(v) for v in np.asarray(values, dtype=np.float64))


def as_matrix(values: npt.ArrayLike) -> Matrix:
    return tuple(as_vector(row) for row in np.asarray(values, dtype=np.float64))


def relative_difference(actual: npt.ArrayLike, expected: npt.ArrayLike) -> float:
    a = np.asarray(actual, dtype=np.float64)
    b = np.asarray(expected, dtype=np.float64)
    scale = max(float(np.max(np.abs(b))), 1e-300)
    return float(np.max(np.abs(a - b)) / scale)
