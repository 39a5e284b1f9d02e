import logging
import math
import sys
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import networkx as nx
import numpy as np

from potentials.domain.exceptions import (
    DuplicateArcError,
    MixedArcFormsError,
    NonpositiveRateError,
    NotStronglyConnectedError,
)
from potentials.domain.graph import (
    Arc,
    GeneratorMatrix,
    ParamArc,
    ParamRateGraph,
    RateGraph,
)

logger = logging.getLogger(__name__)

SMALLEST_RATE = sys.float_info.min
LARGEST_RATE = sys.float_info.max


@dataclass(frozen=True, slots=True, kw_only=True)
class ArcRecord:
    """One arc as read from a graph file"""

    source: str
    target: str
    rate: float | None = None
    prefactor: float | None = None
    barrier: float | None = None

    @property
    def parameterized(self) -> bool:
        return self.prefactor is not None or self.barrier is not None


@dataclass(frozen=True, slots=True)
class GraphDocument:
    states: list[str]
    arcs: list[ArcRecord]

    @property
    def parameterized(self) -> bool:
        return bool(self.arcs) and self.arcs[0].parameterized


@dataclass(frozen=True, slots=True)
class Irreducibility:
    is_irreducible: bool
    witness: tuple[str, str] | None = None


def _digraph(states: Sequence[str], pairs: Iterable[tuple[str, str]]) -> nx.DiGraph:
    digraph = nx.DiGraph()
    digraph.add_nodes_from(states)
    digraph.add_edges_from(pairs)
    return digraph


def _reachability(
    states: Sequence[str],
    pairs: Iterable[tuple[str, str]],
) -> Irreducibility:
    digraph = _digraph(states, pairs)
    if nx.is_strongly_connected(digraph):
        return Irreducibility(is_irreducible=True)
    for source in states:
        reached = nx.descendants(digraph, source)
        for target in states:
            if target != source and target not in reached:
                return Irreducibility(
                    is_irreducible=False,
                    witness=(source, target),
                )
    return Irreducibility(is_irreducible=True)  # pragma: no cover


def check_irreducible(g: RateGraph | ParamRateGraph) -> Irreducibility:
    """Strong connectivity with a witness pair (x, y) when y is unreachable"""
    return _reachability(g.states, ((a.source, a.target) for a in g.arcs))


def _require_irreducible(g: RateGraph | ParamRateGraph) -> None:
    result = check_irreducible(g)
    if result.witness is not None:
        raise NotStronglyConnectedError(*result.witness)


def _merge_parallel(
    arcs: Iterable[tuple[str, str, float]],
    *,
    strict: bool,
) -> tuple[list[Arc], list[str]]:
    merged: dict[tuple[str, str], float] = {}
    counts: dict[tuple[str, str], int] = {}
    for source, target, rate in arcs:
        if not (rate > 0 and math.isfinite(rate)):
            raise NonpositiveRateError(source, target, rate)
        pair = (source, target)
        if pair in merged:
            if strict:
                raise DuplicateArcError(source, target)
            merged[pair] += rate
            counts[pair] += 1
        else:
            merged[pair] = rate
            counts[pair] = 1
    notes = [
        f"merged {count} parallel arcs {source}->{target} into rate "
        f"{merged[(source, target)]!r}"
        for (source, target), count in counts.items()
        if count > 1
    ]
    arcs_out = [Arc(s, t, rate) for (s, t), rate in merged.items()]
    return arcs_out, notes


def rate_graph(
    states: Sequence[str],
    arcs: Iterable[tuple[str, str, float]],
    *,
    strict: bool = False,
) -> RateGraph:
    """Validated rate graph; parallel arcs are summed unless ``strict``"""
    merged, notes = _merge_parallel(arcs, strict=strict)
    for note in notes:
        logger.info("Parse note: %s", note)
    graph = RateGraph(tuple(states), tuple(merged), tuple(notes))
    _require_irreducible(graph)
    return graph


def param_rate_graph(
    states: Sequence[str],
    arcs: Iterable[tuple[str, str, float, float]],
) -> ParamRateGraph:
    graph = ParamRateGraph(
        tuple(states),
        tuple(ParamArc(s, t, a, b) for s, t, a, b in arcs),
    )
    _require_irreducible(graph)
    return graph


def build_rate_graph(document: GraphDocument, *, strict: bool = False) -> RateGraph:
    records = _uniform_records(document, parameterized=False)
    return rate_graph(
        document.states,
        ((r.source, r.target, float(r.rate)) for r in records),  # type: ignore[arg-type]
        strict=strict,
    )


def build_param_rate_graph(document: GraphDocument) -> ParamRateGraph:
    records = _uniform_records(document, parameterized=True)
    return param_rate_graph(
        document.states,
        (
            (r.source, r.target, float(r.prefactor), float(r.barrier))  # type: ignore[arg-type]
            for r in records
        ),
    )


def build_graph(
    document: GraphDocument,
    *,
    strict: bool = False,
) -> RateGraph | ParamRateGraph:
    if document.parameterized:
        return build_param_rate_graph(document)
    return build_rate_graph(document, strict=strict)


def _uniform_records(
    document: GraphDocument,
    *,
    parameterized: bool,
) -> list[ArcRecord]:
    for record in document.arcs:
        plain = record.rate is not None
        param = record.prefactor is not None and record.barrier is not None
        if parameterized and (plain or not param):
            raise MixedArcFormsError(record.source, record.target)
        if not parameterized and (not plain or record.parameterized):
            raise MixedArcFormsError(record.source, record.target)
    return document.arcs


def generator(g: RateGraph) -> GeneratorMatrix:
    """Backward generator L with the diagonal set to minus the row sum"""
    matrix = g.rate_matrix()
    np.fill_diagonal(matrix, -matrix.sum(axis=1))
    return GeneratorMatrix(g.states, matrix)


def laplacian(generator_matrix: GeneratorMatrix) -> np.ndarray:
    return generator_matrix.laplacian


def evaluate_at(pg: ParamRateGraph, lam: float) -> RateGraph:
    """Rates a·exp(−λb); out-of-range floats are clamped with a note"""
    if not math.isfinite(lam):
        msg = f"lambda must be finite, got {lam}"
        raise ValueError(msg)
    arcs: list[Arc] = []
    notes: list[str] = []
    for arc in pg.arcs:
        exponent = -lam * arc.barrier
        rate = arc.prefactor * math.exp(exponent) if exponent < 709.0 else math.inf
        if rate == 0.0:
            notes.append(
                f"rate {arc.source}->{arc.target} underflowed at "
                f"lambda={lam!r}; clamped to {SMALLEST_RATE!r}",
            )
            rate = SMALLEST_RATE
        elif not math.isfinite(rate):
            notes.append(
                f"rate {arc.source}->{arc.target} overflowed at "
                f"lambda={lam!r}; clamped to {LARGEST_RATE!r}",
            )
            rate = LARGEST_RATE
        arcs.append(Arc(arc.source, arc.target, rate))
    for note in notes:
        logger.warning("Rate clamp: %s", note)
    graph = RateGraph(pg.states, tuple(arcs), tuple(notes))
    _require_irreducible(graph)
    return graph
