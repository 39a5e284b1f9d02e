import logging
import math
from pathlib import Path
from typing import Any

import orjson
from adaptix import Retort, name_mapping
from adaptix.load_error import LoadError

from potentials.application.exceptions.base import GraphFileError
from potentials.application.graph_core import ArcRecord, GraphDocument, build_graph
from potentials.application.graph_store import GraphStore
from potentials.domain.exceptions import (
    MissingStateError,
    NonNumericValueError,
    UnknownStateError,
)
from potentials.domain.graph import ParamRateGraph, RateGraph, ScalarField

logger = logging.getLogger(__name__)

graph_retort = Retort(
    recipe=[
        name_mapping(
            ArcRecord,
            map={"source": "from", "target": "to"},
        ),
    ],
)


def _read_json(path: str) -> Any:
    try:
        raw = Path(path).read_bytes()
    except OSError as err:
        raise GraphFileError(path, err.strerror or str(err)) from err
    try:
        return orjson.loads(raw)
    except orjson.JSONDecodeError as err:
        raise GraphFileError(path, f"invalid JSON: {err}") from err


def _is_number(value: object) -> bool:
    return isinstance(value, int | float) and not isinstance(value, bool)


class JsonGraphStore(GraphStore):
    """Graph and scalar-field documents in UTF-8 JSON files"""

    def __init__(self, *, strict: bool = False) -> None:
        self._strict = strict

    def read_graph(self, path: str) -> RateGraph | ParamRateGraph:
        data = _read_json(path)
        try:
            document = graph_retort.load(data, GraphDocument)
        except LoadError as err:
            raise GraphFileError(path, f"unexpected document layout: {err}") from err
        graph = build_graph(document, strict=self._strict)
        logger.info(
            "Loaded %s graph from %s: %s states, %s arcs",
            "parameterized" if isinstance(graph, ParamRateGraph) else "rate",
            path,
            graph.n,
            len(graph.arcs),
        )
        return graph

    def read_field(self, path: str, states: tuple[str, ...]) -> ScalarField:
        data = _read_json(path)
        if not isinstance(data, dict):
            raise GraphFileError(path, "a scalar field is a JSON object {state: number}")
        for state in data:
            if state not in states:
                raise UnknownStateError(state, context="scalar field")
        values: dict[str, float] = {}
        for state in states:
            if state not in data:
                raise MissingStateError(state)
            value = data[state]
            if not _is_number(value) or not math.isfinite(value):
                raise NonNumericValueError(state, value)
            values[state] = float(value)
        logger.debug("Loaded scalar field from %s", path)
        return ScalarField.from_mapping(states, values)
