from collections.abc import Callable
from pathlib import Path
from typing import Any

import orjson
import pytest

from potentials.application.exceptions.base import GraphFileError
from potentials.application.reference_graphs import directed_ring
from potentials.application.trajectory_oracle import sample_paths
from potentials.domain.exceptions import (
    DuplicateArcError,
    MissingStateError,
    NonNumericValueError,
    NotStronglyConnectedError,
    UnknownStateError,
)
from potentials.domain.graph import ParamRateGraph, RateGraph
from potentials.domain.trajectory import HitStop
from potentials.infrastructure.dumps.jsonlines import (
    JsonLinesFile,
    JsonLinesTrajectorySink,
)
from potentials.infrastructure.files.json_store import JsonGraphStore

Writer = Callable[[str, Any], str]

STATES = ("a", "b")


@pytest.fixture
def store() -> JsonGraphStore:
    return JsonGraphStore()


class TestReadGraph:
    """Graph documents: states plus from/to arcs"""

    def test_rate_graph(self, store: JsonGraphStore, two_state_file: str) -> None:
        g = store.read_graph(two_state_file)
        assert isinstance(g, RateGraph)
        assert g.rate("a", "b") == 2.0

    def test_parameterized_graph(self, store: JsonGraphStore, barrier_file: str) -> None:
        g = store.read_graph(barrier_file)
        assert isinstance(g, ParamRateGraph)
        assert g.n == 3

    def test_missing_file(self, store: JsonGraphStore, tmp_path: Path) -> None:
        with pytest.raises(GraphFileError) as info:
            store.read_graph(str(tmp_path / "absent.json"))
        assert "absent.json" in info.value.message

    def test_invalid_json(self, store: JsonGraphStore, tmp_path: Path) -> None:
        path = tmp_path / "broken.json"
        path.write_text("{\"states\": [")
        with pytest.raises(GraphFileError, match="invalid JSON"):
            store.read_graph(str(path))

    def test_wrong_layout(self, store: JsonGraphStore, write_json: Writer) -> None:
        path = write_json("layout.json", {"nodes": ["a", "b"]})
        with pytest.raises(GraphFileError, match="unexpected document layout"):
            store.read_graph(path)

    def test_reducible(self, store: JsonGraphStore, write_json: Writer) -> None:
        path = write_json(
            "oneway.json",
            {"states": ["a", "b"], "arcs": [{"from": "a", "to": "b", "rate": 1}]},
        )
        with pytest.raises(NotStronglyConnectedError):
            store.read_graph(path)

    def test_strict_rejects_parallel_arcs(self, write_json: Writer) -> None:
        path = write_json(
            "parallel.json",
            {
                "states": ["a", "b"],
                "arcs": [
                    {"from": "a", "to": "b", "rate": 1},
                    {"from": "a", "to": "b", "rate": 2},
                    {"from": "b", "to": "a", "rate": 1},
                ],
            },
        )
        assert JsonGraphStore().read_graph(path).rate("a", "b") == 3.0
        with pytest.raises(DuplicateArcError):
            JsonGraphStore(strict=True).read_graph(path)


class TestReadField:
    """Scalar fields: one JSON object {state: number}"""

    def test_values_follow_graph_order(
        self,
        store: JsonGraphStore,
        write_json: Writer,
    ) -> None:
        path = write_json("f.json", {"b": -1, "a": 2.5})
        field = store.read_field(path, STATES)
        assert field.as_dict() == {"a": 2.5, "b": -1.0}

    def test_not_an_object(self, store: JsonGraphStore, write_json: Writer) -> None:
        path = write_json("list.json", [1, 2])
        with pytest.raises(GraphFileError):
            store.read_field(path, STATES)

    def test_unknown_state(self, store: JsonGraphStore, write_json: Writer) -> None:
        path = write_json("extra.json", {"a": 1, "b": 2, "c": 3})
        with pytest.raises(UnknownStateError) as info:
            store.read_field(path, STATES)
        assert info.value.state == "c"

    def test_missing_state(self, store: JsonGraphStore, write_json: Writer) -> None:
        path = write_json("short.json", {"a": 1})
        with pytest.raises(MissingStateError):
            store.read_field(path, STATES)

    @pytest.mark.parametrize("value", ["1", True, None, [1]])
    def test_non_numeric(
        self,
        store: JsonGraphStore,
        write_json: Writer,
        value: object,
    ) -> None:
        path = write_json("bad.json", {"a": 1, "b": value})
        with pytest.raises(NonNumericValueError):
            store.read_field(path, STATES)


class TestJsonLinesDumps:
    """Debug dumps opened lazily and written one record per line"""

    def test_disabled_without_path(self) -> None:
        dump = JsonLinesFile(None)
        dump.append({"x": 1})
        dump.close()
        assert dump.records == 0

    def test_not_created_until_written(self, tmp_path: Path) -> None:
        path = tmp_path / "never.jsonl"
        JsonLinesFile(str(path)).close()
        assert not path.exists()

    def test_trajectories(self, tmp_path: Path) -> None:
        path = tmp_path / "paths.jsonl"
        sink = JsonLinesTrajectorySink(str(path))
        sample_paths(directed_ring(), "1", HitStop("3"), 4, seed=0, sink=sink, dump_cap=2)
        sink.close()
        lines = path.read_bytes().splitlines()
        assert len(lines) == 2
        record = orjson.loads(lines[0])
        assert record["initial"] == "1"
        assert [jump[1] for jump in record["jumps"]] == ["2", "3"]
