import logging
from fractions import Fraction
from pathlib import Path
from typing import IO, Any

import orjson

from potentials.application.sinks import ForestSink, TrajectorySink
from potentials.domain.forest import ForestFamily, RootedForest
from potentials.domain.trajectory import Trajectory

logger = logging.getLogger(__name__)


class JsonLinesFile:
    """Append-only JSON-lines file, opened on the first record"""

    def __init__(self, path: str | None) -> None:
        self._path = path
        self._stream: IO[bytes] | None = None
        self.records = 0

    def append(self, record: dict[str, Any]) -> None:
        if self._path is None:
            return
        if self._stream is None:
            self._stream = Path(self._path).open("wb")  # noqa: SIM115
            logger.debug("Dump file %s opened", self._path)
        self._stream.write(orjson.dumps(record, option=orjson.OPT_APPEND_NEWLINE))
        self.records += 1

    def close(self) -> None:
        if self._stream is not None:
            self._stream.close()
            self._stream = None
            logger.debug("Dump file %s closed, %s records", self._path, self.records)


def _weight(value: float | Fraction) -> float | str:
    return str(value) if isinstance(value, Fraction) else value


class JsonLinesForestSink(JsonLinesFile, ForestSink):
    def write(self, family: ForestFamily, forest: RootedForest) -> None:
        self.append(
            {
                "family": family.label(),
                "roots": list(forest.roots),
                "arcs": [list(arc) for arc in forest.arcs],
                "weight": _weight(forest.weight),
            },
        )


class JsonLinesTrajectorySink(JsonLinesFile, TrajectorySink):
    def write(self, trajectory: Trajectory) -> None:
        self.append(
            {
                "initial": trajectory.initial,
                "jumps": [[j.holding_time, j.next_state] for j in trajectory.jumps],
                "terminal": trajectory.terminal,
                "reason": trajectory.reason.value,
                "tail_time": trajectory.tail_time,
            },
        )
