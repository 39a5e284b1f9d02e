import csv
import io
import logging
import math
import sys
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

import orjson
from adaptix import Retort

logger = logging.getLogger(__name__)

Cell = str | float | int | bool | None


class ReportFormat(str, Enum):
    TABLE = "table"
    CSV = "csv"
    JSON = "json"


@dataclass(frozen=True, slots=True)
class Table:
    title: str
    columns: tuple[str, ...]
    rows: list[tuple[Cell, ...]] = field(default_factory=list)


def _csv_cell(value: Cell) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _text_cell(value: Cell) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        if math.isfinite(value) and value != 0 and not 1e-4 <= abs(value) < 1e6:  # noqa: PLR2004
            return f"{value:.6e}"
        return f"{value:.10g}"
    return str(value)


@dataclass(slots=True)
class ReportWriter:
    """Serializes results as JSON, CSV or aligned text tables"""

    retort: Retort

    def to_json(self, result: Any) -> bytes:
        data = self.retort.dump(result)
        return orjson.dumps(
            data,
            option=(
                orjson.OPT_SORT_KEYS
                | orjson.OPT_INDENT_2
                | orjson.OPT_SERIALIZE_NUMPY
                | orjson.OPT_APPEND_NEWLINE
            ),
        )

    def to_csv(self, tables: Sequence[Table]) -> bytes:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        for number, table in enumerate(tables):
            if number:
                buffer.write("\n")
            writer.writerow([f"# {table.title}"])
            writer.writerow(table.columns)
            writer.writerows([_csv_cell(c) for c in row] for row in table.rows)
        return buffer.getvalue().encode()

    def to_text(self, tables: Sequence[Table]) -> bytes:
        blocks: list[str] = []
        for table in tables:
            cells = [[_text_cell(c) for c in row] for row in table.rows]
            widths = [
                max([len(name)] + [len(row[i]) for row in cells])
                for i, name in enumerate(table.columns)
            ]
            lines = [
                table.title,
                "  ".join(n.ljust(w) for n, w in zip(table.columns, widths, strict=True)),
                "  ".join("-" * w for w in widths),
            ]
            lines.extend(
                "  ".join(c.rjust(w) for c, w in zip(row, widths, strict=True))
                for row in cells
            )
            blocks.append("\n".join(lines))
        return ("\n\n".join(blocks) + "\n").encode()

    def render(
        self,
        result: Any,
        tables: Sequence[Table],
        report_format: ReportFormat,
    ) -> bytes:
        match report_format:
            case ReportFormat.JSON:
                return self.to_json(result)
            case ReportFormat.CSV:
                return self.to_csv(tables)
            case ReportFormat.TABLE:
                return self.to_text(tables)

    def write(self, payload: bytes, out: str | None) -> None:
        if out is None:
            sys.stdout.write(payload.decode())
            sys.stdout.flush()
            return
        Path(out).write_bytes(payload)
        logger.info("Report written to %s", out)
