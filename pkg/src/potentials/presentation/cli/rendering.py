from functools import singledispatch

from potentials.application.interactors.bounds import BoundsResult
from potentials.application.interactors.escape import EscapeResult
from potentials.application.interactors.kemeny import KemenyReport
from potentials.application.interactors.mfpt import MfptResult
from potentials.application.interactors.quasipotential import QuasipotentialResult
from potentials.application.interactors.simulate import SimulationResult
from potentials.application.interactors.stationary import StationaryResult
from potentials.application.interactors.sweep import SweepResult
from potentials.domain.reports import BoundReport, ValidationReport
from potentials.infrastructure.files.reports import Cell, Table

SUMMARY_COLUMNS = ("quantity", "value")


def _summary(title: str, items: dict[str, Cell]) -> Table:
    return Table(title, SUMMARY_COLUMNS, list(items.items()))


def _notes(notes: tuple[str, ...] | list[str]) -> list[Table]:
    if not notes:
        return []
    return [Table("notes", ("note",), [(note,) for note in notes])]


@singledispatch
def tables(result: object) -> list[Table]:
    msg = f"no tabular view for {type(result).__name__}"
    raise TypeError(msg)


@tables.register
def _(result: StationaryResult) -> list[Table]:
    rows: list[tuple[Cell, ...]] = [
        (state, k, lin, w, r)
        for state, k, lin, w, r in zip(
            result.states,
            result.kirchhoff,
            result.linear,
            result.tree_weights,
            result.residual,
            strict=True,
        )
    ]
    return [
        Table(
            "stationary distribution",
            ("state", "kirchhoff", "linear", "tree_weight", "residual"),
            rows,
        ),
        _summary(
            "summary",
            {
                "total_tree_weight": result.total_weight,
                "agreement": result.agreement,
                "linear_residual": result.linear_residual,
                "balance_residual": result.balance_residual,
                "route": result.route,
            },
        ),
        *_notes(result.notes),
    ]


@tables.register
def _(result: QuasipotentialResult) -> list[Table]:
    methods = tuple(result.solutions)
    rows: list[tuple[Cell, ...]] = [
        (state, result.source[i], *(result.solutions[m][i] for m in methods))
        for i, state in enumerate(result.states)
    ]
    summary: dict[str, Cell] = {"source_mean": result.source_mean}
    summary.update({f"residual[{m}]": r for m, r in result.residuals.items()})
    summary["agreement"] = result.agreement
    return [
        Table("quasipotential", ("state", "f_centered", *methods), rows),
        _summary("summary", summary),
        *_notes(result.notes),
    ]


@tables.register
def _(result: MfptResult) -> list[Table]:
    blocks = [
        Table(
            f"mean first-passage times ({method}), row = start",
            ("from\\to", *result.states),
            [
                (state, *row)
                for state, row in zip(result.states, matrix, strict=True)
            ],
        )
        for method, matrix in result.matrices.items()
    ]
    summary: dict[str, Cell] = {
        f"residual[{m}]": r for m, r in result.residuals.items()
    }
    summary["green_residual"] = result.green_residual
    summary["agreement"] = result.agreement
    return [*blocks, _summary("summary", summary), *_notes(result.notes)]


@tables.register
def _(result: EscapeResult) -> list[Table]:
    inside = set(result.interior)
    return [
        Table(
            "mean escape time from H",
            ("state", "in_H", "escape_time"),
            [
                (state, state in inside, t)
                for state, t in zip(result.states, result.escape_times, strict=True)
            ],
        ),
        _summary(
            "summary",
            {
                "sum_rule_residual": result.sum_rule_residual,
                "decay_rate": result.decay_rate,
            },
        ),
        *_notes(result.notes),
    ]


def _bound_tables(report: BoundReport) -> list[Table]:
    blocks = [
        Table(
            f"{report.kind.value} bound ({report.norm})",
            ("label", "bound", "attained", "slack", "passed"),
            [
                (row.label, row.bound, row.attained, row.slack, row.passed)
                for row in report.rows
            ],
        ),
    ]
    if report.extra:
        blocks.append(_summary(f"{report.kind.value} details", dict(report.extra)))
    return blocks


@tables.register
def _(result: BoundsResult) -> list[Table]:
    blocks = [t for report in result.reports for t in _bound_tables(report)]
    notes = [*result.notes, *(n for r in result.reports for n in r.notes)]
    return [*blocks, *_notes(notes)]


@tables.register
def _(result: SweepResult) -> list[Table]:
    report = result.report
    return [
        Table(
            "uniform bound sweep",
            (
                "lambda",
                "total_tree_weight",
                "best_tree_weight",
                "bound",
                "attained",
                "slack",
                "clamped_arcs",
            ),
            [
                (
                    row.lam,
                    row.total_tree_weight,
                    row.best_tree_weight,
                    row.bound,
                    row.attained,
                    row.slack,
                    row.clamped_arcs,
                )
                for row in report.sweep
            ],
        ),
        _summary("summary", dict(report.extra)),
        *_notes(report.notes),
    ]


@tables.register
def _(result: ValidationReport) -> list[Table]:
    return [
        Table(
            f"validation: {result.subject}",
            ("check", "value", "tolerance", "passed", "detail"),
            [
                (c.name, c.value, c.tolerance, c.passed, c.detail)
                for c in result.checks
            ],
        ),
        _summary(
            "summary",
            {
                "checks": len(result.checks),
                "failed": len(result.failures),
                "passed": result.passed,
            },
        ),
        *_notes([*result.warnings, *result.notes]),
    ]


@tables.register
def _(result: KemenyReport) -> list[Table]:
    return [
        Table(
            "kemeny functional per start state",
            ("state", "value"),
            list(zip(result.states, result.per_state, strict=True)),
        ),
        _summary(
            "summary",
            {
                "value": result.value,
                "spread": result.spread,
                "forest_value": result.forest_value,
                "identity_residual": result.identity_residual,
            },
        ),
        *_notes(result.notes),
    ]


@tables.register
def _(result: SimulationResult) -> list[Table]:
    return [
        Table(
            f"trajectories from {result.start}",
            ("path", "terminal", "reason", "duration", "jumps"),
            [
                (i, p.terminal, p.reason.value, p.duration, p.jumps)
                for i, p in enumerate(result.paths)
            ],
        ),
        _summary(
            "summary",
            {
                "mean_duration": result.mean_duration,
                "stderr": result.stderr,
                "seed": result.seed,
                "dumped": result.dumped,
            },
        ),
    ]
