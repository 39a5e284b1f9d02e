from dataclasses import dataclass, field
from enum import Enum


@dataclass(frozen=True, slots=True)
class CheckResult:
    name: str
    value: float
    tolerance: float
    passed: bool
    detail: str = ""


@dataclass(slots=True)
class ValidationReport:
    """Residuals, method disagreements and MC bands of one run"""

    subject: str
    checks: list[CheckResult] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def check(
        self,
        name: str,
        value: float,
        tolerance: float,
        detail: str = "",
    ) -> CheckResult:
        """Record ``value <= tolerance`` under ``name``"""
        result = CheckResult(
            name=name,
            value=float(value),
            tolerance=float(tolerance),
            passed=bool(value <= tolerance),
            detail=detail,
        )
        self.checks.append(result)
        return result

    def extend(self, other: "ValidationReport", prefix: str = "") -> None:
        for check in other.checks:
            self.checks.append(
                CheckResult(
                    name=f"{prefix}{check.name}",
                    value=check.value,
                    tolerance=check.tolerance,
                    passed=check.passed,
                    detail=check.detail,
                ),
            )
        self.warnings.extend(other.warnings)
        self.notes.extend(other.notes)


class BoundKind(str, Enum):
    PAIR = "pair"
    DECOMPOSED = "decomposed"
    GLOBAL = "global"
    CHAINED = "chained"
    SWEEP = "sweep"


@dataclass(frozen=True, slots=True)
class BoundRow:
    label: str
    bound: float
    attained: float
    slack: float
    passed: bool


@dataclass(frozen=True, slots=True)
class SweepRow:
    lam: float
    total_tree_weight: float
    best_tree_weight: float
    bound: float
    attained: float
    slack: float
    clamped_arcs: int = 0


@dataclass(slots=True)
class BoundReport:
    kind: BoundKind
    norm: str
    rows: list[BoundRow] = field(default_factory=list)
    sweep: list[SweepRow] = field(default_factory=list)
    extra: dict[str, float | bool | str | None] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(row.passed for row in self.rows)

    def add_row(
        self,
        label: str,
        bound: float,
        attained: float,
        scale: float,
        tolerance: float,
    ) -> BoundRow:
        slack = bound - attained
        row = BoundRow(
            label=label,
            bound=float(bound),
            attained=float(attained),
            slack=float(slack),
            passed=bool(attained <= bound + tolerance * scale),
        )
        self.rows.append(row)
        return row
