from dataclasses import dataclass, field
from enum import Enum

from potentials.domain.tolerances import Tolerances


class ForestMode(str, Enum):
    AUTO = "auto"
    ENUMERATION = "enumeration"
    ALGEBRAIC = "algebraic"


@dataclass(frozen=True, slots=True, kw_only=True)
class EngineSettings:
    """Knobs shared by the computation modules.

    ``enumeration_cap`` bounds the state count for explicit enumeration;
    in ``AUTO`` mode enumeration is also skipped when the number of
    candidate forests exceeds ``enumeration_budget``.
    """

    enumeration_cap: int = 10
    enumeration_budget: int = 200_000
    minor_sum_cap: int = 14
    forest_mode: ForestMode = ForestMode.AUTO
    workers: int = 1
    tolerances: Tolerances = field(default_factory=Tolerances)


DEFAULT_SETTINGS = EngineSettings()


@dataclass(frozen=True, slots=True, kw_only=True)
class DumpSettings:
    """Optional JSON-lines debug dumps"""

    forest_path: str | None = None
    trajectory_path: str | None = None
    trajectory_cap: int = 100
