from dataclasses import dataclass
from enum import Enum


class TerminationReason(str, Enum):
    HORIZON = "horizon"
    HIT_TARGET = "hit_target"
    ESCAPED = "escaped"


@dataclass(frozen=True, slots=True)
class HorizonStop:
    horizon: float


@dataclass(frozen=True, slots=True)
class HitStop:
    target: str


@dataclass(frozen=True, slots=True)
class EscapeStop:
    region: frozenset[str]


StopRule = HorizonStop | HitStop | EscapeStop


@dataclass(frozen=True, slots=True)
class Jump:
    holding_time: float
    next_state: str


@dataclass(frozen=True, slots=True)
class Trajectory:
    """Piecewise-constant path; ``tail_time`` is the time spent in the
    terminal state before a horizon stop (zero for hit/escape stops)"""

    initial: str
    jumps: tuple[Jump, ...]
    terminal: str
    reason: TerminationReason
    tail_time: float = 0.0

    @property
    def duration(self) -> float:
        return sum(j.holding_time for j in self.jumps) + self.tail_time

    def segments(self) -> list[tuple[str, float]]:
        """(state, time spent) in visiting order"""
        state = self.initial
        result: list[tuple[str, float]] = []
        for jump in self.jumps:
            result.append((state, jump.holding_time))
            state = jump.next_state
        if self.tail_time > 0:
            result.append((state, self.tail_time))
        return result


@dataclass(frozen=True, slots=True)
class McEstimate:
    mean: float
    stderr: float
    count: int
    seed: int
    truncation_allowance: float | None = None

    def within(self, value: float, sigmas: float) -> bool:
        band = sigmas * self.stderr
        if self.truncation_allowance is not None:
            band = max(band, self.truncation_allowance)
        return abs(self.mean - value) <= band
