import math
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from potentials.domain.exceptions import (
    DuplicateArcError,
    DuplicateStateError,
    InvalidBarrierError,
    InvalidGeneratorError,
    InvalidPrefactorError,
    NonpositiveRateError,
    NotCenteredError,
    SelfLoopError,
    StateMismatchError,
    TooFewStatesError,
    UnknownStateError,
)

FloatArray = npt.NDArray[np.float64]

CENTERING_TOLERANCE = 1e-12
GENERATOR_ROW_TOLERANCE = 1e-12


def _frozen(values: npt.ArrayLike) -> FloatArray:
    array = np.array(values, dtype=np.float64)
    array.flags.writeable = False
    return array


def _check_states(states: tuple[str, ...]) -> dict[str, int]:
    if len(states) < 2:  # noqa: PLR2004
        raise TooFewStatesError(len(states))
    index: dict[str, int] = {}
    for position, state in enumerate(states):
        if state in index:
            raise DuplicateStateError(state)
        index[state] = position
    return index


@dataclass(frozen=True, slots=True)
class Arc:
    source: str
    target: str
    rate: float


@dataclass(frozen=True, slots=True)
class ParamArc:
    """Arrhenius arc: rate(λ) = prefactor · exp(−λ · barrier)"""

    source: str
    target: str
    prefactor: float
    barrier: float

    def rate_at(self, lam: float) -> float:
        return self.prefactor * math.exp(-lam * self.barrier)


@dataclass(frozen=True, slots=True)
class RateGraph:
    """Finite state set with positive jump rates k(x, y).

    Arcs are kept in row-major order of the state ordering. Strong
    connectivity is checked by the constructors in ``graph_core``.
    """

    states: tuple[str, ...]
    arcs: tuple[Arc, ...]
    notes: tuple[str, ...] = ()
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        index = _check_states(self.states)
        seen: set[tuple[str, str]] = set()
        for arc in self.arcs:
            for state in (arc.source, arc.target):
                if state not in index:
                    raise UnknownStateError(state)
            if arc.source == arc.target:
                raise SelfLoopError(arc.source)
            if not (arc.rate > 0 and math.isfinite(arc.rate)):
                raise NonpositiveRateError(arc.source, arc.target, arc.rate)
            pair = (arc.source, arc.target)
            if pair in seen:
                raise DuplicateArcError(*pair)
            seen.add(pair)
        ordered = tuple(
            sorted(
                self.arcs,
                key=lambda a: (index[a.source], index[a.target]),
            ),
        )
        object.__setattr__(self, "arcs", ordered)
        object.__setattr__(self, "_index", index)

    @property
    def n(self) -> int:
        return len(self.states)

    def index(self, state: str) -> int:
        try:
            return self._index[state]
        except KeyError:
            raise UnknownStateError(state, context="query") from None

    def indices(self, states: Iterable[str]) -> list[int]:
        return [self.index(state) for state in states]

    def rate(self, source: str, target: str) -> float:
        """k(x, y), zero when the arc is absent"""
        for arc in self.out_arcs(source):
            if arc.target == target:
                return arc.rate
        return 0.0

    def out_arcs(self, state: str) -> Iterator[Arc]:
        self.index(state)
        return (arc for arc in self.arcs if arc.source == state)

    def index_arcs(self) -> list[tuple[int, int, float]]:
        return [
            (self._index[a.source], self._index[a.target], a.rate)
            for a in self.arcs
        ]

    def rate_matrix(self) -> FloatArray:
        """Dense off-diagonal rates, zero diagonal"""
        rates = np.zeros((self.n, self.n))
        for i, j, rate in self.index_arcs():
            rates[i, j] = rate
        return rates

    @property
    def max_rate(self) -> float:
        return max(arc.rate for arc in self.arcs)


@dataclass(frozen=True, slots=True)
class ParamRateGraph:
    states: tuple[str, ...]
    arcs: tuple[ParamArc, ...]

    def __post_init__(self) -> None:
        index = _check_states(self.states)
        seen: set[tuple[str, str]] = set()
        for arc in self.arcs:
            for state in (arc.source, arc.target):
                if state not in index:
                    raise UnknownStateError(state)
            if arc.source == arc.target:
                raise SelfLoopError(arc.source)
            if not (arc.prefactor > 0 and math.isfinite(arc.prefactor)):
                raise InvalidPrefactorError(
                    arc.source,
                    arc.target,
                    arc.prefactor,
                )
            if not math.isfinite(arc.barrier):
                raise InvalidBarrierError(
                    arc.source,
                    arc.target,
                    arc.barrier,
                )
            pair = (arc.source, arc.target)
            if pair in seen:
                raise DuplicateArcError(*pair)
            seen.add(pair)
        ordered = tuple(
            sorted(
                self.arcs,
                key=lambda a: (index[a.source], index[a.target]),
            ),
        )
        object.__setattr__(self, "arcs", ordered)

    @property
    def n(self) -> int:
        return len(self.states)


@dataclass(frozen=True, slots=True, eq=False)
class GeneratorMatrix:
    """Backward generator L: off-diagonal rates, rows summing to zero"""

    states: tuple[str, ...]
    matrix: FloatArray

    def __post_init__(self) -> None:
        matrix = _frozen(self.matrix)
        n = len(self.states)
        if matrix.shape != (n, n):
            raise StateMismatchError(n, matrix.shape[0])
        if not np.all(np.isfinite(matrix)):
            raise InvalidGeneratorError(
                int(np.argwhere(~np.isfinite(matrix))[0][0]),
                "non-finite entry",
            )
        scale = float(np.max(np.abs(matrix))) if matrix.size else 0.0
        for row in range(n):
            off = np.delete(matrix[row], row)
            if np.any(off < 0):
                raise InvalidGeneratorError(row, "negative off-diagonal")
            if matrix[row, row] > 0:
                raise InvalidGeneratorError(row, "positive diagonal")
            limit = GENERATOR_ROW_TOLERANCE * max(scale, 1.0)
            if not abs(matrix[row].sum()) <= limit:
                raise InvalidGeneratorError(row, "row sum is not zero")
        object.__setattr__(self, "matrix", matrix)

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def laplacian(self) -> FloatArray:
        return -self.matrix

    @property
    def norm(self) -> float:
        """Max-norm ‖L‖ used to scale residual tolerances"""
        return float(np.max(np.abs(self.matrix)))

    @property
    def exit_rates(self) -> FloatArray:
        return -np.diag(self.matrix)


@dataclass(frozen=True, slots=True, eq=False)
class ScalarField:
    """Real function on the states, indexed by the graph ordering"""

    states: tuple[str, ...]
    values: FloatArray
    centered_against: FloatArray | None = None
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        values = _frozen(self.values)
        if values.shape != (len(self.states),):
            raise StateMismatchError(len(self.states), values.size)
        object.__setattr__(self, "values", values)
        if self.centered_against is not None:
            rho = _frozen(self.centered_against)
            object.__setattr__(self, "centered_against", rho)
            mean = float(rho @ values)
            if abs(mean) > CENTERING_TOLERANCE * max(self.sup_norm, 1e-300):
                raise NotCenteredError(mean)

    @classmethod
    def from_mapping(
        cls,
        states: tuple[str, ...],
        values: Mapping[str, float],
    ) -> "ScalarField":
        return cls(states, np.array([values[s] for s in states], float))

    @classmethod
    def constant(cls, states: tuple[str, ...], value: float) -> "ScalarField":
        return cls(states, np.full(len(states), value, dtype=np.float64))

    def __getitem__(self, state: str) -> float:
        return float(self.values[self.states.index(state)])

    def __len__(self) -> int:
        return len(self.states)

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def mean(self, rho: npt.ArrayLike) -> float:
        return float(np.asarray(rho, dtype=np.float64) @ self.values)

    def centered(self, rho: npt.ArrayLike, note: str | None = None) -> "ScalarField":
        rho_array = np.asarray(rho, dtype=np.float64)
        values = self.values - rho_array @ self.values
        # second pass removes the residue left by the first subtraction
        values = values - rho_array @ values
        notes = self.notes if note is None else (*self.notes, note)
        result = ScalarField(self.states, values, notes=notes)
        # a constant input leaves round-off only, judged against the input scale
        scale = max(self.sup_norm, result.sup_norm, 1e-300)
        mean = float(rho_array @ values)
        if abs(mean) > CENTERING_TOLERANCE * scale:
            raise NotCenteredError(mean)
        object.__setattr__(result, "centered_against", _frozen(rho_array))
        return result

    def with_values(self, values: npt.ArrayLike) -> "ScalarField":
        return ScalarField(self.states, np.asarray(values, dtype=np.float64))

    def as_dict(self) -> dict[str, float]:
        return {s: float(v) for s, v in zip(self.states, self.values, strict=True)}
