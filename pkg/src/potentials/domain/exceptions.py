from dataclasses import dataclass

from potentials.domain.common.exceptions import DomainError


@dataclass(eq=False)
class GraphError(DomainError):
    """Rate data violates a structural invariant"""

    @property
    def message(self) -> str:
        return "Invalid rate graph"


@dataclass(eq=False)
class TooFewStatesError(GraphError):
    count: int

    @property
    def message(self) -> str:
        return f"A rate graph needs at least 2 states, got {self.count}"


@dataclass(eq=False)
class DuplicateStateError(GraphError):
    state: str

    @property
    def message(self) -> str:
        return f"State '{self.state}' is listed more than once"


@dataclass(eq=False)
class DuplicateArcError(GraphError):
    source: str
    target: str

    @property
    def message(self) -> str:
        return f"Arc ({self.source!r}, {self.target!r}) is given more than once"


@dataclass(eq=False)
class SelfLoopError(GraphError):
    state: str

    @property
    def message(self) -> str:
        return f"Self-arc on state '{self.state}' is not allowed"


@dataclass(eq=False)
class NonpositiveRateError(GraphError):
    source: str
    target: str
    rate: float

    @property
    def message(self) -> str:
        return (
            f"Arc ({self.source!r}, {self.target!r}) has rate {self.rate}; "
            f"rates must be strictly positive and finite"
        )


@dataclass(eq=False)
class InvalidPrefactorError(GraphError):
    source: str
    target: str
    prefactor: float

    @property
    def message(self) -> str:
        return (
            f"Arc ({self.source!r}, {self.target!r}) has prefactor "
            f"{self.prefactor}; prefactors must be strictly positive"
        )


@dataclass(eq=False)
class UnknownStateError(GraphError):
    state: str
    context: str = "arc"

    @property
    def message(self) -> str:
        return f"Unknown state '{self.state}' referenced by {self.context}"


@dataclass(eq=False)
class NotStronglyConnectedError(GraphError):
    source: str
    target: str

    @property
    def message(self) -> str:
        return (
            f"Graph is not strongly connected: no directed path "
            f"from '{self.source}' to '{self.target}'"
        )


@dataclass(eq=False)
class MixedArcFormsError(GraphError):
    source: str
    target: str

    @property
    def message(self) -> str:
        return (
            f"Arc ({self.source!r}, {self.target!r}) mixes forms: a file "
            f"uses either 'rate' or 'prefactor'/'barrier' for every arc"
        )


@dataclass(eq=False)
class FieldError(DomainError):

    @property
    def message(self) -> str:
        return "Invalid scalar field"


@dataclass(eq=False)
class MissingStateError(FieldError):
    state: str

    @property
    def message(self) -> str:
        return f"Scalar field has no value for state '{self.state}'"


@dataclass(eq=False)
class NonNumericValueError(FieldError):
    state: str
    value: object

    @property
    def message(self) -> str:
        return f"Value {self.value!r} for state '{self.state}' is not a number"


@dataclass(eq=False)
class StateMismatchError(FieldError):
    expected: int
    actual: int

    @property
    def message(self) -> str:
        return (
            f"Field has {self.actual} values but the graph has "
            f"{self.expected} states"
        )


@dataclass(eq=False)
class NotCenteredError(FieldError):
    mean: float

    @property
    def message(self) -> str:
        return (
            f"Source is not centered: stationary mean is {self.mean:.6g} "
            f"(enable auto-centering or subtract it)"
        )


@dataclass(eq=False)
class InvalidGeneratorError(DomainError):
    row: int
    detail: str

    @property
    def message(self) -> str:
        return f"Row {self.row} is not a generator row: {self.detail}"


@dataclass(eq=False)
class InvalidBarrierError(GraphError):
    source: str
    target: str
    barrier: float

    @property
    def message(self) -> str:
        return (
            f"Arc ({self.source!r}, {self.target!r}) has barrier "
            f"{self.barrier}; barriers must be finite"
        )
