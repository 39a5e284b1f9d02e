from dataclasses import dataclass

from potentials.domain.common.exceptions import AppError


@dataclass(eq=False)
class ApplicationError(AppError):

    @property
    def message(self) -> str:
        return "An application error occurred"


@dataclass(eq=False)
class InputError(ApplicationError):
    """Request cannot be served as posed"""

    @property
    def message(self) -> str:
        return "Invalid input"


@dataclass(eq=False)
class NumericalError(ApplicationError):
    """An identity or solve failed beyond tolerance"""

    @property
    def message(self) -> str:
        return "Numerical failure"


@dataclass(eq=False)
class GraphFileError(InputError):
    path: str
    reason: str

    @property
    def message(self) -> str:
        return f"Cannot read '{self.path}': {self.reason}"


@dataclass(eq=False)
class InvalidSettingError(InputError):
    name: str
    value: object

    @property
    def message(self) -> str:
        return f"Invalid value {self.value!r} for setting '{self.name}'"


@dataclass(eq=False)
class CapExceededError(InputError):
    n: int
    cap: int

    @property
    def message(self) -> str:
        return (
            f"Enumeration needs n <= {self.cap} states, graph has {self.n}; "
            f"use the algebraic route or raise the cap"
        )


@dataclass(eq=False)
class EmptyInteriorError(InputError):

    @property
    def message(self) -> str:
        return "Interior set H is empty"


@dataclass(eq=False)
class NotProperSubsetError(InputError):
    size: int

    @property
    def message(self) -> str:
        return (
            f"H must be a nonempty proper subset of the states, "
            f"got {self.size} of them"
        )


@dataclass(eq=False)
class SamePointError(InputError):
    state: str

    @property
    def message(self) -> str:
        return f"Start and target coincide at '{self.state}'"


@dataclass(eq=False)
class TooFewSamplesError(InputError):
    count: int
    minimum: int

    @property
    def message(self) -> str:
        return f"Need at least {self.minimum} samples, got {self.count}"


@dataclass(eq=False)
class DecompositionInvalidError(InputError):
    state: str
    value: float

    @property
    def message(self) -> str:
        return (
            f"h = f - LE does not vanish outside D: h({self.state}) = "
            f"{self.value:.6g}"
        )


@dataclass(eq=False)
class HorizonTooShortError(InputError):
    horizon: float
    minimum: float

    @property
    def message(self) -> str:
        return (
            f"Horizon {self.horizon:.6g} is below 5/gap = {self.minimum:.6g}; "
            f"the truncation bias would not be negligible"
        )


@dataclass(eq=False)
class PairListRequiredError(InputError):
    n: int

    @property
    def message(self) -> str:
        return f"With {self.n} states an explicit pair list is required"


@dataclass(eq=False)
class XDependenceDetectedError(NumericalError):
    quantity: str
    residual: float

    @property
    def message(self) -> str:
        return (
            f"{self.quantity} depends on the reference state "
            f"(relative spread {self.residual:.3g})"
        )


@dataclass(eq=False)
class SingularBeyondNullityError(NumericalError):
    rank: int
    n: int

    @property
    def message(self) -> str:
        return (
            f"Generator has numerical rank {self.rank} < {self.n - 1}; "
            f"the input is not irreducible"
        )


@dataclass(eq=False)
class NegativeResolventError(NumericalError):
    alpha: float
    value: float

    @property
    def message(self) -> str:
        return (
            f"Resolvent at alpha={self.alpha!r} has entry {self.value:.3g}; "
            f"a Markov kernel cannot be negative"
        )


@dataclass(eq=False)
class SingularStoppedGeneratorError(NumericalError):
    size: int

    @property
    def message(self) -> str:
        return f"Stopped generator block of size {self.size} is singular"


@dataclass(eq=False)
class ValidationFailedError(NumericalError):
    failed: list[str]

    @property
    def message(self) -> str:
        return "Failed checks: " + ", ".join(self.failed)
