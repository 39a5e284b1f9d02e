import logging
from argparse import Namespace
from collections.abc import Callable

from dishka import Container

from potentials.application.exceptions.base import ValidationFailedError
from potentials.application.interactors.bounds import (
    BoundsInteractor,
    BoundsRequest,
    BoundsResult,
)
from potentials.application.interactors.escape import EscapeInteractor, EscapeRequest
from potentials.application.interactors.kemeny import KemenyInteractor, KemenyRequest
from potentials.application.interactors.mfpt import MfptInteractor, MfptRequest
from potentials.application.interactors.quasipotential import (
    QuasipotentialInteractor,
    QuasipotentialRequest,
)
from potentials.application.interactors.simulate import (
    SimulateInteractor,
    SimulateRequest,
)
from potentials.application.interactors.stationary import (
    StationaryInteractor,
    StationaryRequest,
)
from potentials.application.interactors.sweep import SweepInteractor, SweepRequest
from potentials.application.interactors.validate import (
    ValidateInteractor,
    ValidateRequest,
)
from potentials.application.potential_theory import MfptMethod, QuasipotentialMethod
from potentials.domain.reports import ValidationReport
from potentials.presentation.cli.parser import stop_rule

logger = logging.getLogger(__name__)

Command = Callable[[Namespace, Container], object]


def stationary(args: Namespace, container: Container) -> object:
    interactor = container.get(StationaryInteractor)
    return interactor(StationaryRequest(graph_path=args.graph, lam=args.at))


def quasipotential(args: Namespace, container: Container) -> object:
    interactor = container.get(QuasipotentialInteractor)
    methods = args.method or [m.value for m in QuasipotentialMethod]
    return interactor(
        QuasipotentialRequest(
            graph_path=args.graph,
            field_path=args.field,
            lam=args.at,
            auto_center=not args.no_center,
            methods=tuple(QuasipotentialMethod(m) for m in dict.fromkeys(methods)),
        ),
    )


def mfpt(args: Namespace, container: Container) -> object:
    interactor = container.get(MfptInteractor)
    methods = args.method or [m.value for m in MfptMethod]
    return interactor(
        MfptRequest(
            graph_path=args.graph,
            lam=args.at,
            methods=tuple(MfptMethod(m) for m in dict.fromkeys(methods)),
        ),
    )


def escape(args: Namespace, container: Container) -> object:
    interactor = container.get(EscapeInteractor)
    return interactor(
        EscapeRequest(graph_path=args.graph, interior=args.interior, lam=args.at),
    )


def bounds(args: Namespace, container: Container) -> object:
    interactor = container.get(BoundsInteractor)
    return interactor(
        BoundsRequest(
            graph_path=args.graph,
            field_path=args.field,
            lam=args.at,
            decomposition_path=args.decomposition,
            decomposition_states=args.support,
            pairs=tuple(args.pair) if args.pair else None,
        ),
    )


def sweep(args: Namespace, container: Container) -> object:
    interactor = container.get(SweepInteractor)
    return interactor(
        SweepRequest(
            graph_path=args.graph,
            lambdas=args.lambdas,
            field_path=args.field,
        ),
    )


def validate(args: Namespace, container: Container) -> object:
    interactor = container.get(ValidateInteractor)
    return interactor(
        ValidateRequest(
            graph_paths=tuple(args.graphs),
            n_random=args.n_random,
            seed=args.seed,
            mc_samples=args.mc_samples,
        ),
    )


def kemeny(args: Namespace, container: Container) -> object:
    interactor = container.get(KemenyInteractor)
    return interactor(KemenyRequest(graph_path=args.graph, lam=args.at))


def simulate(args: Namespace, container: Container) -> object:
    interactor = container.get(SimulateInteractor)
    return interactor(
        SimulateRequest(
            graph_path=args.graph,
            start=args.start,
            stop=stop_rule(args),
            count=args.count,
            seed=args.seed,
            lam=args.at,
        ),
    )


COMMANDS: dict[str, Command] = {
    "stationary": stationary,
    "quasipotential": quasipotential,
    "mfpt": mfpt,
    "escape": escape,
    "bounds": bounds,
    "sweep": sweep,
    "validate": validate,
    "kemeny": kemeny,
    "simulate": simulate,
}


def require_success(result: object) -> None:
    """Raise when a written report carries failed checks"""
    if isinstance(result, ValidationReport) and not result.passed:
        raise ValidationFailedError([check.name for check in result.failures])
    if isinstance(result, BoundsResult) and not result.passed:
        raise ValidationFailedError(
            [
                f"{report.kind.value} {row.label}"
                for report in result.reports
                for row in report.rows
                if not row.passed
            ],
        )
