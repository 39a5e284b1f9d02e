import argparse
import dataclasses
import math

from potentials.application.potential_theory import MfptMethod, QuasipotentialMethod
from potentials.application.settings import EngineSettings, ForestMode
from potentials.domain.tolerances import Tolerances
from potentials.domain.trajectory import EscapeStop, HitStop, HorizonStop, StopRule
from potentials.infrastructure.files.reports import ReportFormat
from potentials.infrastructure.log.main import LOGGING_LEVELS

GRID_SLACK = 1e-9


def finite_float(raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        msg = f"not a number: {raw!r}"
        raise argparse.ArgumentTypeError(msg) from None
    if not math.isfinite(value):
        msg = f"not a finite number: {raw!r}"
        raise argparse.ArgumentTypeError(msg)
    return value


def positive_int(raw: str) -> int:
    try:
        value = int(raw)
    except ValueError:
        msg = f"not an integer: {raw!r}"
        raise argparse.ArgumentTypeError(msg) from None
    if value < 1:
        msg = f"must be at least 1, got {value}"
        raise argparse.ArgumentTypeError(msg)
    return value


def non_negative_int(raw: str) -> int:
    if raw.strip() == "0":
        return 0
    return positive_int(raw)


def state_list(raw: str) -> tuple[str, ...]:
    states = tuple(s.strip() for s in raw.split(",") if s.strip())
    if not states:
        msg = "expected a comma-separated list of states"
        raise argparse.ArgumentTypeError(msg)
    return states


def state_pair(raw: str) -> tuple[str, str]:
    states = state_list(raw)
    if len(states) != 2:  # noqa: PLR2004
        msg = f"expected two states 'x,y', got {raw!r}"
        raise argparse.ArgumentTypeError(msg)
    return states[0], states[1]


def lambda_grid(raw: str) -> tuple[float, ...]:
    """``a:b:step`` with both ends included, or a single value"""
    parts = raw.split(":")
    if len(parts) == 1:
        return (finite_float(parts[0]),)
    if len(parts) != 3:  # noqa: PLR2004
        msg = f"expected a:b:step, got {raw!r}"
        raise argparse.ArgumentTypeError(msg)
    start, stop, step = (finite_float(p) for p in parts)
    if step <= 0 or stop < start:
        msg = f"expected a <= b and step > 0, got {raw!r}"
        raise argparse.ArgumentTypeError(msg)
    count = math.floor((stop - start) / step + GRID_SLACK) + 1
    return tuple(start + i * step for i in range(count))


def tolerance_override(raw: str) -> tuple[str, float]:
    name, sep, value = raw.partition("=")
    if not sep:
        msg = f"expected name=value, got {raw!r}"
        raise argparse.ArgumentTypeError(msg)
    name = name.strip()
    if name not in Tolerances.names():
        msg = f"unknown tolerance {name!r}; known: {', '.join(Tolerances.names())}"
        raise argparse.ArgumentTypeError(msg)
    number = finite_float(value)
    if number <= 0:
        msg = f"tolerance {name} must be > 0, got {value}"
        raise argparse.ArgumentTypeError(msg)
    return name, number


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    group = common.add_argument_group("global options")
    group.add_argument(
        "--format",
        choices=[f.value for f in ReportFormat],
        default=ReportFormat.TABLE.value,
    )
    group.add_argument("--out", help="write the report here instead of stdout")
    group.add_argument("--seed", type=int, default=0)
    group.add_argument(
        "--tol",
        type=tolerance_override,
        action="append",
        default=[],
        metavar="NAME=VALUE",
    )
    group.add_argument("--enumeration-cap", type=positive_int)
    group.add_argument(
        "--forest-mode",
        choices=[m.value for m in ForestMode],
    )
    group.add_argument("--workers", type=positive_int)
    group.add_argument("--log-level", choices=LOGGING_LEVELS)
    return common


def _graph_command(
    commands: argparse._SubParsersAction,  # type: ignore[type-arg]
    name: str,
    common: argparse.ArgumentParser,
    help_text: str,
) -> argparse.ArgumentParser:
    command = commands.add_parser(name, parents=[common], help=help_text)
    command.add_argument("graph", help="graph JSON file")
    command.add_argument(
        "--at",
        type=finite_float,
        metavar="LAMBDA",
        help="evaluate a parameterized graph at this lambda",
    )
    return command


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="potentials",
        description="Forest formulas, Poisson equations and first-passage "
        "times for finite Markov jump processes",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    _graph_command(commands, "stationary", common, "stationary distribution")

    quasipotential = _graph_command(
        commands,
        "quasipotential",
        common,
        "centered solution of LV + f = 0",
    )
    quasipotential.add_argument("--f", dest="field", required=True)
    quasipotential.add_argument(
        "--method",
        choices=[m.value for m in QuasipotentialMethod],
        action="append",
    )
    quasipotential.add_argument(
        "--no-center",
        action="store_true",
        help="reject a source with nonzero stationary mean",
    )

    mfpt = _graph_command(commands, "mfpt", common, "mean first-passage times")
    mfpt.add_argument(
        "--method",
        choices=[m.value for m in MfptMethod],
        action="append",
    )

    escape = _graph_command(commands, "escape", common, "mean escape times from H")
    escape.add_argument("--H", dest="interior", type=state_list, required=True)

    bounds = _graph_command(commands, "bounds", common, "quasipotential bounds")
    bounds.add_argument("--f", dest="field", required=True)
    bounds.add_argument("--E", dest="decomposition", help="E in f = LE + h")
    bounds.add_argument(
        "--D",
        dest="support",
        type=state_list,
        help="states where h may be nonzero",
    )
    bounds.add_argument("--pair", type=state_pair, action="append")

    sweep = commands.add_parser(
        "sweep",
        parents=[common],
        help="global bound along a lambda grid",
    )
    sweep.add_argument("graph", help="parameterized graph JSON file")
    sweep.add_argument(
        "--lambda",
        dest="lambdas",
        type=lambda_grid,
        required=True,
        metavar="A:B:STEP",
    )
    sweep.add_argument("--f", dest="field")

    validate = commands.add_parser(
        "validate",
        parents=[common],
        help="identity suite with the Monte Carlo oracle",
    )
    validate.add_argument("graphs", nargs="*", help="extra graph files")
    validate.add_argument("--n-random", type=non_negative_int, default=20)
    validate.add_argument("--mc-samples", type=positive_int, default=10_000)

    _graph_command(commands, "kemeny", common, "Kemeny constant")

    simulate = _graph_command(commands, "simulate", common, "sample trajectories")
    simulate.add_argument("--from", dest="start", required=True)
    stop = simulate.add_mutually_exclusive_group(required=True)
    stop.add_argument("--horizon", type=finite_float)
    stop.add_argument("--to", dest="target")
    stop.add_argument("--escape", type=state_list, metavar="H")
    simulate.add_argument("--count", type=positive_int, default=10)

    return parser


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "bounds" and (args.decomposition is None) != (
        args.support is None
    ):
        parser.error("--E and --D must be given together")
    if args.command == "simulate" and args.horizon is not None and args.horizon <= 0:
        parser.error(f"--horizon must be positive, got {args.horizon}")
    return args


def stop_rule(args: argparse.Namespace) -> StopRule:
    if args.horizon is not None:
        return HorizonStop(args.horizon)
    if args.target is not None:
        return HitStop(args.target)
    return EscapeStop(frozenset(args.escape))


def engine_overrides(
    args: argparse.Namespace,
    settings: EngineSettings,
) -> EngineSettings:
    changes: dict[str, object] = {}
    if args.enumeration_cap is not None:
        changes["enumeration_cap"] = args.enumeration_cap
    if args.forest_mode is not None:
        changes["forest_mode"] = ForestMode(args.forest_mode)
    if args.workers is not None:
        changes["workers"] = args.workers
    if args.tol:
        changes["tolerances"] = dataclasses.replace(
            settings.tolerances,
            **dict(args.tol),
        )
    return dataclasses.replace(settings, **changes)  # type: ignore[arg-type]
