import dataclasses
import logging
from argparse import Namespace

import structlog
from dotenv import load_dotenv

from potentials.bootstrap.configs import Config, load_settings
from potentials.bootstrap.ioc.containers import cli_container
from potentials.infrastructure.files.reports import ReportFormat, ReportWriter
from potentials.infrastructure.log.main import configure_logging
from potentials.presentation.cli.commands import COMMANDS, require_success
from potentials.presentation.cli.parser import engine_overrides, parse_args
from potentials.presentation.cli.rendering import tables
from potentials.presentation.exceptions import EXIT_OK, EXIT_USAGE, handle_exception

logger = logging.getLogger(__name__)


def run(args: Namespace, config: Config) -> int:
    container = cli_container(config)
    try:
        with container() as request_container:
            result = COMMANDS[args.command](args, request_container)
            writer = request_container.get(ReportWriter)
            payload = writer.render(result, tables(result), ReportFormat(args.format))
            writer.write(payload, args.out)
        require_success(result)
    except Exception as err:  # noqa: BLE001
        return handle_exception(err)
    finally:
        container.close()
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    load_dotenv()
    try:
        args = parse_args(argv)
    except SystemExit as exit_:
        if exit_.code is None:
            return EXIT_OK
        return exit_.code if isinstance(exit_.code, int) else EXIT_USAGE

    try:
        config = load_settings()
    except Exception as err:  # noqa: BLE001
        configure_logging(args.log_level or "INFO")
        return handle_exception(err)
    configure_logging(args.log_level or config.log_level)
    config = dataclasses.replace(config, engine=engine_overrides(args, config.engine))

    with structlog.contextvars.bound_contextvars(
        command=args.command,
        seed=args.seed,
    ):
        logger.info("Running %s", args.command)
        return run(args, config)


if __name__ == "__main__":
    raise SystemExit(main())
