import logging
import sys
from collections.abc import Callable
from functools import partial

from potentials.application.exceptions.base import (
    ApplicationError,
    InputError,
    NumericalError,
)
from potentials.domain.common.exceptions import AppError, DomainError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

ErrorHandler = Callable[[Exception], int]


def setup_exception_handlers() -> dict[type[Exception], ErrorHandler]:
    return {
        DomainError: error_handler(EXIT_USAGE),
        InputError: error_handler(EXIT_USAGE),
        NumericalError: error_handler(EXIT_FAILURE),
        ApplicationError: error_handler(EXIT_FAILURE),
        Exception: unknown_exception_handler,
    }


def error_handler(exit_code: int) -> ErrorHandler:
    return partial(app_error_handler, exit_code=exit_code)


def app_error_handler(err: AppError, exit_code: int) -> int:
    return handle_error(err=err, exit_code=exit_code)


def unknown_exception_handler(err: Exception) -> int:
    logger.exception("Unknown error occurred", exc_info=err)
    text = err.args[0] if len(err.args) > 0 else "Unknown error"
    print(f"error: {err.__class__.__name__}: {text}", file=sys.stderr)  # noqa: T201
    return EXIT_FAILURE


def handle_error(err: AppError, exit_code: int) -> int:
    logger.error("Handle error", exc_info=err, extra={"error": err})
    print(f"error: {err.message}", file=sys.stderr)  # noqa: T201
    return exit_code


def handle_exception(
    err: Exception,
    handlers: dict[type[Exception], ErrorHandler] | None = None,
) -> int:
    """Exit code of the handler registered for the closest base class"""
    handlers = setup_exception_handlers() if handlers is None else handlers
    for cls in type(err).__mro__:
        if cls in handlers:
            return handlers[cls](err)
    return unknown_exception_handler(err)
