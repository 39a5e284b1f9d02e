from collections.abc import Mapping
from dataclasses import dataclass
from os import environ
from typing import cast

from potentials.application.exceptions.base import InvalidSettingError
from potentials.application.settings import DumpSettings, EngineSettings
from potentials.infrastructure.log.main import LOGGING_LEVELS, LoggingLevel

PREFIX = "POTENTIALS_"


def _int(
    env: Mapping[str, str],
    name: str,
    default: int,
    minimum: int,
) -> int:
    raw = env.get(PREFIX + name)
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise InvalidSettingError(PREFIX + name, raw) from None
    if value < minimum:
        raise InvalidSettingError(PREFIX + name, raw)
    return value


def load_engine_settings(env: Mapping[str, str]) -> EngineSettings:
    return EngineSettings(
        enumeration_cap=_int(env, "ENUMERATION_CAP", 10, 2),
        enumeration_budget=_int(env, "ENUMERATION_BUDGET", 200_000, 1),
        minor_sum_cap=_int(env, "MINOR_SUM_CAP", 14, 0),
        workers=_int(env, "WORKERS", 1, 1),
    )


def load_dump_settings(env: Mapping[str, str]) -> DumpSettings:
    return DumpSettings(
        forest_path=env.get(PREFIX + "FOREST_DUMP") or None,
        trajectory_path=env.get(PREFIX + "TRAJECTORY_DUMP") or None,
        trajectory_cap=_int(env, "TRAJECTORY_DUMP_CAP", 100, 0),
    )


def load_log_level(env: Mapping[str, str]) -> LoggingLevel:
    raw = env.get(PREFIX + "LOG_LEVEL", "INFO").upper()
    if raw not in LOGGING_LEVELS:
        raise InvalidSettingError(PREFIX + "LOG_LEVEL", raw)
    return cast(LoggingLevel, raw)


@dataclass(frozen=True)
class Config:
    engine: EngineSettings
    dumps: DumpSettings
    log_level: LoggingLevel


def load_settings(env: Mapping[str, str] | None = None) -> Config:
    env = environ if env is None else env
    return Config(
        engine=load_engine_settings(env),
        dumps=load_dump_settings(env),
        log_level=load_log_level(env),
    )
