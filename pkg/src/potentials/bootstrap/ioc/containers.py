import logging

from dishka import Container, make_container

from potentials.application.settings import DumpSettings, EngineSettings
from potentials.bootstrap.configs import Config
from potentials.bootstrap.ioc.application import ApplicationProvider
from potentials.bootstrap.ioc.config import AppConfigProvider
from potentials.bootstrap.ioc.infrastructure import InfrastructureProvider

logger = logging.getLogger(__name__)


def cli_container(
    config: Config,
) -> Container:
    logger.debug("CLI DI setup")

    return make_container(
        AppConfigProvider(),
        InfrastructureProvider(),
        ApplicationProvider(),
        context={
            EngineSettings: config.engine,
            DumpSettings: config.dumps,
        },
    )
