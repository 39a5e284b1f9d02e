import logging
from collections.abc import Iterator

from adaptix import Retort
from dishka import Provider, Scope, provide

from potentials.application.graph_store import GraphStore
from potentials.application.settings import DumpSettings
from potentials.application.sinks import ForestSink, TrajectorySink
from potentials.infrastructure.dumps.jsonlines import (
    JsonLinesForestSink,
    JsonLinesTrajectorySink,
)
from potentials.infrastructure.files.json_store import JsonGraphStore
from potentials.infrastructure.files.reports import ReportWriter

logger = logging.getLogger(__name__)


class InfrastructureProvider(Provider):
    scope = Scope.REQUEST

    @provide(scope=Scope.APP)
    def get_graph_store(self) -> GraphStore:
        return JsonGraphStore()

    @provide(scope=Scope.APP)
    def get_report_retort(self) -> Retort:
        return Retort()

    @provide(scope=Scope.APP)
    def get_report_writer(self, retort: Retort) -> ReportWriter:
        return ReportWriter(retort=retort)

    @provide(scope=Scope.APP)
    def get_forest_sink(self, dumps: DumpSettings) -> Iterator[ForestSink]:
        sink = JsonLinesForestSink(dumps.forest_path)
        logger.debug("Forest sink was initialized")
        yield sink
        sink.close()
        logger.debug("Forest sink was closed")

    @provide(scope=Scope.APP)
    def get_trajectory_sink(self, dumps: DumpSettings) -> Iterator[TrajectorySink]:
        sink = JsonLinesTrajectorySink(dumps.trajectory_path)
        logger.debug("Trajectory sink was initialized")
        yield sink
        sink.close()
        logger.debug("Trajectory sink was closed")
