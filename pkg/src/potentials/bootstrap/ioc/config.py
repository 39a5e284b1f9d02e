from dishka import Provider, Scope, from_context

from potentials.application.settings import DumpSettings, EngineSettings


class AppConfigProvider(Provider):
    scope = Scope.APP

    engine_settings = from_context(EngineSettings)
    dump_settings = from_context(DumpSettings)
