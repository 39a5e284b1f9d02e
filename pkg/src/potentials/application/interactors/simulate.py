import logging
import math
from dataclasses import dataclass

import numpy as np

from potentials.application.exceptions.base import TooFewSamplesError
from potentials.application.graph_store import GraphStore
from potentials.application.interactors.graphs import load_rate_graph
from potentials.application.settings import DumpSettings
from potentials.application.sinks import TrajectorySink
from potentials.application.trajectory_oracle import sample_paths
from potentials.domain.trajectory import StopRule, TerminationReason

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True, kw_only=True)
class SimulateRequest:
    graph_path: str
    start: str
    stop: StopRule
    count: int
    seed: int
    lam: float | None = None


@dataclass(frozen=True, slots=True)
class PathSummary:
    terminal: str
    reason: TerminationReason
    duration: float
    jumps: int


@dataclass(frozen=True, slots=True)
class SimulationResult:
    start: str
    seed: int
    paths: list[PathSummary]
    mean_duration: float
    stderr: float
    dumped: int


@dataclass(slots=True, frozen=True)
class SimulateInteractor:
    store: GraphStore
    dumps: DumpSettings
    trajectory_sink: TrajectorySink

    def __call__(self, request_data: SimulateRequest) -> SimulationResult:
        logger.info(
            "Sampling %s path(s) from %s: %s",
            request_data.count,
            request_data.start,
            request_data.graph_path,
        )

        if request_data.count < 1:
            raise TooFewSamplesError(count=request_data.count, minimum=1)
        g = load_rate_graph(self.store, request_data.graph_path, request_data.lam)
        dumping = self.dumps.trajectory_path is not None
        trajectories = sample_paths(
            g,
            request_data.start,
            request_data.stop,
            request_data.count,
            request_data.seed,
            sink=self.trajectory_sink if dumping else None,
            dump_cap=self.dumps.trajectory_cap,
        )
        durations = np.array([t.duration for t in trajectories])
        mean = float(np.mean(durations))
        stderr = (
            float(np.std(durations, ddof=1) / math.sqrt(durations.size))
            if durations.size > 1
            else 0.0
        )

        dumped = min(len(trajectories), self.dumps.trajectory_cap) if dumping else 0
        logger.info("Sampled %s path(s), %s dumped", len(trajectories), dumped)
        return SimulationResult(
            start=request_data.start,
            seed=request_data.seed,
            paths=[
                PathSummary(
                    terminal=t.terminal,
                    reason=t.reason,
                    duration=t.duration,
                    jumps=len(t.jumps),
                )
                for t in trajectories
            ],
            mean_duration=mean,
            stderr=stderr,
            dumped=dumped,
        )
