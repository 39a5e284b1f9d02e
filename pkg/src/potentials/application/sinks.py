from abc import abstractmethod
from typing import Protocol

from potentials.domain.forest import ForestFamily, RootedForest
from potentials.domain.trajectory import Trajectory


class ForestSink(Protocol):
    """Debug sink for enumerated forests"""

    @abstractmethod
    def write(self, family: ForestFamily, forest: RootedForest) -> None:
        raise NotImplementedError


class TrajectorySink(Protocol):
    """Debug sink for sampled trajectories"""

    @abstractmethod
    def write(self, trajectory: Trajectory) -> None:
        raise NotImplementedError
