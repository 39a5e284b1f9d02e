from dishka import Provider, Scope, provide_all

from potentials.application.interactors.bounds import BoundsInteractor
from potentials.application.interactors.escape import EscapeInteractor
from potentials.application.interactors.kemeny import KemenyInteractor
from potentials.application.interactors.mfpt import MfptInteractor
from potentials.application.interactors.quasipotential import (
    QuasipotentialInteractor,
)
from potentials.application.interactors.simulate import SimulateInteractor
from potentials.application.interactors.stationary import StationaryInteractor
from potentials.application.interactors.sweep import SweepInteractor
from potentials.application.interactors.validate import ValidateInteractor


class ApplicationProvider(Provider):
    interactors = provide_all(
        StationaryInteractor,
        QuasipotentialInteractor,
        MfptInteractor,
        EscapeInteractor,
        BoundsInteractor,
        SweepInteractor,
        ValidateInteractor,
        KemenyInteractor,
        SimulateInteractor,
        scope=Scope.REQUEST,
    )
