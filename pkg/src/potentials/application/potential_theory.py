import logging
import math
from collections.abc import Collection
from dataclasses import dataclass
from enum import Enum

import numpy as np
import numpy.typing as npt
from scipy import linalg

from potentials.application.exceptions.base import (
    EmptyInteriorError,
    NotProperSubsetError,
    SingularStoppedGeneratorError,
)
from potentials.application.forest_engine import two_tree_matrices, tree_weight_vector
from potentials.application.graph_core import generator
from potentials.application.settings import DEFAULT_SETTINGS, EngineSettings
from potentials.application.spectral_algebra import (
    group_inverse,
    integrated_semigroup,
    semigroup_apply,
    spectral_gap,
    stationary_distribution,
)
from potentials.domain.exceptions import NotCenteredError, StateMismatchError
from potentials.domain.graph import (
    CENTERING_TOLERANCE,
    FloatArray,
    RateGraph,
    ScalarField,
)

logger = logging.getLogger(__name__)

MAX_DOUBLINGS = 60


class QuasipotentialMethod(str, Enum):
    LINEAR = "linear"
    FOREST = "forest"
    INTEGRAL = "integral"


class MfptMethod(str, Enum):
    LINEAR = "linear"
    FOREST = "forest"
    GROUP_INVERSE = "group_inverse"


@dataclass(frozen=True, slots=True, eq=False)
class AbsorbingProblem:
    """LU + f = 0 on the interior H, U = boundary outside H.

    ``f`` is given on every state; values outside H are ignored.
    A missing ``boundary`` means zero.
    """

    g: RateGraph
    interior: frozenset[str]
    f: ScalarField
    boundary: ScalarField | None = None

    def __post_init__(self) -> None:
        if not self.interior:
            raise EmptyInteriorError()
        self.g.indices(self.interior)
        for field in (self.f, self.boundary):
            if field is not None and field.states != self.g.states:
                raise StateMismatchError(self.g.n, len(field.states))

    @property
    def full(self) -> bool:
        return len(self.interior) == self.g.n

    def split(self) -> tuple[list[int], list[int]]:
        inside = sorted(self.g.indices(self.interior))
        members = set(inside)
        outside = [i for i in range(self.g.n) if i not in members]
        return inside, outside


@dataclass(frozen=True, slots=True, eq=False)
class MfptMatrix:
    """τ(x, z): row x is the start, column z the target"""

    states: tuple[str, ...]
    matrix: FloatArray
    method: MfptMethod

    def __getitem__(self, pair: tuple[str, str]) -> float:
        x, z = pair
        return float(self.matrix[self.states.index(x), self.states.index(z)])

    def column(self, z: str) -> ScalarField:
        return ScalarField(self.states, self.matrix[:, self.states.index(z)])


@dataclass(frozen=True, slots=True)
class KemenyResult:
    value: float
    max_spread: float
    per_state: tuple[float, ...]


def proper_subset(g: RateGraph, interior: Collection[str]) -> frozenset[str]:
    subset = frozenset(interior)
    if not subset:
        raise EmptyInteriorError()
    g.indices(subset)
    if len(subset) == g.n:
        raise NotProperSubsetError(size=len(subset))
    return subset


def poisson_residual(
    g: RateGraph,
    u: npt.ArrayLike,
    f: npt.ArrayLike,
    interior: Collection[str] | None = None,
) -> float:
    """max_{x∈H} |LU(x) + f(x)| relative to ‖L‖‖U‖ + ‖f‖"""
    L = generator(g)
    u_values = np.asarray(u, dtype=np.float64)
    f_values = np.asarray(f, dtype=np.float64)
    rows = range(g.n) if interior is None else sorted(g.indices(interior))
    residual = (L.matrix @ u_values + f_values)[list(rows)]
    scale = L.norm * np.max(np.abs(u_values)) + np.max(np.abs(f_values))
    if scale == 0:
        return float(np.max(np.abs(residual)))
    return float(np.max(np.abs(residual)) / scale)


def solve_general_poisson(
    p: AbsorbingProblem,
    settings: EngineSettings = DEFAULT_SETTINGS,
) -> ScalarField:
    """Solve on the stopped generator: rows restricted to H, boundary terms
    moved to the right-hand side"""
    if p.full:
        return quasipotential(p.g, p.f, settings=settings)
    inside, outside = p.split()
    L = generator(p.g).matrix
    u = np.zeros(p.g.n)
    if p.boundary is not None:
        u[outside] = p.boundary.values[outside]
    block = L[np.ix_(inside, inside)]
    rhs = -p.f.values[inside] - L[np.ix_(inside, outside)] @ u[outside]
    factors = linalg.lu_factor(block)
    pivots = np.abs(np.diag(factors[0]))
    if not np.all(pivots > np.finfo(float).eps * np.max(np.abs(block))):
        raise SingularStoppedGeneratorError(size=len(inside))
    u[inside] = linalg.lu_solve(factors, rhs)
    return ScalarField(p.g.states, u)


def stopped_accumulation(
    p: AbsorbingProblem,
    settings: EngineSettings = DEFAULT_SETTINGS,
) -> ScalarField:
    """V_H: expected accumulation of f until escape from H"""
    if p.full:
        raise NotProperSubsetError(size=len(p.interior))
    zero = AbsorbingProblem(p.g, p.interior, p.f)
    return solve_general_poisson(zero, settings)


def mean_escape_time(
    g: RateGraph,
    interior: Collection[str],
    settings: EngineSettings = DEFAULT_SETTINGS,
) -> ScalarField:
    subset = proper_subset(g, interior)
    ones = ScalarField.constant(g.states, 1.0)
    return stopped_accumulation(AbsorbingProblem(g, subset, ones), settings)


def escape_sum_rule_residual(
    g: RateGraph,
    interior: Collection[str],
    settings: EngineSettings = DEFAULT_SETTINGS,
) -> float:
    """|Σ_{x∉H, y∈H} ρ(x)k(x,y)𝔖_H(y) − ρ(H)|"""
    subset = proper_subset(g, interior)
    rho = stationary_distribution(generator(g)).values
    escape = mean_escape_time(g, subset, settings).values
    inflow = math.fsum(
        rho[g.index(arc.source)] * arc.rate * escape[g.index(arc.target)]
        for arc in g.arcs
        if arc.source not in subset and arc.target in subset
    )
    mass = math.fsum(rho[g.index(state)] for state in subset)
    return abs(inflow - mass)


def center_source(
    f: ScalarField,
    rho: FloatArray,
    *,
    auto_center: bool,
) -> ScalarField:
    mean = f.mean(rho)
    if abs(mean) <= CENTERING_TOLERANCE * max(f.sup_norm, 1e-300):
        return f.centered(rho)
    if not auto_center:
        raise NotCenteredError(mean)
    logger.info("Auto-centering source: subtracting stationary mean %r", mean)
    return f.centered(rho, note=f"subtracted stationary mean {mean!r} from f")


def _linear_quasipotential(L: FloatArray, f: FloatArray, rho: FloatArray) -> FloatArray:
    # the last balance equation is implied by centering; replace it by ⟨V⟩ = 0
    system = L.copy()
    system[-1, :] = rho
    rhs = -f.copy()
    rhs[-1] = 0.0
    return linalg.lu_solve(linalg.lu_factor(system), rhs)


def _integral_quasipotential(
    g: RateGraph,
    f: FloatArray,
    cutoff: float,
) -> tuple[FloatArray, float]:
    L = generator(g)
    norm = float(np.max(np.abs(f)))
    if norm == 0:
        return np.zeros(g.n), 0.0
    gap = spectral_gap(L)
    horizon = -math.log(cutoff) / gap if gap is not None else 1.0 / L.norm
    for _ in range(MAX_DOUBLINGS):
        integral, tail = integrated_semigroup(L, f, horizon)
        if np.max(np.abs(tail)) <= cutoff * norm:
            return integral, horizon
        horizon *= 2.0
    logger.warning("Integral cutoff not reached; stopped at T = %.6g", horizon)
    return integral, horizon


def quasipotential(
    g: RateGraph,
    f: ScalarField,
    method: QuasipotentialMethod = QuasipotentialMethod.LINEAR,
    *,
    auto_center: bool = True,
    settings: EngineSettings = DEFAULT_SETTINGS,
) -> ScalarField:
    """Centered solution V of LV + f = 0"""
    if f.states != g.states:
        raise StateMismatchError(g.n, len(f.states))
    L = generator(g)
    rho = stationary_distribution(L).values
    source = center_source(f, rho, auto_center=auto_center)
    notes = list(source.notes)
    match method:
        case QuasipotentialMethod.LINEAR:
            values = _linear_quasipotential(L.matrix, source.values, rho)
        case QuasipotentialMethod.FOREST:
            same, _ = two_tree_matrices(g, settings)
            _, total = tree_weight_vector(g, settings)
            values = same @ source.values / total
        case QuasipotentialMethod.INTEGRAL:
            values, horizon = _integral_quasipotential(
                g,
                source.values,
                settings.tolerances.integral_cutoff,
            )
            notes.append(f"integral truncated at T = {horizon!r}")
    result = ScalarField(g.states, values, notes=tuple(notes))
    return result.centered(rho)


def _column_times(g: RateGraph, z: int) -> FloatArray:
    interior = frozenset(s for i, s in enumerate(g.states) if i != z)
    ones = ScalarField.constant(g.states, 1.0)
    return stopped_accumulation(AbsorbingProblem(g, interior, ones)).values


def mfpt_matrix(
    g: RateGraph,
    method: MfptMethod = MfptMethod.LINEAR,
    settings: EngineSettings = DEFAULT_SETTINGS,
) -> MfptMatrix:
    match method:
        case MfptMethod.LINEAR:
            tau = np.column_stack([_column_times(g, z) for z in range(g.n)])
        case MfptMethod.FOREST:
            _, split = two_tree_matrices(g, settings)
            weights, _ = tree_weight_vector(g, settings)
            tau = split / weights.values[np.newaxis, :]
        case MfptMethod.GROUP_INVERSE:
            L = generator(g)
            rho = stationary_distribution(L)
            sharp = group_inverse(L, rho).matrix
            tau = (sharp - np.diag(sharp)[np.newaxis, :]) / rho.values
    np.fill_diagonal(tau, 0.0)
    return MfptMatrix(g.states, tau, method)


def mfpt_residual(g: RateGraph, tau: MfptMatrix) -> float:
    """max over columns z of the first-passage Poisson residual, over max τ"""
    L = generator(g).matrix
    residual = L @ tau.matrix + 1.0
    np.fill_diagonal(residual, 0.0)
    return float(np.max(np.abs(residual)) / np.max(tau.matrix))


def quasipotential_from_green(
    g: RateGraph,
    f: ScalarField,
    tau: MfptMatrix | None = None,
    *,
    auto_center: bool = True,
) -> ScalarField:
    """V(x) = −Σ_z ρ(z) f(z) τ(x, z), centered"""
    rho = stationary_distribution(generator(g)).values
    source = center_source(f, rho, auto_center=auto_center)
    if tau is None:
        tau = mfpt_matrix(g)
    values = -(tau.matrix @ (rho * source.values))
    return ScalarField(g.states, values, notes=source.notes).centered(rho)


def difference_form_residual(
    g: RateGraph,
    f: ScalarField,
    v: ScalarField,
    tau: MfptMatrix,
) -> float:
    """max_{x,y} |V(x) − V(y) − Σ_z ρ(z)f(z)(τ(y,z) − τ(x,z))|"""
    rho = stationary_distribution(generator(g)).values
    weighted = tau.matrix @ (rho * f.values)
    lhs = v.values[:, np.newaxis] - v.values[np.newaxis, :]
    rhs = weighted[np.newaxis, :] - weighted[:, np.newaxis]
    scale = max(f.sup_norm * float(np.max(tau.matrix)), 1e-300)
    return float(np.max(np.abs(lhs - rhs)) / scale)


def green_function_residual(g: RateGraph, tau: MfptMatrix) -> float:
    """max_z of |Lτ(·, z) − (g_z − 1)| with g_z = δ_z / ρ(z)"""
    L = generator(g)
    rho = stationary_distribution(L).values
    expected = np.diag(1.0 / rho) - 1.0
    residual = L.matrix @ tau.matrix - expected
    return float(np.max(np.abs(residual)) / np.max(np.abs(expected)))


def kemeny_functional(
    g: RateGraph,
    tau: MfptMatrix | None = None,
) -> KemenyResult:
    """Σ_y ρ(y) τ(x, y) at the first state, with its spread over x"""
    rho = stationary_distribution(generator(g)).values
    if tau is None:
        tau = mfpt_matrix(g)
    per_state = tau.matrix @ rho
    value = float(per_state[0])
    return KemenyResult(
        value=value,
        max_spread=float(np.max(np.abs(per_state - value))),
        per_state=tuple(float(v) for v in per_state),
    )


def pair_accumulation(
    g: RateGraph,
    f: ScalarField,
    x: str,
    y: str,
    *,
    centered: bool = True,
) -> float:
    """Expected accumulation of f (minus its stationary mean when
    ``centered``) from x until the first visit to y"""
    if x == y:
        g.index(x)
        return 0.0
    rho = stationary_distribution(generator(g)).values
    source = f.centered(rho) if centered else f
    interior = frozenset(s for s in g.states if s != y)
    accumulated = stopped_accumulation(AbsorbingProblem(g, interior, source))
    return float(accumulated.values[g.index(x)])


def stopped_spectral_bound(g: RateGraph, interior: Collection[str]) -> float:
    """−max Re λ of the stopped generator on H: the escape-tail decay rate"""
    subset = proper_subset(g, interior)
    inside = sorted(g.indices(subset))
    block = generator(g).matrix[np.ix_(inside, inside)]
    return float(-np.max(np.linalg.eigvals(block).real))


def semigroup_invariance_residual(
    g: RateGraph,
    h: npt.ArrayLike,
    t: float,
) -> float:
    """|⟨e^{tL}h⟩ − ⟨h⟩| relative to ‖h‖"""
    L = generator(g)
    rho = stationary_distribution(L).values
    values = np.asarray(h, dtype=np.float64)
    evolved = semigroup_apply(L, values, t)
    scale = max(float(np.max(np.abs(values))), 1e-300)
    return float(abs(rho @ evolved - rho @ values) / scale)
