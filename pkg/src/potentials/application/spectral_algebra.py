import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy import linalg

from potentials.application.exceptions.base import (
    NegativeResolventError,
    SingularBeyondNullityError,
)
from potentials.domain.graph import FloatArray, GeneratorMatrix, ScalarField
from potentials.domain.reports import ValidationReport
from potentials.domain.tolerances import DEFAULT_TOLERANCES, Tolerances

logger = logging.getLogger(__name__)

ILL_CONDITIONED = 1e12


@dataclass(frozen=True, slots=True, eq=False)
class GroupInverse:
    """X with LXL = L, XLX = X and LX = XL"""

    states: tuple[str, ...]
    matrix: FloatArray


def condition_estimate(matrix: npt.ArrayLike) -> float:
    return float(np.linalg.cond(np.asarray(matrix, dtype=np.float64), 1))


def _warn_conditioning(name: str, matrix: FloatArray) -> float:
    condition = condition_estimate(matrix)
    if not np.isfinite(condition) or condition > ILL_CONDITIONED:
        logger.warning("%s is ill-conditioned: cond_1 = %.3g", name, condition)
    return condition


def _check_nullity(L: GeneratorMatrix) -> None:
    rank = int(np.linalg.matrix_rank(L.matrix))
    if rank < L.n - 1:
        raise SingularBeyondNullityError(rank=rank, n=L.n)


def stationary_distribution(L: GeneratorMatrix) -> ScalarField:
    """Solve ρL = 0, Σρ = 1 by replacing one equation with the
    normalization (bordered system, partial-pivoted LU)"""
    _check_nullity(L)
    system = L.matrix.T.copy()
    system[-1, :] = 1.0
    rhs = np.zeros(L.n)
    rhs[-1] = 1.0
    _warn_conditioning("Stationary system", system)
    rho = linalg.lu_solve(linalg.lu_factor(system), rhs)
    return ScalarField(L.states, rho)


def rank_one_projector(rho: npt.ArrayLike) -> FloatArray:
    """Matrix 1·ρ whose every row is ρ"""
    rho_array = np.asarray(rho, dtype=np.float64)
    return np.tile(rho_array, (rho_array.size, 1))


def resolvent(
    L: GeneratorMatrix,
    alpha: float,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> FloatArray:
    """(I + α𝓛)^{-1} = (I − αL)^{-1}, a stochastic matrix for α > 0.

    Rounding noise below ``resolvent_negativity`` is set to zero; anything
    more negative raises.
    """
    if not alpha > 0:
        msg = f"alpha must be positive, got {alpha}"
        raise ValueError(msg)
    system = np.eye(L.n) - alpha * L.matrix
    _warn_conditioning("Resolvent system", system)
    inverse = linalg.lu_solve(linalg.lu_factor(system), np.eye(L.n))
    smallest = float(np.min(inverse))
    if smallest < -tolerances.resolvent_negativity:
        raise NegativeResolventError(alpha, smallest)
    return np.maximum(inverse, 0.0)


def group_inverse(
    L: GeneratorMatrix,
    rho: ScalarField | None = None,
) -> GroupInverse:
    """L^# = (L + 1·ρ)^{-1} − 1·ρ"""
    if rho is None:
        rho = stationary_distribution(L)
    else:
        _check_nullity(L)
    projector = rank_one_projector(rho.values)
    shifted = L.matrix + projector
    _warn_conditioning("Shifted generator", shifted)
    inverse = linalg.lu_solve(linalg.lu_factor(shifted), np.eye(L.n))
    return GroupInverse(L.states, inverse - projector)


def verify_group_axioms(
    L: GeneratorMatrix,
    X: npt.ArrayLike,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> ValidationReport:
    A = L.matrix
    M = np.asarray(X, dtype=np.float64)
    report = ValidationReport(subject="group inverse axioms")
    threshold = tolerances.group_axiom * L.norm
    report.check("LXL=L", np.max(np.abs(A @ M @ A - A)), threshold)
    report.check("XLX=X", np.max(np.abs(M @ A @ M - M)), threshold)
    report.check("LX=XL", np.max(np.abs(A @ M - M @ A)), threshold)
    return report


def spectral_gap(L: GeneratorMatrix) -> float | None:
    """Smallest nonzero |Re λ| over the spectrum of L; None if unreliable"""
    eigenvalues = np.linalg.eigvals(L.matrix)
    if not np.all(np.isfinite(eigenvalues)):
        return None
    zero = int(np.argmin(np.abs(eigenvalues)))
    rest = np.delete(eigenvalues, zero)
    if rest.size == 0:
        return None
    gap = float(np.min(np.abs(rest.real)))
    if not gap > 0:
        return None
    return gap


def semigroup_apply(L: GeneratorMatrix, h: npt.ArrayLike, t: float) -> FloatArray:
    """e^{tL} h, the conditional expectation of h(X_t)"""
    return linalg.expm(t * L.matrix) @ np.asarray(h, dtype=np.float64)


def integrated_semigroup(
    L: GeneratorMatrix,
    f: npt.ArrayLike,
    horizon: float,
) -> tuple[FloatArray, FloatArray]:
    """(∫_0^T e^{sL} f ds, e^{TL} f) from one exponential of the
    augmented matrix [[L, f], [0, 0]]"""
    n = L.n
    augmented = np.zeros((n + 1, n + 1))
    augmented[:n, :n] = L.matrix
    augmented[:n, n] = np.asarray(f, dtype=np.float64)
    exponential = linalg.expm(horizon * augmented)
    integral = exponential[:n, n] * 1.0
    tail = exponential[:n, :n] @ augmented[:n, n]
    return integral, tail
