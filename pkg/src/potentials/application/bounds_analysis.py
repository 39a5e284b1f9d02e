import logging
import math
from collections.abc import Callable, Collection, Sequence
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations

import networkx as nx
import numpy as np

from potentials.application.exceptions.base import (
    DecompositionInvalidError,
    PairListRequiredError,
)
from potentials.application.forest_engine import best_tree, tree_weight_vector
from potentials.application.graph_core import evaluate_at, generator
from potentials.application.potential_theory import (
    MfptMatrix,
    center_source,
    mfpt_matrix,
    pair_accumulation,
    quasipotential,
)
from potentials.application.settings import DEFAULT_SETTINGS, EngineSettings
from potentials.application.spectral_algebra import stationary_distribution
from potentials.domain.exceptions import StateMismatchError
from potentials.domain.graph import ParamRateGraph, RateGraph, ScalarField
from potentials.domain.reports import BoundKind, BoundReport, SweepRow

logger = logging.getLogger(__name__)

MAX_DEFAULT_PAIRS_STATES = 32
UNIFORMITY_FLOOR = 1e-300

SourceSpec = ScalarField | Callable[[float], ScalarField]


def _scale(bound: float, attained: float, norm: float) -> float:
    return max(abs(bound), abs(attained), norm)


def _default_pairs(g: RateGraph) -> list[tuple[str, str]]:
    if g.n > MAX_DEFAULT_PAIRS_STATES:
        raise PairListRequiredError(n=g.n)
    return list(combinations(g.states, 2))


def _check_states(g: RateGraph, *fields: ScalarField) -> None:
    for field in fields:
        if field.states != g.states:
            raise StateMismatchError(g.n, len(field.states))


def _log_global_constant(n: int, max_rate: float, total: float) -> float:
    """log of n·‖k‖^{n−2}/W"""
    return math.log(n) + (n - 2) * math.log(max_rate) - math.log(total)


def _times(exponent: float, norm: float) -> float:
    if norm == 0:
        return 0.0
    exponent += math.log(norm)
    return math.exp(exponent) if exponent < 709.0 else math.inf  # noqa: PLR2004


def pair_bounds(
    g: RateGraph,
    f: ScalarField,
    pairs: Sequence[tuple[str, str]] | None = None,
    settings: EngineSettings = DEFAULT_SETTINGS,
    *,
    tau: MfptMatrix | None = None,
) -> BoundReport:
    """|V(x) − V(y)| ≤ ‖f − ⟨f⟩‖·min(τ(x,y), τ(y,x)) for every pair, with
    the first-passage accumulation ṽ and its antisymmetry"""
    _check_states(g, f)
    pairs = _default_pairs(g) if pairs is None else pairs
    tolerance = settings.tolerances
    rho = stationary_distribution(generator(g)).values
    source = center_source(f, rho, auto_center=True)
    norm = source.sup_norm
    v = quasipotential(g, f, settings=settings)
    tau = tau or mfpt_matrix(g, settings=settings)
    report = BoundReport(kind=BoundKind.PAIR, norm="centered_sup")
    report.notes.extend(source.notes)
    report.extra["centered_sup"] = norm
    for x, y in pairs:
        label = f"{x},{y}"
        attained = abs(v[x] - v[y])
        bound = norm * min(tau[x, y], tau[y, x])
        report.add_row(
            label,
            bound,
            attained,
            _scale(bound, attained, norm),
            tolerance.bound_slack,
        )
        forward = pair_accumulation(g, source, x, y)
        backward = pair_accumulation(g, source, y, x)
        report.extra[f"v_tilde[{label}]"] = forward
        report.extra[f"v_tilde[{y},{x}]"] = backward
        scale = max(norm * max(tau[x, y], tau[y, x]), 1e-300)
        report.add_row(
            f"antisymmetry {label}",
            tolerance.antisymmetry * scale,
            abs(forward + backward),
            1.0,
            0.0,
        )
        report.extra[f"difference_residual[{label}]"] = abs(forward - (v[x] - v[y]))
    return report


def pair_bound(
    g: RateGraph,
    f: ScalarField,
    x: str,
    y: str,
    settings: EngineSettings = DEFAULT_SETTINGS,
) -> BoundReport:
    g.indices((x, y))
    return pair_bounds(g, f, [(x, y)], settings)


def decomposed_bound(
    g: RateGraph,
    f: ScalarField,
    e: ScalarField,
    d: Collection[str],
    settings: EngineSettings = DEFAULT_SETTINGS,
    *,
    pairs: Sequence[tuple[str, str]] | None = None,
    tau: MfptMatrix | None = None,
) -> BoundReport:
    """|V(x) − V(y)| ≤ |E(x) − E(y)| + ‖h‖·Σ_{z∈D} ρ(z)|τ(x,z) − τ(y,z)|
    for f = LE + h with h vanishing outside D"""
    _check_states(g, f, e)
    tolerance = settings.tolerances
    inside = sorted(g.indices(d))
    L = generator(g)
    rho = stationary_distribution(L).values
    source = center_source(f, rho, auto_center=True)
    h = source.values - L.matrix @ e.values
    members = set(inside)
    threshold = tolerance.decomposition * max(source.sup_norm, 1e-300)
    for i, state in enumerate(g.states):
        if i not in members and abs(h[i]) > threshold:
            raise DecompositionInvalidError(state=state, value=float(h[i]))
    h_inside = h[inside]
    h_norm = float(np.max(np.abs(h_inside))) if inside else 0.0
    pairs = _default_pairs(g) if pairs is None else pairs
    tau = tau or mfpt_matrix(g, settings=settings)
    v = quasipotential(g, f, settings=settings)
    report = BoundReport(kind=BoundKind.DECOMPOSED, norm="sup(h)")
    report.notes.extend(source.notes)
    report.extra["h_sup"] = h_norm
    weights = rho[inside]
    for x, y in pairs:
        i, j = g.index(x), g.index(y)
        spread = np.abs(tau.matrix[i, inside] - tau.matrix[j, inside])
        bound = abs(e[x] - e[y]) + h_norm * float(weights @ spread)
        attained = abs(v[x] - v[y])
        report.add_row(
            f"{x},{y}",
            bound,
            attained,
            _scale(bound, attained, source.sup_norm),
            tolerance.bound_slack,
        )
    # V = −E − Σ_{z∈D} ρ(z) h(z) τ(·, z) + constant
    rebuilt = -e.values - tau.matrix[:, inside] @ (weights * h_inside)
    rebuilt = rebuilt - rho @ rebuilt
    scale = max(v.sup_norm, e.sup_norm, 1e-300)
    report.extra["reconstruction_residual"] = float(
        np.max(np.abs(rebuilt - v.values)) / scale,
    )
    return report


def global_bound(
    g: RateGraph,
    f: ScalarField,
    settings: EngineSettings = DEFAULT_SETTINGS,
) -> BoundReport:
    """max |V| ≤ n·‖k‖^{n−2}·‖f‖/W"""
    _check_states(g, f)
    rho = stationary_distribution(generator(g)).values
    source = center_source(f, rho, auto_center=True)
    norm = source.sup_norm
    v = quasipotential(g, f, settings=settings)
    _, total = tree_weight_vector(g, settings)
    witness = best_tree(g, settings)
    bound = _times(_log_global_constant(g.n, g.max_rate, total), norm)
    attained = v.sup_norm
    report = BoundReport(kind=BoundKind.GLOBAL, norm="sup")
    report.notes.extend(source.notes)
    report.add_row(
        "max|V|",
        bound,
        attained,
        _scale(bound, attained, norm),
        settings.tolerances.bound_slack,
    )
    report.extra.update(
        {
            "W": total,
            "max_rate": g.max_rate,
            "sup": norm,
            "best_tree_weight": witness.weight,
            "best_tree_root": witness.root,
        },
    )
    return report


def chained_bound(
    g: RateGraph,
    f: ScalarField,
    settings: EngineSettings = DEFAULT_SETTINGS,
    *,
    tau: MfptMatrix | None = None,
) -> BoundReport:
    """Upper bound on V(x) by the shortest chain of pair bounds along arcs
    from a state with V ≤ 0; lower bound from states with V ≥ 0"""
    _check_states(g, f)
    rho = stationary_distribution(generator(g)).values
    source = center_source(f, rho, auto_center=True)
    norm = source.sup_norm
    v = quasipotential(g, f, settings=settings)
    tau = tau or mfpt_matrix(g, settings=settings)
    chain = nx.Graph()
    chain.add_nodes_from(g.states)
    for arc in g.arcs:
        step = norm * min(tau[arc.source, arc.target], tau[arc.target, arc.source])
        chain.add_edge(arc.source, arc.target, weight=step)
    below = {s for s in g.states if v[s] <= 0}
    above = {s for s in g.states if v[s] >= 0}
    upper = nx.multi_source_dijkstra_path_length(chain, below)
    lower = nx.multi_source_dijkstra_path_length(chain, above)
    report = BoundReport(kind=BoundKind.CHAINED, norm="centered_sup")
    report.notes.extend(source.notes)
    tolerance = settings.tolerances.bound_slack
    for state in g.states:
        report.add_row(
            f"V({state})<=",
            upper[state],
            v[state],
            _scale(upper[state], v[state], norm),
            tolerance,
        )
        report.add_row(
            f"V({state})>=",
            lower[state],
            -v[state],
            _scale(lower[state], v[state], norm),
            tolerance,
        )
    return report


def _zero_barrier_tree(pg: ParamRateGraph) -> float | None:
    """Best prefactor weight of a spanning in-tree made of zero-barrier arcs"""
    reversed_graph = nx.DiGraph()
    reversed_graph.add_nodes_from(pg.states)
    for arc in pg.arcs:
        if arc.barrier == 0:
            reversed_graph.add_edge(
                arc.target,
                arc.source,
                weight=math.log(arc.prefactor),
            )
    try:
        tree = nx.maximum_spanning_arborescence(reversed_graph)
    except nx.NetworkXException:
        return None
    return math.exp(math.fsum(w for _, _, w in tree.edges(data="weight")))


def uniform_constant(pg: ParamRateGraph, f: ScalarField) -> float | None:
    """Bound n·A^{n−2}·2‖f‖/w₀ valid for every λ ≥ 0, available when no
    barrier is negative and the zero-barrier arcs contain a spanning in-tree"""
    if any(arc.barrier < 0 for arc in pg.arcs):
        return None
    w0 = _zero_barrier_tree(pg)
    if w0 is None:
        return None
    largest = max(arc.prefactor for arc in pg.arcs)
    exponent = _log_global_constant(pg.n, largest, w0)
    return _times(exponent, 2.0 * f.sup_norm)


def _sweep_point(
    pg: ParamRateGraph,
    f: SourceSpec,
    lam: float,
    settings: EngineSettings,
) -> tuple[SweepRow, float]:
    g = evaluate_at(pg, lam)
    source = f(lam) if callable(f) else f
    report = global_bound(g, source, settings)
    row = report.rows[0]
    clamped = sum(1 for note in g.notes if "clamped" in note)
    witness = best_tree(g, settings)
    sweep_row = SweepRow(
        lam=lam,
        total_tree_weight=float(report.extra["W"]),  # type: ignore[arg-type]
        best_tree_weight=witness.weight,
        bound=row.bound,
        attained=row.attained,
        slack=row.slack,
        clamped_arcs=clamped,
    )
    return sweep_row, float(report.extra["sup"])  # type: ignore[arg-type]


def uniform_bound_sweep(
    pg: ParamRateGraph,
    f: SourceSpec,
    lambdas: Sequence[float],
    settings: EngineSettings = DEFAULT_SETTINGS,
) -> BoundReport:
    """Global bound along a λ grid; uniformity of the best-tree weight is
    reported, not asserted"""
    if not lambdas:
        msg = "lambda grid is empty"
        raise ValueError(msg)
    grid = sorted(lambdas)

    def point(lam: float) -> tuple[SweepRow, float]:
        return _sweep_point(pg, f, lam, settings)

    if settings.workers > 1:
        with ThreadPoolExecutor(max_workers=settings.workers) as pool:
            results = list(pool.map(point, grid))
    else:
        results = [point(lam) for lam in grid]
    report = BoundReport(kind=BoundKind.SWEEP, norm="sup")
    tolerance = settings.tolerances.bound_slack
    for row, norm in results:
        report.sweep.append(row)
        report.add_row(
            f"lambda={row.lam!r}",
            row.bound,
            row.attained,
            _scale(row.bound, row.attained, norm),
            tolerance,
        )
        if row.clamped_arcs:
            report.notes.append(
                f"lambda={row.lam!r}: {row.clamped_arcs} rate(s) clamped",
            )
    smallest = min(row.best_tree_weight for row in report.sweep)
    report.extra["min_best_tree_weight"] = smallest
    report.extra["best_tree_bounded_below"] = smallest > UNIFORMITY_FLOOR
    constant = None if callable(f) else uniform_constant(pg, f)
    if constant is not None and grid[0] < 0:
        report.notes.append(
            f"uniform constant holds for lambda >= 0 only; grid starts at {grid[0]!r}",
        )
        constant = None
    report.extra["uniform_constant"] = constant
    if constant is not None:
        for row in report.sweep:
            report.add_row(
                f"lambda={row.lam!r} uniform",
                constant,
                row.bound,
                _scale(constant, row.bound, 0.0),
                tolerance,
            )
    logger.info(
        "Swept %d lambda values; smallest best-tree weight %.6g",
        len(grid),
        smallest,
    )
    return report
