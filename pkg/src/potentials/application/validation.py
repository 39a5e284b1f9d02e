import logging
import math
from collections.abc import Iterable
from dataclasses import replace
from fractions import Fraction

import numpy as np
import numpy.typing as npt

from potentials.application.bounds_analysis import (
    chained_bound,
    decomposed_bound,
    global_bound,
    pair_bounds,
)
from potentials.application.exceptions.base import XDependenceDetectedError
from potentials.application.forest_engine import (
    cofactor_tree_weights,
    enumerate_forests,
    forest_catalog,
    forest_resolvent,
    graded_forest_weights,
    kirchhoff_balance_residual,
    search_space,
    total_two_tree_weight,
    tree_swap,
    tree_unswap,
    tree_weight_vector,
    two_tree_matrices,
)
from potentials.application.graph_core import generator
from potentials.application.potential_theory import (
    MfptMethod,
    QuasipotentialMethod,
    difference_form_residual,
    escape_sum_rule_residual,
    green_function_residual,
    kemeny_functional,
    mean_escape_time,
    mfpt_matrix,
    mfpt_residual,
    poisson_residual,
    quasipotential,
    quasipotential_from_green,
    semigroup_invariance_residual,
    stopped_spectral_bound,
)
from potentials.application.reference_graphs import (
    complete_graph,
    directed_ring,
    random_irreducible_graph,
    two_state,
)
from potentials.application.settings import (
    DEFAULT_SETTINGS,
    EngineSettings,
    ForestMode,
)
from potentials.application.spectral_algebra import (
    condition_estimate,
    group_inverse,
    resolvent,
    spectral_gap,
    stationary_distribution,
    verify_group_axioms,
)
from potentials.application.trajectory_oracle import (
    escape_time_samples,
    estimate_excess,
    estimate_mfpt,
    estimate_occupation,
    estimate_pair_accumulation,
    estimate_stopped_accumulation,
    fit_tail_decay,
)
from potentials.domain.forest import FamilyKind, ForestFamily
from potentials.domain.graph import RateGraph, ScalarField
from potentials.domain.reports import BoundRow, ValidationReport
from potentials.domain.trajectory import McEstimate

logger = logging.getLogger(__name__)

RESOLVENT_ALPHAS = (0.1, 1.0, 10.0)
SEMIGROUP_TIMES = (0.1, 1.0, 10.0)
SWAP_CHECK_STATES = 5
FOREST_CHECK_STATES = 5
REFERENCE_TOLERANCE = 1e-9
MAX_RANDOM_STATES = 8
OCCUPATION_RELAXATIONS = 1000.0


def _relative(actual: npt.ArrayLike, expected: npt.ArrayLike) -> float:
    a = np.asarray(actual, dtype=np.float64)
    b = np.asarray(expected, dtype=np.float64)
    scale = max(float(np.max(np.abs(b))), 1e-300)
    return float(np.max(np.abs(a - b)) / scale)


def _enumerable(g: RateGraph, settings: EngineSettings) -> bool:
    return (
        g.n <= settings.enumeration_cap
        and search_space(g) <= settings.enumeration_budget
    )


def _forest_checks(g: RateGraph, settings: EngineSettings) -> ValidationReport:
    """Enumeration against the determinant and group-inverse routes"""
    tol = settings.tolerances
    report = ValidationReport(subject="forests")
    enumerated = replace(settings, forest_mode=ForestMode.ENUMERATION)
    algebraic = replace(settings, forest_mode=ForestMode.ALGEBRAIC)
    catalog = forest_catalog(g, enumerated)
    tree = catalog.as_array(catalog.tree)
    report.check(
        "w(x) enumeration=cofactor",
        _relative(cofactor_tree_weights(g), tree),
        tol.enumeration_agreement,
    )
    report.check(
        "w(F_m) enumeration=determinant",
        _relative(
            graded_forest_weights(g, algebraic),
            catalog.as_array(catalog.graded),
        ),
        tol.enumeration_agreement,
    )
    same, split = two_tree_matrices(g, algebraic)
    report.check(
        "w(x->y) enumeration=algebraic",
        _relative(same, catalog.as_array(catalog.same)),
        tol.enumeration_agreement,
    )
    report.check(
        "w(x,y) enumeration=algebraic",
        _relative(split, catalog.as_array(catalog.split)),
        tol.enumeration_agreement,
    )
    report.check(
        "w(F_m^{x->y}) at m=n-1 equals w(y)",
        _relative(
            catalog.as_array(catalog.graded_same[g.n - 1]),
            np.tile(tree, (g.n, 1)),
        ),
        tol.enumeration_agreement,
    )
    rho = stationary_distribution(generator(g))
    sharp = group_inverse(generator(g), rho).matrix
    total = float(tree.sum())
    two_tree_total = float(catalog.graded[g.n - 2])
    graphical = (
        -catalog.as_array(catalog.same) / total
        + np.tile(rho.values, (g.n, 1)) * two_tree_total / total
    )
    report.check(
        "group inverse graphical",
        _relative(sharp, graphical),
        tol.group_graphical,
    )
    L = generator(g)
    for alpha in RESOLVENT_ALPHAS:
        report.check(
            f"resolvent graphical alpha={alpha!r}",
            float(np.max(np.abs(resolvent(L, alpha, tol) - forest_resolvent(g, alpha, enumerated)))),
            tol.resolvent_graphical,
        )
    if g.n <= FOREST_CHECK_STATES:
        defects = sum(
            not forest.is_valid(g.states)
            for m in range(g.n)
            for forest in enumerate_forests(
                g,
                ForestFamily(FamilyKind.GRADED, m=m),
                enumerated,
            ).members
            or ()
        )
        report.check("enumerated forests are valid", defects, 0)
    if g.n <= SWAP_CHECK_STATES:
        report.check("tree swap bijection defects", tree_swap_defects(g, enumerated), 0)
    return report


def tree_swap_defects(g: RateGraph, settings: EngineSettings = DEFAULT_SETTINGS) -> int:
    """Count failures of the in-tree swap: validity, exact weight balance
    w(T_y)k(y,x) = w(T'_x)k(x,y'), round trip and injectivity"""
    defects = 0
    images: dict[str, set[tuple[frozenset[tuple[str, str]], tuple[str, str]]]] = {
        x: set() for x in g.states
    }
    for y in g.states:
        ensemble = enumerate_forests(
            g,
            ForestFamily(FamilyKind.IN_TREES, y=y),
            settings,
            exact=True,
        )
        for tree in ensemble.members or ():
            for arc in g.out_arcs(y):
                x = arc.target
                swapped, removed = tree_swap(tree, x, g, exact=True)
                before = tree.weight * Fraction(arc.rate)
                after = swapped.weight * Fraction(g.rate(*removed))
                restored = tree_unswap(swapped, removed, g, exact=True)
                image = (frozenset(swapped.arcs), removed)
                defects += not swapped.is_valid(g.states)
                defects += swapped.roots != (x,)
                defects += before != after
                defects += set(restored.arcs) != set(tree.arcs)
                defects += image in images[x]
                images[x].add(image)
    return defects


def _random_centered(
    g: RateGraph,
    rng: np.random.Generator,
    rho: npt.NDArray[np.float64],
) -> ScalarField:
    return ScalarField(g.states, rng.normal(size=g.n)).centered(rho)


def _random_decomposition(
    g: RateGraph,
    rng: np.random.Generator,
    rho: npt.NDArray[np.float64],
) -> tuple[ScalarField, ScalarField, list[str]]:
    """(f, E, D) with f = LE + h, h supported on D and ⟨h⟩ = 0"""
    size = int(rng.integers(1, g.n + 1))
    inside = sorted(int(i) for i in rng.choice(g.n, size=size, replace=False))
    e = rng.normal(size=g.n)
    h = np.zeros(g.n)
    h[inside] = rng.normal(size=size)
    h[inside[0]] -= (rho @ h) / rho[inside[0]]
    f = generator(g).matrix @ e + h
    return (
        ScalarField(g.states, f),
        ScalarField(g.states, e),
        [g.states[i] for i in inside],
    )


def _bound_failures(report_rows: Iterable[BoundRow]) -> tuple[int, str]:
    failed = [row.label for row in report_rows if not row.passed]
    return len(failed), ", ".join(failed)


def validate_graph(
    g: RateGraph,
    settings: EngineSettings = DEFAULT_SETTINGS,
    rng: np.random.Generator | None = None,
    *,
    subject: str = "graph",
) -> ValidationReport:
    """Every module identity on one graph, with random sources drawn from
    ``rng``"""
    rng = rng if rng is not None else np.random.default_rng(0)
    tol = settings.tolerances
    report = ValidationReport(subject=subject)
    L = generator(g)
    rho_field = stationary_distribution(L)
    rho = rho_field.values
    condition = condition_estimate(L.matrix + np.tile(rho, (g.n, 1)))
    if not condition < 1e12:  # noqa: PLR2004
        report.warnings.append(f"shifted generator cond_1 = {condition:.3g}")

    report.check(
        "stationary residual",
        float(np.max(np.abs(rho @ L.matrix))),
        tol.stationary_residual * L.norm,
    )
    report.check("stationary positivity", float(np.min(rho) <= 0), 0.0)
    report.check("stationary normalization", abs(float(rho.sum()) - 1.0), tol.stationary_residual)

    weights, total = tree_weight_vector(g, settings)
    report.check(
        "Kirchhoff w/W = rho",
        _relative(weights.values / total, rho),
        tol.kirchhoff_agreement,
    )
    report.check(
        "Kirchhoff balance",
        kirchhoff_balance_residual(g, weights.values),
        tol.kirchhoff_agreement,
    )

    same, split = two_tree_matrices(g, settings)
    roots = np.tile(np.diag(same), (g.n, 1))
    report.check(
        "w(x->y) + w(x,y) = w(F^y)",
        _relative(same + split, roots),
        tol.two_tree_identity,
    )
    graded = graded_forest_weights(g, settings)
    report.check(
        "sum_y w(x->y) = w(F_{n-2})",
        _relative(same.sum(axis=1), np.full(g.n, graded[g.n - 2])),
        tol.two_tree_identity,
    )
    report.check("w(F_0) = 1", abs(graded[0] - 1.0), tol.two_tree_identity)
    report.check(
        "w(F_{n-1}) = W",
        abs(graded[g.n - 1] - total) / total,
        tol.enumeration_agreement,
    )
    try:
        two_tree_total = total_two_tree_weight(g, settings)
        report.check("W2 independent of x", 0.0, tol.x_independence)
    except XDependenceDetectedError as error:
        two_tree_total = float(split[0].sum())
        report.check("W2 independent of x", error.residual, tol.x_independence)

    sharp = group_inverse(L, rho_field).matrix
    report.extend(verify_group_axioms(L, sharp, tol))
    report.check(
        "group inverse row sums",
        float(np.max(np.abs(sharp.sum(axis=1)))) / max(float(np.max(np.abs(sharp))), 1e-300),
        tol.group_row_sum,
    )
    for alpha in RESOLVENT_ALPHAS:
        kernel = resolvent(L, alpha, tol)
        report.check(
            f"resolvent row sums alpha={alpha!r}",
            float(np.max(np.abs(kernel.sum(axis=1) - 1.0))),
            tol.resolvent_row_sum,
        )
        report.check(
            f"resolvent entries <= 1 alpha={alpha!r}",
            max(float(np.max(kernel)) - 1.0, 0.0),
            tol.resolvent_row_sum,
        )

    if _enumerable(g, settings):
        report.extend(_forest_checks(g, settings), prefix="forests: ")

    f = _random_centered(g, rng, rho)
    norm = f.sup_norm
    linear = quasipotential(g, f, QuasipotentialMethod.LINEAR, settings=settings)
    forest = quasipotential(g, f, QuasipotentialMethod.FOREST, settings=settings)
    integral = quasipotential(g, f, QuasipotentialMethod.INTEGRAL, settings=settings)
    report.check(
        "quasipotential residual",
        float(np.max(np.abs(L.matrix @ linear.values + f.values))) / norm,
        tol.quasipotential_residual,
    )
    report.check(
        "quasipotential centering",
        abs(linear.mean(rho)) / max(linear.sup_norm, 1e-300),
        tol.quasipotential_centering,
    )
    for name, other in (("forest", forest), ("integral", integral)):
        report.check(
            f"quasipotential linear={name}",
            float(np.max(np.abs(linear.values - other.values))) / norm,
            tol.quasipotential_agreement,
        )
    report.check(
        "quasipotential = -L# f",
        float(np.max(np.abs(linear.values + sharp @ f.values))) / norm,
        tol.quasipotential_residual,
    )

    tau = mfpt_matrix(g, MfptMethod.LINEAR, settings)
    report.check("mfpt residual", mfpt_residual(g, tau), tol.mfpt_residual)
    off_diagonal = tau.matrix[~np.eye(g.n, dtype=bool)]
    report.check("mfpt positivity", float(np.min(off_diagonal) <= 0), 0.0)
    for method in (MfptMethod.FOREST, MfptMethod.GROUP_INVERSE):
        other = mfpt_matrix(g, method, settings)
        report.check(
            f"mfpt linear={method.value}",
            _relative(other.matrix, tau.matrix),
            tol.mfpt_agreement,
        )
    green = quasipotential_from_green(g, f, tau)
    report.check(
        "Green reconstruction",
        float(np.max(np.abs(green.values - linear.values))) / norm,
        tol.green_agreement,
    )
    report.check(
        "difference form",
        difference_form_residual(g, f, linear, tau),
        tol.green_agreement,
    )
    report.check("Green functions", green_function_residual(g, tau), tol.mfpt_residual)

    for size in sorted({1, g.n - 1, math.ceil(g.n / 2)}):
        chosen = rng.choice(g.n, size=size, replace=False)
        interior = [g.states[int(i)] for i in chosen]
        report.check(
            f"escape sum rule |H|={size}",
            escape_sum_rule_residual(g, interior, settings),
            tol.sum_rule,
        )
        escape = mean_escape_time(g, interior, settings)
        report.check(
            f"escape Poisson |H|={size}",
            poisson_residual(g, escape.values, np.ones(g.n), interior),
            tol.poisson_residual,
        )

    kemeny = kemeny_functional(g, tau)
    report.check("Kemeny spread", kemeny.max_spread / kemeny.value, tol.kemeny_spread)
    report.check(
        "Kemeny = W2/W",
        abs(kemeny.value - two_tree_total / total) / kemeny.value,
        tol.kemeny_identity,
    )
    for t in SEMIGROUP_TIMES:
        report.check(
            f"semigroup invariance t={t!r}",
            semigroup_invariance_residual(g, rng.normal(size=g.n), t),
            tol.semigroup,
        )

    pairs = [(x, y) for i, x in enumerate(g.states) for y in g.states[i + 1 :]]
    for name, bound in (
        ("pair bounds", pair_bounds(g, f, pairs, settings, tau=tau)),
        ("global bound", global_bound(g, f, settings)),
        ("chained bound", chained_bound(g, f, settings, tau=tau)),
    ):
        count, labels = _bound_failures(bound.rows)
        report.check(name, count, 0, detail=labels)
    decomposed_f, e, d = _random_decomposition(g, rng, rho)
    decomposed = decomposed_bound(g, decomposed_f, e, d, settings, pairs=pairs, tau=tau)
    count, labels = _bound_failures(decomposed.rows)
    report.check("decomposed bound", count, 0, detail=labels)
    report.check(
        "decomposition reconstruction",
        float(decomposed.extra["reconstruction_residual"]),  # type: ignore[arg-type]
        tol.green_agreement,
    )
    logger.info(
        "Validated %s: %d checks, %d failed",
        subject,
        len(report.checks),
        len(report.failures),
    )
    return report


def _pin(
    report: ValidationReport,
    name: str,
    actual: npt.ArrayLike,
    expected: npt.ArrayLike,
) -> None:
    a = np.asarray(actual, dtype=np.float64)
    b = np.asarray(expected, dtype=np.float64)
    scale = max(1.0, float(np.max(np.abs(b))))
    report.check(name, float(np.max(np.abs(a - b))), REFERENCE_TOLERANCE * scale)


def validate_reference_examples(
    settings: EngineSettings = DEFAULT_SETTINGS,
) -> ValidationReport:
    """Hand-derived values on the two-state chain, the 3-ring and K3"""
    report = ValidationReport(subject="reference examples")
    two = two_state()
    f2 = ScalarField(two.states, [2 / 3, -1 / 3])
    rho2 = stationary_distribution(generator(two)).values
    _pin(report, "2-state rho", rho2, [1 / 3, 2 / 3])
    weights, total = tree_weight_vector(two, settings)
    _pin(report, "2-state w", weights.values, [1, 2])
    _pin(report, "2-state W", total, 3)
    _pin(report, "2-state W2", total_two_tree_weight(two, settings), 1)
    _pin(report, "2-state graded", graded_forest_weights(two, settings), [1, 3])
    same, split = two_tree_matrices(two, settings)
    _pin(report, "2-state w(a->b), w(a,b)", [same[0, 1], split[0, 1]], [0, 1])
    tau2 = mfpt_matrix(two, settings=settings)
    _pin(report, "2-state tau", tau2.matrix, [[0, 0.5], [1, 0]])
    for method in QuasipotentialMethod:
        v = quasipotential(two, f2, method, settings=settings)
        _pin(report, f"2-state V ({method.value})", v.values, [2 / 9, -1 / 9])
    sharp = group_inverse(generator(two)).matrix
    _pin(report, "2-state L#", sharp, generator(two).matrix / 9)
    _pin(report, "2-state resolvent", resolvent(generator(two), 1.0), [[0.5, 0.5], [0.25, 0.75]])
    _pin(report, "2-state Kemeny", kemeny_functional(two, tau2).value, 1 / 3)
    _pin(report, "2-state escape H={a}", mean_escape_time(two, ["a"], settings)["a"], 0.5)
    pair = pair_bounds(two, f2, [("a", "b")], settings)
    _pin(report, "2-state pair bound", pair.rows[0].bound, 1 / 3)
    _pin(report, "2-state global bound", global_bound(two, f2, settings).rows[0].bound, 4 / 9)

    ring = directed_ring()
    f3 = ScalarField(ring.states, [1, 0, -1])
    _pin(report, "3-ring rho", stationary_distribution(generator(ring)).values, [1 / 3] * 3)
    weights, total = tree_weight_vector(ring, settings)
    _pin(report, "3-ring w", weights.values, [1, 1, 1])
    _pin(report, "3-ring W2", total_two_tree_weight(ring, settings), 3)
    graded = graded_forest_weights(ring, settings)
    _pin(report, "3-ring graded", graded, [1, 3, 3])
    _pin(report, "3-ring resolvent denominator", sum(graded), 7)
    same, split = two_tree_matrices(ring, settings)
    _pin(report, "3-ring w(1->y)", same[0], [2, 1, 0])
    _pin(report, "3-ring w(1,3)", split[0, 2], 2)
    tau3 = mfpt_matrix(ring, settings=settings)
    _pin(report, "3-ring tau(1,.)", tau3.matrix[0], [0, 1, 2])
    for method in QuasipotentialMethod:
        v = quasipotential(ring, f3, method, settings=settings)
        _pin(report, f"3-ring V ({method.value})", v.values, [2 / 3, -1 / 3, -1 / 3])
    _pin(report, "3-ring Kemeny", kemeny_functional(ring, tau3).value, 1)
    escape = mean_escape_time(ring, ["1", "2"], settings)
    _pin(report, "3-ring escape H={1,2}", escape.values[:2], [2, 1])
    _pin(report, "3-ring global bound", global_bound(ring, f3, settings).rows[0].bound, 1)
    pair = pair_bounds(ring, f3, [("1", "2")], settings)
    _pin(report, "3-ring pair bound (1,2)", pair.rows[0].bound, 1)

    k3 = complete_graph(3)
    weights, total = tree_weight_vector(k3, settings)
    _pin(report, "K3 w", weights.values, [3, 3, 3])
    _pin(report, "K3 W", total, 9)
    return report


def monte_carlo_checks(
    settings: EngineSettings = DEFAULT_SETTINGS,
    *,
    seed: int = 0,
    samples: int = 10_000,
) -> ValidationReport:
    """Sampled estimates within the sigma band of the analytic values"""
    sigmas = settings.tolerances.mc_sigmas
    workers = settings.workers
    report = ValidationReport(subject="Monte Carlo")

    def band(name: str, estimate: McEstimate, exact: float) -> None:
        width = sigmas * estimate.stderr
        if estimate.truncation_allowance is not None:
            width = max(width, estimate.truncation_allowance)
        report.check(
            name,
            abs(estimate.mean - exact),
            width,
            detail=f"mean={estimate.mean!r}",
        )

    two = two_state()
    ring = directed_ring()
    f2 = ScalarField(two.states, [2 / 3, -1 / 3])
    band("mfpt 2-state a->b", estimate_mfpt(two, "a", "b", samples, seed, workers=workers), 0.5)
    band("mfpt 3-ring 1->3", estimate_mfpt(ring, "1", "3", samples, seed, workers=workers), 2.0)
    band(
        "escape 2-state H={a}",
        estimate_stopped_accumulation(
            two,
            "a",
            ["a"],
            ScalarField.constant(two.states, 1.0),
            samples,
            seed,
            workers=workers,
        ),
        0.5,
    )
    band(
        "pair accumulation 2-state a,b",
        estimate_pair_accumulation(two, "a", "b", f2, samples, seed, workers=workers),
        1 / 3,
    )
    band(
        "excess 2-state a",
        estimate_excess(two, "a", f2, 10.0, samples, seed, workers=workers),
        2 / 9,
    )
    band(
        "excess 2-state stationary start",
        estimate_excess(two, None, f2, 10.0, samples, seed, workers=workers),
        0.0,
    )
    for g in (two, ring):
        L = generator(g)
        rho = stationary_distribution(L).values
        horizon = OCCUPATION_RELAXATIONS / spectral_gap(L)
        occupation = estimate_occupation(g, g.states[0], horizon, 200, seed, workers=workers)
        for i, state in enumerate(g.states):
            band(f"occupation {g.n}-state {state}", occupation[state], float(rho[i]))
    times = escape_time_samples(two, "a", ["a"], samples, seed, workers=workers)
    rate = stopped_spectral_bound(two, ["a"])
    fitted = fit_tail_decay(times)
    report.check(
        "escape tail decay 2-state",
        abs(fitted - rate) / rate,
        settings.tolerances.tail_rate,
        detail=f"fitted={fitted!r}",
    )
    return report


def validate_suite(
    graphs: Iterable[RateGraph] = (),
    *,
    n_random: int = 20,
    seed: int = 0,
    settings: EngineSettings = DEFAULT_SETTINGS,
    mc_samples: int = 10_000,
) -> ValidationReport:
    """Reference examples, Monte Carlo oracle, user graphs and random graphs"""
    report = ValidationReport(subject="validation suite")
    report.extend(validate_reference_examples(settings), prefix="reference: ")
    report.extend(
        monte_carlo_checks(settings, seed=seed, samples=mc_samples),
        prefix="mc: ",
    )
    rng = np.random.default_rng(seed)
    for number, g in enumerate(graphs):
        report.extend(
            validate_graph(g, settings, rng, subject=f"input {number}"),
            prefix=f"input {number}: ",
        )
    for number in range(n_random):
        n = int(rng.integers(2, MAX_RANDOM_STATES + 1))
        g = random_irreducible_graph(rng, n)
        report.extend(
            validate_graph(g, settings, rng, subject=f"random {number}"),
            prefix=f"random {number} (n={n}): ",
        )
    return report
