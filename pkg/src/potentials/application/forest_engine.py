import itertools
import logging
import math
from collections.abc import Iterator, Mapping
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import networkx as nx
import numpy as np
import numpy.typing as npt
from scipy import linalg

from potentials.application.exceptions.base import (
    CapExceededError,
    XDependenceDetectedError,
)
from potentials.application.graph_core import generator
from potentials.application.settings import (
    DEFAULT_SETTINGS,
    EngineSettings,
    ForestMode,
)
from potentials.application.sinks import ForestSink
from potentials.application.spectral_algebra import group_inverse, stationary_distribution
from potentials.domain.forest import (
    FamilyKind,
    ForestEnsemble,
    ForestFamily,
    RootedForest,
    Weight,
)
from potentials.domain.graph import FloatArray, RateGraph, ScalarField

logger = logging.getLogger(__name__)

Parent = tuple[int, ...]
OutLists = list[list[tuple[int, Weight]]]


@dataclass(frozen=True, slots=True, eq=False)
class ForestCatalog:
    """Every enumeration aggregate of one graph, gathered in a single pass.

    ``graded[m]`` is w(𝓕_m); ``graded_same[m][x][y]`` is w(𝓕^{x→y}_m);
    ``split[x][y]`` is w(x, y); ``tree[x]`` is w(x).
    """

    states: tuple[str, ...]
    exact: bool
    tree: list[Weight]
    graded: list[Weight]
    graded_same: list[list[list[Weight]]]
    split: list[list[Weight]]
    count: int

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def same(self) -> list[list[Weight]]:
        """w(x→y) over two-tree forests"""
        return self.graded_same[self.n - 2]

    @staticmethod
    def as_array(table: list[Weight] | list[list[Weight]]) -> FloatArray:
        return np.array(table, dtype=object).astype(np.float64)


@dataclass(frozen=True, slots=True)
class BestTree:
    root: str
    arcs: tuple[tuple[str, str], ...]
    weight: float
    log_weight: float


def _zero(exact: bool) -> Weight:
    return Fraction(0) if exact else 0.0


def _one(exact: bool) -> Weight:
    return Fraction(1) if exact else 1.0


def _out_lists(g: RateGraph, exact: bool) -> OutLists:
    outs: OutLists = [[] for _ in range(g.n)]
    for source, target, rate in g.index_arcs():
        outs[source].append((target, Fraction(rate) if exact else rate))
    return outs


def search_space(g: RateGraph) -> int:
    """Upper bound on the number of rooted forests: Π (out-degree + 1)"""
    degrees = [0] * g.n
    for source, _, _ in g.index_arcs():
        degrees[source] += 1
    return math.prod(d + 1 for d in degrees)


def _iter_forests(
    outs: OutLists,
    *,
    root_count: int | None = None,
    forced_root: int | None = None,
    exact: bool = False,
) -> Iterator[tuple[Parent, Weight]]:
    """Backtrack over vertices in index order; each one is either a root or
    picks one outgoing arc. Yields (parent, weight), parent -1 for roots."""
    n = len(outs)
    parent = [-1] * n

    def closes_cycle(v: int, t: int) -> bool:
        u = t
        while u < v and parent[u] != -1:
            u = parent[u]
        return u == v

    def extend(v: int, roots: int, weight: Weight) -> Iterator[tuple[Parent, Weight]]:
        if root_count is not None and not roots <= root_count <= roots + n - v:
            return
        if v == n:
            yield tuple(parent), weight
            return
        if v == forced_root:
            yield from extend(v + 1, roots + 1, weight)
            return
        pending = 1 if forced_root is not None and forced_root > v else 0
        if root_count is None or roots + 1 + pending <= root_count:
            yield from extend(v + 1, roots + 1, weight)
        for target, rate in outs[v]:
            if closes_cycle(v, target):
                continue
            parent[v] = target
            yield from extend(v + 1, roots, weight * rate)
            parent[v] = -1

    yield from extend(0, 0, _one(exact))


def _roots_of(parent: Parent) -> list[int]:
    n = len(parent)
    root = [-1] * n
    for v in range(n):
        path = []
        u = v
        while root[u] == -1 and parent[u] != -1:
            path.append(u)
            u = parent[u]
        resolved = root[u] if root[u] != -1 else u
        root[u] = resolved
        for p in path:
            root[p] = resolved
    return root


def _as_forest(g: RateGraph, parent: Parent, weight: Weight) -> RootedForest:
    root = _roots_of(parent)
    roots = sorted(set(root))
    return RootedForest(
        arcs=tuple(
            (g.states[v], g.states[parent[v]])
            for v in range(g.n)
            if parent[v] != -1
        ),
        roots=tuple(g.states[r] for r in roots),
        components=tuple(
            tuple(g.states[v] for v in range(g.n) if root[v] == r)
            for r in roots
        ),
        weight=weight,
    )


def _forest_from_mapping(
    g: RateGraph,
    mapping: Mapping[str, str],
    exact: bool,
) -> RootedForest:
    parent = [-1] * g.n
    weight = _one(exact)
    for source, target in mapping.items():
        parent[g.index(source)] = g.index(target)
        rate = g.rate(source, target)
        weight *= Fraction(rate) if exact else rate
    return _as_forest(g, tuple(parent), weight)


def _require_cap(g: RateGraph, settings: EngineSettings) -> None:
    if g.n > settings.enumeration_cap:
        raise CapExceededError(n=g.n, cap=settings.enumeration_cap)


def uses_enumeration(g: RateGraph, settings: EngineSettings) -> bool:
    match settings.forest_mode:
        case ForestMode.ENUMERATION:
            _require_cap(g, settings)
            return True
        case ForestMode.ALGEBRAIC:
            return False
    return (
        g.n <= settings.enumeration_cap
        and search_space(g) <= settings.enumeration_budget
    )


@lru_cache(maxsize=32)
def _catalog(g: RateGraph, exact: bool) -> ForestCatalog:
    n = g.n
    zero = _zero(exact)
    tree = [zero] * n
    graded = [zero] * n
    graded_same = [[[zero] * n for _ in range(n)] for _ in range(n)]
    split = [[zero] * n for _ in range(n)]
    count = 0
    for parent, weight in _iter_forests(_out_lists(g, exact), exact=exact):
        count += 1
        root = _roots_of(parent)
        roots = sorted(set(root))
        m = n - len(roots)
        graded[m] += weight
        layer = graded_same[m]
        for x in range(n):
            layer[x][root[x]] += weight
        if len(roots) == 1:
            tree[roots[0]] += weight
        elif len(roots) == 2:  # noqa: PLR2004
            first, second = roots
            for x in range(n):
                other = first if root[x] == second else second
                split[x][other] += weight
    logger.debug("Enumerated %d rooted forests on %d states", count, n)
    return ForestCatalog(
        states=g.states,
        exact=exact,
        tree=tree,
        graded=graded,
        graded_same=graded_same,
        split=split,
        count=count,
    )


def forest_catalog(
    g: RateGraph,
    settings: EngineSettings = DEFAULT_SETTINGS,
    *,
    exact: bool = False,
) -> ForestCatalog:
    _require_cap(g, settings)
    return _catalog(g, exact)


def _family_constraints(
    g: RateGraph,
    family: ForestFamily,
) -> tuple[int | None, int | None, int | None]:
    """(root count, forced root, x) for the backtracking search"""
    x = None if family.x is None else g.index(family.x)
    y = None if family.y is None else g.index(family.y)
    needs_y = family.kind in {
        FamilyKind.IN_TREES,
        FamilyKind.SAME_TREE,
        FamilyKind.SPLIT,
        FamilyKind.GRADED_SAME,
    }
    needs_x = family.kind in {
        FamilyKind.SAME_TREE,
        FamilyKind.SPLIT,
        FamilyKind.GRADED_SAME,
    }
    needs_m = family.kind in {FamilyKind.GRADED, FamilyKind.GRADED_SAME}
    if (needs_y and y is None) or (needs_x and x is None):
        msg = f"Family {family.label()} is missing a state"
        raise ValueError(msg)
    if needs_m and (family.m is None or not 0 <= family.m < g.n):
        msg = f"Family {family.label()} needs 0 <= m < {g.n}"
        raise ValueError(msg)
    match family.kind:
        case FamilyKind.IN_TREES:
            return 1, y, None
        case FamilyKind.SAME_TREE | FamilyKind.SPLIT:
            return 2, y, x
        case FamilyKind.TWO_TREE:
            return 2, None, None
        case FamilyKind.GRADED:
            return g.n - family.m, None, None  # type: ignore[operator]
        case FamilyKind.GRADED_SAME:
            return g.n - family.m, y, x  # type: ignore[operator]
    msg = f"Unknown family kind {family.kind}"  # pragma: no cover
    raise ValueError(msg)  # pragma: no cover


def enumerate_forests(
    g: RateGraph,
    family: ForestFamily,
    settings: EngineSettings = DEFAULT_SETTINGS,
    *,
    sink: ForestSink | None = None,
    exact: bool = False,
) -> ForestEnsemble:
    """Explicit members of a forest family with their total weight"""
    _require_cap(g, settings)
    root_count, forced, x = _family_constraints(g, family)
    members: list[RootedForest] = []
    total = _zero(exact)
    for parent, weight in _iter_forests(
        _out_lists(g, exact),
        root_count=root_count,
        forced_root=forced,
        exact=exact,
    ):
        if x is not None:
            in_same_tree = _roots_of(parent)[x] == forced
            if in_same_tree == (family.kind is FamilyKind.SPLIT):
                continue
        forest = _as_forest(g, parent, weight)
        members.append(forest)
        total += weight
        if sink is not None:
            sink.write(family, forest)
    return ForestEnsemble(
        family=family,
        total_weight=total,
        count=len(members),
        members=tuple(members),
    )


def enumerate_in_trees(
    g: RateGraph,
    root: str,
    settings: EngineSettings = DEFAULT_SETTINGS,
    *,
    sink: ForestSink | None = None,
) -> ForestEnsemble:
    return enumerate_forests(
        g,
        ForestFamily(FamilyKind.IN_TREES, y=root),
        settings,
        sink=sink,
    )


def _principal_minor(matrix: FloatArray, keep: list[int] | tuple[int, ...]) -> float:
    if not keep:
        return 1.0
    return float(linalg.det(matrix[np.ix_(keep, keep)]))


def cofactor_tree_weights(g: RateGraph) -> FloatArray:
    """w(x) = det of 𝓛 with row and column x removed"""
    lap = generator(g).laplacian
    states = range(g.n)
    return np.array(
        [_principal_minor(lap, [v for v in states if v != x]) for x in states],
    )


def tree_weight_vector(
    g: RateGraph,
    settings: EngineSettings = DEFAULT_SETTINGS,
) -> tuple[ScalarField, float]:
    """Kirchhoff weights w(x) and their total W"""
    if uses_enumeration(g, settings):
        catalog = forest_catalog(g, settings)
        weights = catalog.as_array(catalog.tree)
    else:
        weights = cofactor_tree_weights(g)
    return ScalarField(g.states, weights), float(weights.sum())


def characteristic_coefficients(matrix: npt.ArrayLike) -> list[float]:
    """Coefficients c_0..c_n of det(tI − A) = Σ c_k t^{n−k} (Faddeev–LeVerrier)"""
    a = np.asarray(matrix, dtype=np.float64)
    n = a.shape[0]
    identity = np.eye(n)
    m = np.zeros_like(a)
    coefficients = [1.0]
    for k in range(1, n + 1):
        m = a @ m + coefficients[-1] * identity
        coefficients.append(-float(np.trace(a @ m)) / k)
    return coefficients


def _graded_minor_sums(matrix: FloatArray) -> list[float]:
    n = matrix.shape[0]
    return [
        math.fsum(
            _principal_minor(matrix, keep)
            for keep in itertools.combinations(range(n), m)
        )
        for m in range(n)
    ]


def graded_forest_weights(
    g: RateGraph,
    settings: EngineSettings = DEFAULT_SETTINGS,
) -> list[float]:
    """w(𝓕_m) for m = 0..n−1, the coefficients of det(I + α𝓛)"""
    if uses_enumeration(g, settings):
        return [float(v) for v in forest_catalog(g, settings).graded]
    lap = generator(g).laplacian
    if g.n <= settings.minor_sum_cap:
        return _graded_minor_sums(lap)
    coefficients = characteristic_coefficients(lap)
    return [(-1) ** m * coefficients[m] for m in range(g.n)]


def graded_two_point_weights(
    g: RateGraph,
    settings: EngineSettings = DEFAULT_SETTINGS,
    *,
    exact: bool = False,
) -> list[list[list[Weight]]]:
    """[m][x][y] → w(𝓕^{x→y}_m); enumeration only"""
    return forest_catalog(g, settings, exact=exact).graded_same


def forest_resolvent(
    g: RateGraph,
    alpha: float,
    settings: EngineSettings = DEFAULT_SETTINGS,
) -> FloatArray:
    """Σ_m α^m w(𝓕^{x→y}_m) / Σ_m α^m w(𝓕_m)"""
    graded = forest_catalog(g, settings).graded
    numerator = np.zeros((g.n, g.n))
    denominator = 0.0
    for m, layer in enumerate(graded_two_point_weights(g, settings)):
        power = alpha**m
        numerator += power * np.asarray(layer, dtype=np.float64)
        denominator += power * float(graded[m])
    return numerator / denominator


def two_tree_matrices(
    g: RateGraph,
    settings: EngineSettings = DEFAULT_SETTINGS,
) -> tuple[FloatArray, FloatArray]:
    """(same, split): same[x, y] = w(x→y), split[x, y] = w(x, y).

    Above the enumeration threshold ``same`` is recovered from the group
    inverse: w(x→y) = ρ(y)·w(𝓕) − W·L^#[x, y].
    """
    if uses_enumeration(g, settings):
        catalog = forest_catalog(g, settings)
        return catalog.as_array(catalog.same), catalog.as_array(catalog.split)
    rho = stationary_distribution(generator(g))
    sharp = group_inverse(generator(g), rho).matrix
    _, total = tree_weight_vector(g, settings)
    two_tree_total = graded_forest_weights(g, settings)[g.n - 2]
    same = two_tree_total * np.tile(rho.values, (g.n, 1)) - total * sharp
    split = np.diag(same)[np.newaxis, :] - same
    np.fill_diagonal(split, 0.0)
    return same, split


def two_tree_weights(
    g: RateGraph,
    x: str,
    y: str,
    settings: EngineSettings = DEFAULT_SETTINGS,
) -> tuple[float, float]:
    """(w(x→y), w(x, y)); w(x, x) = 0"""
    i, j = g.index(x), g.index(y)
    same, split = two_tree_matrices(g, settings)
    return float(same[i, j]), float(split[i, j])


def total_two_tree_weight(
    g: RateGraph,
    settings: EngineSettings = DEFAULT_SETTINGS,
) -> float:
    """W₂ = Σ_{y≠x} w(x, y), checked for independence of x"""
    _, split = two_tree_matrices(g, settings)
    per_state = split.sum(axis=1)
    value = float(per_state[0])
    spread = float(np.max(np.abs(per_state - value)))
    scale = max(abs(value), 1e-300)
    if spread > settings.tolerances.x_independence * scale:
        raise XDependenceDetectedError(quantity="W2", residual=spread / scale)
    return value


def kirchhoff_balance_residual(g: RateGraph, weights: npt.ArrayLike) -> float:
    """max_x |Σ_y w(y)k(y,x) − w(x)Σ_y k(x,y)|, relative to W·‖L‖"""
    L = generator(g)
    w = np.asarray(weights, dtype=np.float64)
    residual = np.max(np.abs(w @ L.matrix))
    return float(residual / (w.sum() * L.norm))


def tree_swap(
    tree: RootedForest,
    x: str,
    g: RateGraph,
    *,
    exact: bool = False,
) -> tuple[RootedForest, tuple[str, str]]:
    """Turn an in-tree rooted at y into one rooted at x using arc (y, x):
    drop the out-arc (x, y') of x and add (y, x). Returns the new tree and
    the dropped arc."""
    if len(tree.roots) != 1:
        msg = "tree_swap needs a spanning tree"
        raise ValueError(msg)
    y = tree.roots[0]
    if x == y or g.rate(y, x) == 0:
        msg = f"No arc ({y!r}, {x!r}) to swap in"
        raise ValueError(msg)
    parent = dict(tree.arcs)
    removed = (x, parent.pop(x))
    parent[y] = x
    return _forest_from_mapping(g, parent, exact), removed


def tree_unswap(
    tree: RootedForest,
    removed: tuple[str, str],
    g: RateGraph,
    *,
    exact: bool = False,
) -> RootedForest:
    """Inverse of ``tree_swap``"""
    x, former_parent = removed
    if tree.roots != (x,):
        msg = f"tree_unswap needs a tree rooted at {x!r}"
        raise ValueError(msg)
    parent = dict(tree.arcs)
    # the old root is the last state before x on the path from x's old parent
    u = former_parent
    while parent[u] != x:
        u = parent[u]
    del parent[u]
    parent[x] = former_parent
    return _forest_from_mapping(g, parent, exact)


def _log_weight(g: RateGraph, arcs: tuple[tuple[str, str], ...]) -> float:
    return math.fsum(math.log(g.rate(s, t)) for s, t in arcs)


def best_tree(
    g: RateGraph,
    settings: EngineSettings = DEFAULT_SETTINGS,
) -> BestTree:
    """Maximum-weight spanning in-tree over all roots"""
    if uses_enumeration(g, settings):
        best: tuple[Parent, float] | None = None
        for parent, weight in _iter_forests(_out_lists(g, False), root_count=1):
            if best is None or weight > best[1]:
                best = parent, float(weight)
        if best is None:  # pragma: no cover
            msg = "Graph has no spanning in-tree"
            raise ValueError(msg)
        forest = _as_forest(g, best[0], best[1])
        arcs = forest.arcs
        root = forest.roots[0]
    else:
        reversed_graph = nx.DiGraph()
        reversed_graph.add_nodes_from(g.states)
        for arc in g.arcs:
            reversed_graph.add_edge(
                arc.target,
                arc.source,
                weight=math.log(arc.rate),
            )
        arborescence = nx.maximum_spanning_arborescence(reversed_graph)
        root = next(
            node for node, degree in arborescence.in_degree() if degree == 0
        )
        arcs = tuple(
            sorted(
                ((v, u) for u, v in arborescence.edges()),
                key=lambda arc: g.index(arc[0]),
            ),
        )
    log_weight = _log_weight(g, arcs)
    return BestTree(
        root=root,
        arcs=arcs,
        weight=math.exp(log_weight),
        log_weight=log_weight,
    )
