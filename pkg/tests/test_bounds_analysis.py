from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from potentials.application.bounds_analysis import (
    chained_bound,
    decomposed_bound,
    global_bound,
    pair_bound,
    pair_bounds,
    uniform_bound_sweep,
    uniform_constant,
)
from potentials.application.exceptions.base import (
    DecompositionInvalidError,
    PairListRequiredError,
)
from potentials.application.graph_core import generator, param_rate_graph
from potentials.application.reference_graphs import (
    barrier_tree_graph,
    directed_ring,
    random_irreducible_graph,
)
from potentials.application.settings import DEFAULT_SETTINGS
from potentials.application.spectral_algebra import stationary_distribution
from potentials.domain.exceptions import UnknownStateError
from potentials.domain.graph import RateGraph, ScalarField
from potentials.domain.reports import BoundKind, BoundReport

from tests.conftest import ABS

random_graphs = st.builds(
    lambda seed, n: random_irreducible_graph(np.random.default_rng(seed), n),
    st.integers(0, 2**32 - 1),
    st.integers(2, 6),
)


def _holds(report: BoundReport) -> bool:
    """Every row within 1e-9 of its bound; random graphs can make a bound sharp"""
    return all(
        row.attained <= row.bound + 1e-9 * max(abs(row.bound), 1.0)
        for row in report.rows
    )


@pytest.fixture
def sweep_source() -> ScalarField:
    return ScalarField(("a", "b", "c"), [1.0, 0.0, -1.0])


class TestPairBounds:
    """|V(x) − V(y)| against ‖f‖·min(τ(x,y), τ(y,x))"""

    def test_two_state_is_sharp(self, two: RateGraph, f_two: ScalarField) -> None:
        report = pair_bound(two, f_two, "a", "b")
        row = report.rows[0]
        assert row.bound == pytest.approx(1 / 3)
        assert row.attained == pytest.approx(1 / 3)
        assert report.passed

    def test_first_passage_accumulation(
        self,
        two: RateGraph,
        f_two: ScalarField,
    ) -> None:
        report = pair_bound(two, f_two, "a", "b")
        assert report.extra["v_tilde[a,b]"] == pytest.approx(1 / 3)
        assert report.extra["v_tilde[b,a]"] == pytest.approx(-1 / 3)
        assert report.extra["difference_residual[a,b]"] <= ABS

    def test_default_pairs(self, ring: RateGraph, f_ring: ScalarField) -> None:
        report = pair_bounds(ring, f_ring)
        labels = [row.label for row in report.rows if "antisymmetry" not in row.label]
        assert labels == ["1,2", "1,3", "2,3"]
        assert report.passed

    def test_large_graph_needs_pairs(self) -> None:
        g = directed_ring(33)
        f = ScalarField.constant(g.states, 0.0)
        with pytest.raises(PairListRequiredError):
            pair_bounds(g, f)

    def test_unknown_state(self, two: RateGraph, f_two: ScalarField) -> None:
        with pytest.raises(UnknownStateError):
            pair_bound(two, f_two, "a", "c")

    @settings(max_examples=25, deadline=None)
    @given(g=random_graphs, seed=st.integers(0, 2**32 - 1))
    def test_holds_on_random_graphs(self, g: RateGraph, seed: int) -> None:
        f = ScalarField(g.states, np.random.default_rng(seed).normal(size=g.n))
        assert _holds(pair_bounds(g, f))


class TestDecomposedBound:
    """f = LE + h with h supported on D"""

    def test_pure_gradient_is_sharp(self, ring: RateGraph) -> None:
        e = ScalarField(ring.states, [0.0, 1.0, 3.0])
        f = ScalarField(ring.states, generator(ring).matrix @ e.values)
        report = decomposed_bound(ring, f, e, {"1"})
        assert report.kind is BoundKind.DECOMPOSED
        assert report.extra["h_sup"] == pytest.approx(0.0, abs=ABS)
        for row in report.rows:
            assert row.attained == pytest.approx(row.bound, abs=1e-9)
        assert report.passed
        assert report.extra["reconstruction_residual"] <= 1e-9

    def test_residual_outside_support(self, ring: RateGraph) -> None:
        e = ScalarField.constant(ring.states, 0.0)
        f = ScalarField(ring.states, [1.0, 2.0, -3.0])
        with pytest.raises(DecompositionInvalidError) as info:
            decomposed_bound(ring, f, e, {"1"})
        assert info.value.state == "2"

    @settings(max_examples=25, deadline=None)
    @given(g=random_graphs, seed=st.integers(0, 2**32 - 1))
    def test_holds_on_random_graphs(self, g: RateGraph, seed: int) -> None:
        rng = np.random.default_rng(seed)
        rho = stationary_distribution(generator(g)).values
        e = ScalarField(g.states, rng.normal(size=g.n))
        h = np.zeros(g.n)
        # ρ-orthogonal so that f stays centered
        h[0], h[1] = rho[1], -rho[0]
        f = ScalarField(g.states, generator(g).matrix @ e.values + h)
        report = decomposed_bound(g, f, e, g.states[:2])
        assert _holds(report)
        assert report.extra["reconstruction_residual"] <= 1e-8


class TestGlobalBound:
    """max |V| ≤ n·‖k‖^{n−2}·‖f‖/W"""

    def test_two_state(self, two: RateGraph, f_two: ScalarField) -> None:
        report = global_bound(two, f_two)
        row = report.rows[0]
        assert row.bound == pytest.approx(4 / 9)
        assert row.attained == pytest.approx(2 / 9)
        assert report.extra["best_tree_root"] == "b"

    def test_ring(self, ring: RateGraph, f_ring: ScalarField) -> None:
        report = global_bound(ring, f_ring)
        assert report.rows[0].bound == pytest.approx(1.0)
        assert report.rows[0].attained == pytest.approx(2 / 3)
        assert report.extra["W"] == pytest.approx(3.0)

    @settings(max_examples=25, deadline=None)
    @given(g=random_graphs, seed=st.integers(0, 2**32 - 1))
    def test_holds_on_random_graphs(self, g: RateGraph, seed: int) -> None:
        f = ScalarField(g.states, np.random.default_rng(seed).normal(size=g.n))
        assert _holds(global_bound(g, f))


class TestChainedBound:
    """Pair bounds summed along shortest chains"""

    def test_ring(self, ring: RateGraph, f_ring: ScalarField) -> None:
        report = chained_bound(ring, f_ring)
        assert len(report.rows) == 2 * ring.n
        assert report.passed

    @settings(max_examples=20, deadline=None)
    @given(g=random_graphs, seed=st.integers(0, 2**32 - 1))
    def test_holds_on_random_graphs(self, g: RateGraph, seed: int) -> None:
        f = ScalarField(g.states, np.random.default_rng(seed).normal(size=g.n))
        assert _holds(chained_bound(g, f))


class TestUniformSweep:
    """Global bound along a λ grid"""

    def test_barrier_tree(self, sweep_source: ScalarField) -> None:
        lambdas = [float(lam) for lam in range(0, 21, 2)]
        report = uniform_bound_sweep(barrier_tree_graph(), sweep_source, lambdas)
        assert [row.lam for row in report.sweep] == lambdas
        assert report.passed
        assert report.extra["best_tree_bounded_below"] is True
        assert report.extra["min_best_tree_weight"] >= 2.0 - 1e-9
        assert report.extra["uniform_constant"] == pytest.approx(9.0)
        for row in report.sweep:
            assert row.attained <= row.bound <= 9.0
        uniform_rows = [row for row in report.rows if row.label.endswith(" uniform")]
        assert len(uniform_rows) == len(lambdas)
        assert all(row.passed for row in uniform_rows)

    def test_no_constant_below_zero(self) -> None:
        pg = param_rate_graph(
            ("a", "b", "c", "d"),
            [
                ("a", "b", 1.0, 0.0),
                ("b", "c", 1.0, 0.0),
                ("c", "d", 1.0, 0.0),
                ("d", "a", 1.0, 0.0),
                ("a", "c", 1.0, 1.0),
            ],
        )
        f = ScalarField(pg.states, [1.0, 0.0, 0.0, -1.0])
        assert uniform_constant(pg, f) == pytest.approx(8.0)
        report = uniform_bound_sweep(pg, f, [-4.0, 0.0])
        assert report.sweep[0].bound > 8.0
        assert report.extra["uniform_constant"] is None
        assert not any(row.label.endswith(" uniform") for row in report.rows)
        assert any("lambda >= 0" in note for note in report.notes)
        assert report.passed

    def test_uniform_constant(self, sweep_source: ScalarField) -> None:
        assert uniform_constant(barrier_tree_graph(), sweep_source) == pytest.approx(9.0)

    def test_callable_source(self, sweep_source: ScalarField) -> None:
        report = uniform_bound_sweep(
            barrier_tree_graph(),
            lambda lam: sweep_source,
            [0.0, 1.0],
        )
        assert report.extra["uniform_constant"] is None
        assert report.passed

    def test_threaded_sweep_matches(self, sweep_source: ScalarField) -> None:
        lambdas = [0.0, 3.0, 6.0]
        serial = uniform_bound_sweep(barrier_tree_graph(), sweep_source, lambdas)
        threaded = uniform_bound_sweep(
            barrier_tree_graph(),
            sweep_source,
            lambdas,
            replace(DEFAULT_SETTINGS, workers=2),
        )
        assert serial.sweep == threaded.sweep

    def test_empty_grid(self, sweep_source: ScalarField) -> None:
        with pytest.raises(ValueError, match="empty"):
            uniform_bound_sweep(barrier_tree_graph(), sweep_source, [])
