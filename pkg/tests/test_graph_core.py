import math
from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from potentials.application.graph_core import (
    SMALLEST_RATE,
    ArcRecord,
    GraphDocument,
    build_graph,
    build_rate_graph,
    check_irreducible,
    evaluate_at,
    generator,
    laplacian,
    param_rate_graph,
    rate_graph,
)
from potentials.application.reference_graphs import (
    complete_graph,
    random_irreducible_graph,
)
from potentials.domain.exceptions import (
    DuplicateArcError,
    InvalidGeneratorError,
    MixedArcFormsError,
    NonpositiveRateError,
    NotStronglyConnectedError,
    SelfLoopError,
    TooFewStatesError,
    UnknownStateError,
)
from potentials.domain.graph import GeneratorMatrix, ParamRateGraph, RateGraph


def _document(states: list[str], *arcs: ArcRecord) -> GraphDocument:
    return GraphDocument(states=states, arcs=list(arcs))


def _reachable_everywhere(g: RateGraph) -> bool:
    adjacency = {s: [a.target for a in g.out_arcs(s)] for s in g.states}
    for source in g.states:
        seen = {source}
        queue = deque([source])
        while queue:
            for target in adjacency[queue.popleft()]:
                if target not in seen:
                    seen.add(target)
                    queue.append(target)
        if len(seen) != g.n:
            return False
    return True


class TestBuildRateGraph:
    """Parsing of graph documents into validated rate graphs"""

    def test_two_state(self) -> None:
        g = build_rate_graph(
            _document(
                ["a", "b"],
                ArcRecord(source="a", target="b", rate=2),
                ArcRecord(source="b", target="a", rate=1),
            ),
        )
        assert g.states == ("a", "b")
        assert g.rate("a", "b") == 2
        assert g.rate("b", "a") == 1

    def test_missing_return_arc(self) -> None:
        with pytest.raises(NotStronglyConnectedError) as info:
            build_rate_graph(
                _document(["a", "b"], ArcRecord(source="a", target="b", rate=2)),
            )
        assert (info.value.source, info.value.target) == ("b", "a")

    def test_arcs_sorted_row_major(self) -> None:
        g = build_rate_graph(
            _document(
                ["1", "2", "3"],
                ArcRecord(source="3", target="1", rate=1),
                ArcRecord(source="2", target="3", rate=1),
                ArcRecord(source="1", target="2", rate=1),
            ),
        )
        assert [(a.source, a.target) for a in g.arcs] == [
            ("1", "2"),
            ("2", "3"),
            ("3", "1"),
        ]

    def test_parallel_arcs_merged_with_note(self) -> None:
        g = rate_graph(("a", "b"), [("a", "b", 1.0), ("a", "b", 2.0), ("b", "a", 1.0)])
        assert g.rate("a", "b") == 3.0
        assert len(g.notes) == 1
        assert "merged 2 parallel arcs a->b" in g.notes[0]

    def test_parallel_arcs_rejected_when_strict(self) -> None:
        with pytest.raises(DuplicateArcError):
            rate_graph(
                ("a", "b"),
                [("a", "b", 1.0), ("a", "b", 2.0), ("b", "a", 1.0)],
                strict=True,
            )

    def test_parameterized_duplicates_rejected(self) -> None:
        with pytest.raises(DuplicateArcError):
            param_rate_graph(
                ("a", "b"),
                [("a", "b", 1.0, 0.0), ("a", "b", 1.0, 1.0), ("b", "a", 1.0, 0.0)],
            )

    def test_self_loop(self) -> None:
        with pytest.raises(SelfLoopError):
            rate_graph(("a", "b"), [("a", "a", 1.0), ("a", "b", 1.0), ("b", "a", 1.0)])

    @pytest.mark.parametrize("rate", [0.0, -1.0, math.inf, math.nan])
    def test_nonpositive_rate(self, rate: float) -> None:
        with pytest.raises(NonpositiveRateError):
            rate_graph(("a", "b"), [("a", "b", rate), ("b", "a", 1.0)])

    @pytest.mark.parametrize("rate", [-1.0, math.nan, -math.inf])
    def test_invalid_parallel_rate_not_absorbed(self, rate: float) -> None:
        with pytest.raises(NonpositiveRateError) as info:
            rate_graph(("a", "b"), [("a", "b", 2.0), ("a", "b", rate), ("b", "a", 1.0)])
        assert (info.value.source, info.value.target) == ("a", "b")

    def test_unknown_state(self) -> None:
        with pytest.raises(UnknownStateError) as info:
            rate_graph(("a", "b"), [("a", "c", 1.0), ("b", "a", 1.0)])
        assert info.value.state == "c"

    def test_single_state(self) -> None:
        with pytest.raises(TooFewStatesError):
            rate_graph(("a",), [])

    def test_mixed_arc_forms(self) -> None:
        with pytest.raises(MixedArcFormsError):
            build_graph(
                _document(
                    ["a", "b"],
                    ArcRecord(source="a", target="b", rate=1),
                    ArcRecord(source="b", target="a", prefactor=1, barrier=0),
                ),
            )

    def test_parameterized_document(self) -> None:
        g = build_graph(
            _document(
                ["a", "b"],
                ArcRecord(source="a", target="b", prefactor=2, barrier=1),
                ArcRecord(source="b", target="a", prefactor=1, barrier=0),
            ),
        )
        assert isinstance(g, ParamRateGraph)


class TestGenerator:
    """Backward generator and Laplacian"""

    def test_two_state(self, two: RateGraph) -> None:
        np.testing.assert_array_equal(generator(two).matrix, [[-2, 2], [1, -1]])

    def test_ring(self, ring: RateGraph) -> None:
        np.testing.assert_array_equal(
            generator(ring).matrix,
            [[-1, 1, 0], [0, -1, 1], [1, 0, -1]],
        )

    def test_laplacian_is_negated(self, ring: RateGraph) -> None:
        L = generator(ring)
        np.testing.assert_array_equal(laplacian(L), -L.matrix)

    def test_rejects_positive_row_sum(self) -> None:
        with pytest.raises(InvalidGeneratorError):
            GeneratorMatrix(("a", "b"), np.array([[-1.0, 2.0], [1.0, -1.0]]))

    @pytest.mark.parametrize("bad", [math.nan, math.inf])
    def test_rejects_non_finite_entry(self, bad: float) -> None:
        with pytest.raises(InvalidGeneratorError) as info:
            GeneratorMatrix(("a", "b"), np.array([[-1.0, 1.0], [bad, -1.0]]))
        assert info.value.row == 1

    def test_rejects_overflowing_row_sum(self) -> None:
        big = np.finfo(np.float64).max
        with pytest.raises(InvalidGeneratorError, match="row sum"):
            GeneratorMatrix(
                ("a", "b", "c"),
                np.array([[-1.0, big, big], [1.0, -1.0, 0.0], [0.0, 1.0, -1.0]]),
            )

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 9))
    def test_rows_sum_to_zero(self, seed: int, n: int) -> None:
        g = random_irreducible_graph(np.random.default_rng(seed), n)
        L = generator(g).matrix
        assert np.all(np.abs(L.sum(axis=1)) <= 1e-12 * np.max(np.abs(L)))
        off = L[~np.eye(n, dtype=bool)]
        assert np.all(off >= 0)
        for arc in g.arcs:
            assert L[g.index(arc.source), g.index(arc.target)] == arc.rate


class TestIrreducibility:
    """Strong connectivity with witnesses"""

    def test_ring(self, ring: RateGraph) -> None:
        assert check_irreducible(ring).is_irreducible

    def test_complete(self) -> None:
        assert check_irreducible(complete_graph(4)).is_irreducible

    def test_witness(self) -> None:
        g = ParamRateGraph(("a", "b"), ())
        result = check_irreducible(g)
        assert not result.is_irreducible
        assert result.witness == ("a", "b")

    @settings(max_examples=40, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 12))
    def test_agrees_with_breadth_first_search(self, seed: int, n: int) -> None:
        g = random_irreducible_graph(np.random.default_rng(seed), n)
        assert check_irreducible(g).is_irreducible == _reachable_everywhere(g)


class TestEvaluateAt:
    """Arrhenius evaluation k = a·exp(−λb)"""

    def _pg(self, prefactor: float, barrier: float) -> ParamRateGraph:
        return param_rate_graph(
            ("a", "b"),
            [("a", "b", prefactor, barrier), ("b", "a", 1.0, 0.0)],
        )

    def test_barrier_free(self) -> None:
        assert evaluate_at(self._pg(1.0, 0.0), 37.0).rate("a", "b") == 1.0

    def test_zero_lambda_gives_prefactor(self) -> None:
        assert evaluate_at(self._pg(2.0, 1.0), 0.0).rate("a", "b") == 2.0

    def test_log_four(self) -> None:
        rate = evaluate_at(self._pg(1.0, 1.0), math.log(4)).rate("a", "b")
        assert rate == pytest.approx(0.25, abs=1e-15)

    def test_underflow_clamped(self) -> None:
        g = evaluate_at(self._pg(1.0, 1000.0), 10.0)
        assert g.rate("a", "b") == SMALLEST_RATE
        assert any("underflowed" in note for note in g.notes)

    def test_overflow_clamped(self) -> None:
        g = evaluate_at(self._pg(1.0, -1000.0), 10.0)
        assert math.isfinite(g.rate("a", "b"))
        assert any("overflowed" in note for note in g.notes)

    def test_infinite_lambda(self) -> None:
        with pytest.raises(ValueError, match="finite"):
            evaluate_at(self._pg(1.0, 1.0), math.inf)
