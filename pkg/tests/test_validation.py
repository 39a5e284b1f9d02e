from typing import Any

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from potentials.application import validation
from potentials.application.graph_core import evaluate_at
from potentials.application.reference_graphs import (
    barrier_tree_graph,
    directed_ring,
    random_irreducible_graph,
)
from potentials.application.trajectory_oracle import estimate_occupation
from potentials.application.validation import (
    monte_carlo_checks,
    validate_graph,
    validate_reference_examples,
    validate_suite,
)
from potentials.domain.graph import RateGraph
from potentials.domain.reports import ValidationReport


def _failed(report: ValidationReport) -> list[str]:
    return [
        f"{check.name}: {check.value:.3g} > {check.tolerance:.3g}"
        for check in report.failures
    ]


class TestReferenceExamples:
    """Hand-derived values on the two-state chain, the 3-ring and K3"""

    def test_all_pinned_values(self) -> None:
        report = validate_reference_examples()
        assert report.checks
        assert report.passed, _failed(report)


class TestValidateGraph:
    """Every identity on a single graph"""

    def test_ring(self, ring: RateGraph) -> None:
        report = validate_graph(ring, rng=np.random.default_rng(1))
        assert report.passed, _failed(report)

    def test_evaluated_barrier_graph(self) -> None:
        report = validate_graph(evaluate_at(barrier_tree_graph(), 2.0))
        assert report.passed, _failed(report)

    def test_larger_ring_without_enumeration(self) -> None:
        report = validate_graph(directed_ring(12))
        assert report.passed, _failed(report)

    @settings(max_examples=10, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 7))
    def test_random_graphs(self, seed: int, n: int) -> None:
        rng = np.random.default_rng(seed)
        report = validate_graph(random_irreducible_graph(rng, n), rng=rng)
        assert report.passed, _failed(report)


class TestMonteCarlo:
    """Sampled estimates against the analytic values"""

    def test_bands(self) -> None:
        report = monte_carlo_checks(seed=0, samples=10_000)
        assert report.passed, _failed(report)

    def test_occupation_horizon_follows_gap(self, monkeypatch: pytest.MonkeyPatch) -> None:
        horizons: list[float] = []

        def recording(g: RateGraph, x0: str, horizon: float, *args: Any, **kwargs: Any) -> Any:
            horizons.append(horizon)
            return estimate_occupation(g, x0, horizon, *args, **kwargs)

        monkeypatch.setattr(validation, "estimate_occupation", recording)
        monte_carlo_checks(seed=0, samples=200)
        # gaps: 3 for the two-state chain, 1.5 for the 3-ring
        assert horizons == pytest.approx([1000.0 / 3.0, 1000.0 / 1.5])


class TestSuite:
    """Reference, Monte Carlo, input and random graphs together"""

    def test_small_suite(self, two: RateGraph) -> None:
        report = validate_suite([two], n_random=2, seed=3, mc_samples=2000)
        names = [check.name for check in report.checks]
        assert any(name.startswith("reference: ") for name in names)
        assert any(name.startswith("mc: ") for name in names)
        assert any(name.startswith("input 0: ") for name in names)
        assert any(name.startswith("random 1 ") for name in names)
        assert report.passed, _failed(report)
