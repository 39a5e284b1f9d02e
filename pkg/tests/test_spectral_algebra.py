import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from potentials.application.exceptions.base import (
    NegativeResolventError,
    SingularBeyondNullityError,
)
from potentials.application.graph_core import generator
from potentials.application.reference_graphs import random_irreducible_graph
from potentials.application.spectral_algebra import (
    group_inverse,
    integrated_semigroup,
    rank_one_projector,
    resolvent,
    semigroup_apply,
    spectral_gap,
    stationary_distribution,
    verify_group_axioms,
)
from potentials.domain.graph import GeneratorMatrix, RateGraph

random_graphs = st.builds(
    lambda seed, n: random_irreducible_graph(np.random.default_rng(seed), n),
    st.integers(0, 2**32 - 1),
    st.integers(2, 8),
)


class TestStationaryDistribution:
    """ρL = 0 with Σρ = 1"""

    def test_two_state(self, two: RateGraph) -> None:
        rho = stationary_distribution(generator(two))
        np.testing.assert_allclose(rho.values, [1 / 3, 2 / 3], atol=1e-12)

    def test_ring(self, ring: RateGraph) -> None:
        rho = stationary_distribution(generator(ring))
        np.testing.assert_allclose(rho.values, [1 / 3] * 3, atol=1e-12)

    def test_reducible_generator(self) -> None:
        L = GeneratorMatrix(
            ("a", "b", "c"),
            np.array([[0.0, 0.0, 0.0], [0.0, -1.0, 1.0], [0.0, 1.0, -1.0]]),
        )
        with pytest.raises(SingularBeyondNullityError):
            stationary_distribution(L)

    @settings(max_examples=30, deadline=None)
    @given(g=random_graphs)
    def test_residual(self, g: RateGraph) -> None:
        L = generator(g)
        rho = stationary_distribution(L).values
        assert math.fsum(rho) == pytest.approx(1.0, abs=1e-12)
        assert np.all(rho > 0)
        assert float(np.max(np.abs(rho @ L.matrix))) <= 1e-11 * L.norm


class TestGroupInverse:
    """L^# and its axioms"""

    def test_two_state(self, two: RateGraph) -> None:
        L = generator(two)
        np.testing.assert_allclose(group_inverse(L).matrix, L.matrix / 9, atol=1e-12)

    def test_projector_rows(self) -> None:
        np.testing.assert_array_equal(
            rank_one_projector([0.25, 0.75]),
            [[0.25, 0.75], [0.25, 0.75]],
        )

    @settings(max_examples=30, deadline=None)
    @given(g=random_graphs)
    def test_axioms(self, g: RateGraph) -> None:
        L = generator(g)
        report = verify_group_axioms(L, group_inverse(L).matrix)
        assert report.passed, report.failures

    @settings(max_examples=30, deadline=None)
    @given(g=random_graphs)
    def test_annihilates_constants_and_rho(self, g: RateGraph) -> None:
        L = generator(g)
        rho = stationary_distribution(L)
        sharp = group_inverse(L, rho).matrix
        scale = float(np.max(np.abs(sharp)))
        assert float(np.max(np.abs(sharp.sum(axis=1)))) <= 1e-10 * scale
        assert float(np.max(np.abs(rho.values @ sharp))) <= 1e-10 * scale

    def test_axioms_reject_wrong_inverse(self, ring: RateGraph) -> None:
        L = generator(ring)
        report = verify_group_axioms(L, np.eye(3))
        assert not report.passed


class TestResolvent:
    """(I + α𝓛)^{-1}"""

    def test_two_state(self, two: RateGraph) -> None:
        np.testing.assert_allclose(
            resolvent(generator(two), 1.0),
            [[0.5, 0.5], [0.25, 0.75]],
            atol=1e-12,
        )

    @pytest.mark.parametrize("alpha", [0.0, -1.0])
    def test_rejects_nonpositive_alpha(self, ring: RateGraph, alpha: float) -> None:
        with pytest.raises(ValueError, match="alpha"):
            resolvent(generator(ring), alpha)

    def test_sign_error_raises(self) -> None:
        # the Laplacian passed off as a generator, bypassing validation
        flipped = object.__new__(GeneratorMatrix)
        object.__setattr__(flipped, "states", ("a", "b"))
        object.__setattr__(flipped, "matrix", np.array([[2.0, -2.0], [-1.0, 1.0]]))
        with pytest.raises(NegativeResolventError) as info:
            resolvent(flipped, 0.5)
        assert info.value.value == pytest.approx(-1.0)

    @settings(max_examples=30, deadline=None)
    @given(g=random_graphs, alpha=st.sampled_from([0.1, 1.0, 10.0]))
    def test_stochastic(self, g: RateGraph, alpha: float) -> None:
        matrix = resolvent(generator(g), alpha)
        assert np.all(matrix >= 0)
        np.testing.assert_allclose(matrix.sum(axis=1), 1.0, atol=1e-10)


class TestSemigroup:
    """e^{tL}, its integral and the spectral gap"""

    def test_gap_two_state(self, two: RateGraph) -> None:
        assert spectral_gap(generator(two)) == pytest.approx(3.0)

    def test_gap_ring(self, ring: RateGraph) -> None:
        assert spectral_gap(generator(ring)) == pytest.approx(1.5)

    def test_constants_preserved(self, ring: RateGraph) -> None:
        np.testing.assert_allclose(
            semigroup_apply(generator(ring), np.ones(3), 2.5),
            np.ones(3),
            atol=1e-12,
        )

    @settings(max_examples=20, deadline=None)
    @given(g=random_graphs, t=st.sampled_from([0.1, 1.0, 10.0]))
    def test_stationary_expectation_preserved(self, g: RateGraph, t: float) -> None:
        L = generator(g)
        rho = stationary_distribution(L).values
        h = np.arange(g.n, dtype=float)
        assert rho @ semigroup_apply(L, h, t) == pytest.approx(rho @ h, abs=1e-9 * g.n)

    def test_integral_of_eigenvector(self, two: RateGraph) -> None:
        f = np.array([2 / 3, -1 / 3])
        integral, tail = integrated_semigroup(generator(two), f, 2.0)
        decay = math.exp(-6.0)
        np.testing.assert_allclose(integral, (1 - decay) / 3 * f, atol=1e-12)
        np.testing.assert_allclose(tail, decay * f, atol=1e-12)
