import numpy as np
import pytest

from potentials.application.exceptions.base import (
    HorizonTooShortError,
    NotProperSubsetError,
    SamePointError,
    TooFewSamplesError,
)
from potentials.application.trajectory_oracle import (
    chunk_generator,
    escape_time_samples,
    estimate_excess,
    estimate_mfpt,
    estimate_occupation,
    estimate_pair_accumulation,
    estimate_stopped_accumulation,
    fit_tail_decay,
    sample_path,
    sample_paths,
)
from potentials.domain.graph import RateGraph, ScalarField
from potentials.domain.trajectory import (
    EscapeStop,
    HitStop,
    HorizonStop,
    TerminationReason,
    Trajectory,
)

SIGMAS = 4.0


class RecordingSink:
    def __init__(self) -> None:
        self.trajectories: list[Trajectory] = []

    def write(self, trajectory: Trajectory) -> None:
        self.trajectories.append(trajectory)


class TestSamplePaths:
    """Gillespie paths and their stop rules"""

    def test_hit_target(self, two: RateGraph) -> None:
        paths = sample_paths(two, "a", HitStop("b"), 20, seed=3)
        for path in paths:
            assert path.terminal == "b"
            assert path.reason is TerminationReason.HIT_TARGET
            assert [jump.next_state for jump in path.jumps] == ["b"]
            assert path.tail_time == 0.0

    def test_escape(self, ring: RateGraph) -> None:
        path = sample_path(ring, "1", EscapeStop(frozenset({"1", "2"})), seed=5)
        assert path.reason is TerminationReason.ESCAPED
        assert [jump.next_state for jump in path.jumps] == ["2", "3"]
        assert [state for state, _ in path.segments()] == ["1", "2"]

    def test_horizon(self, ring: RateGraph) -> None:
        for path in sample_paths(ring, "1", HorizonStop(4.0), 20, seed=11):
            assert path.reason is TerminationReason.HORIZON
            assert path.duration == pytest.approx(4.0)

    def test_start_inside_target(self, ring: RateGraph) -> None:
        path = sample_path(ring, "3", EscapeStop(frozenset({"1", "2"})), seed=0)
        assert path.jumps == ()
        assert path.terminal == "3"

    def test_reproducible(self, ring: RateGraph) -> None:
        first = sample_paths(ring, "1", HorizonStop(10.0), 5, seed=42)
        second = sample_paths(ring, "1", HorizonStop(10.0), 5, seed=42)
        assert first == second
        assert sample_path(ring, "1", HorizonStop(10.0), seed=42) == first[0]

    def test_sink_cap(self, ring: RateGraph) -> None:
        sink = RecordingSink()
        paths = sample_paths(
            ring,
            "1",
            HitStop("3"),
            5,
            seed=1,
            sink=sink,
            dump_cap=3,
        )
        assert sink.trajectories == paths[:3]

    def test_escape_needs_proper_subset(self, ring: RateGraph) -> None:
        with pytest.raises(NotProperSubsetError):
            sample_path(ring, "1", EscapeStop(frozenset(ring.states)), seed=0)

    def test_negative_horizon(self, ring: RateGraph) -> None:
        with pytest.raises(ValueError, match="nonnegative"):
            sample_path(ring, "1", HorizonStop(-1.0), seed=0)


class TestEstimators:
    """Sample means within the sigma band of the analytic values"""

    def test_mfpt(self, two: RateGraph, ring: RateGraph) -> None:
        assert estimate_mfpt(two, "a", "b", 4000, seed=1).within(0.5, SIGMAS)
        assert estimate_mfpt(ring, "1", "3", 4000, seed=1).within(2.0, SIGMAS)

    def test_stopped_accumulation(self, two: RateGraph) -> None:
        ones = ScalarField.constant(two.states, 1.0)
        estimate = estimate_stopped_accumulation(two, "a", {"a"}, ones, 4000, seed=2)
        assert estimate.within(0.5, SIGMAS)
        assert estimate.count == 4000

    def test_pair_accumulation(self, two: RateGraph, f_two: ScalarField) -> None:
        estimate = estimate_pair_accumulation(two, "a", "b", f_two, 4000, seed=3)
        assert estimate.within(1 / 3, SIGMAS)

    def test_excess_from_state(self, two: RateGraph, f_two: ScalarField) -> None:
        estimate = estimate_excess(two, "a", f_two, 10.0, 4000, seed=4)
        assert estimate.truncation_allowance == pytest.approx(0.0, abs=1e-10)
        assert estimate.within(2 / 9, SIGMAS)

    def test_excess_from_stationary_law(
        self,
        two: RateGraph,
        f_two: ScalarField,
    ) -> None:
        assert estimate_excess(two, None, f_two, 10.0, 4000, seed=5).within(0.0, SIGMAS)

    def test_occupation(self, ring: RateGraph) -> None:
        occupation = estimate_occupation(ring, "1", 300.0, 200, seed=6)
        for state in ring.states:
            assert occupation[state].within(1 / 3, SIGMAS)

    def test_tail_decay(self, two: RateGraph) -> None:
        times = escape_time_samples(two, "a", {"a"}, 10_000, seed=7)
        assert fit_tail_decay(times) == pytest.approx(2.0, rel=0.2)

    def test_workers_do_not_change_results(self, two: RateGraph) -> None:
        serial = estimate_mfpt(two, "a", "b", 2500, seed=9)
        pooled = estimate_mfpt(two, "a", "b", 2500, seed=9, workers=2)
        assert serial == pooled

    def test_chunk_streams_are_independent(self) -> None:
        first = chunk_generator(0, 0).random(4)
        again = chunk_generator(0, 0).random(4)
        other = chunk_generator(0, 1).random(4)
        np.testing.assert_array_equal(first, again)
        assert not np.array_equal(first, other)


class TestEstimatorErrors:
    """Requests the oracle refuses"""

    def test_same_point(self, two: RateGraph, f_two: ScalarField) -> None:
        with pytest.raises(SamePointError):
            estimate_mfpt(two, "a", "a", 1000, seed=0)
        with pytest.raises(SamePointError):
            estimate_pair_accumulation(two, "b", "b", f_two, 1000, seed=0)

    def test_too_few_samples(self, two: RateGraph) -> None:
        with pytest.raises(TooFewSamplesError):
            estimate_mfpt(two, "a", "b", 10, seed=0)

    def test_horizon_too_short(self, two: RateGraph, f_two: ScalarField) -> None:
        with pytest.raises(HorizonTooShortError) as info:
            estimate_excess(two, "a", f_two, 1.0, 1000, seed=0)
        assert info.value.minimum == pytest.approx(5 / 3)

    def test_tail_fit_needs_samples(self) -> None:
        with pytest.raises(TooFewSamplesError):
            fit_tail_decay([1.0, 2.0])
