import logging
import math
from collections.abc import Collection
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from potentials.application.exceptions.base import (
    HorizonTooShortError,
    SamePointError,
    TooFewSamplesError,
)
from potentials.application.graph_core import generator
from potentials.application.potential_theory import (
    center_source,
    proper_subset,
    quasipotential,
)
from potentials.application.sinks import TrajectorySink
from potentials.application.spectral_algebra import (
    integrated_semigroup,
    spectral_gap,
    stationary_distribution,
)
from potentials.domain.graph import FloatArray, RateGraph, ScalarField
from potentials.domain.trajectory import (
    EscapeStop,
    HitStop,
    HorizonStop,
    Jump,
    McEstimate,
    StopRule,
    TerminationReason,
    Trajectory,
)

logger = logging.getLogger(__name__)

CHUNK_SIZE = 1000
BUFFER_SIZE = 1024
MIN_SAMPLES = 100
HORIZON_GAPS = 5.0


def chunk_generator(seed: int, chunk: int) -> np.random.Generator:
    """PCG64 stream of one chunk of samples"""
    sequence = np.random.SeedSequence(seed, spawn_key=(chunk,))
    return np.random.Generator(np.random.PCG64(sequence))


class _Draws:
    """Buffered standard exponential and uniform variates"""

    __slots__ = (
        "_exponentials",
        "_next_exponential",
        "_next_uniform",
        "_rng",
        "_uniforms",
    )

    def __init__(self, rng: np.random.Generator) -> None:
        self._rng = rng
        self._exponentials = np.empty(0)
        self._uniforms = np.empty(0)
        self._next_exponential = 0
        self._next_uniform = 0

    def exponential(self) -> float:
        if self._next_exponential == self._exponentials.size:
            self._exponentials = self._rng.standard_exponential(BUFFER_SIZE)
            self._next_exponential = 0
        value = self._exponentials[self._next_exponential]
        self._next_exponential += 1
        return float(value)

    def uniform(self) -> float:
        if self._next_uniform == self._uniforms.size:
            self._uniforms = self._rng.random(BUFFER_SIZE)
            self._next_uniform = 0
        value = self._uniforms[self._next_uniform]
        self._next_uniform += 1
        return float(value)


@dataclass(frozen=True, slots=True, eq=False)
class JumpChain:
    """Exit rates and cumulative jump probabilities per state"""

    states: tuple[str, ...]
    exit_rates: FloatArray
    targets: tuple[npt.NDArray[np.intp], ...]
    cumulative: tuple[FloatArray, ...]

    @classmethod
    def from_graph(cls, g: RateGraph) -> "JumpChain":
        rates = g.rate_matrix()
        targets = []
        cumulative = []
        for row in rates:
            reachable = np.flatnonzero(row)
            sums = np.cumsum(row[reachable])
            targets.append(reachable)
            cumulative.append(sums / sums[-1])
        return cls(g.states, rates.sum(axis=1), tuple(targets), tuple(cumulative))

    def next_state(self, i: int, u: float) -> int:
        position = int(np.searchsorted(self.cumulative[i], u, side="right"))
        return int(self.targets[i][min(position, self.targets[i].size - 1)])


@dataclass(frozen=True, slots=True, eq=False)
class _Stop:
    horizon: float | None
    absorbing: npt.NDArray[np.bool_] | None
    reason: TerminationReason


def _resolve_stop(g: RateGraph, stop: StopRule) -> _Stop:
    match stop:
        case HorizonStop(horizon=horizon):
            if not horizon >= 0:
                msg = f"horizon must be nonnegative, got {horizon}"
                raise ValueError(msg)
            return _Stop(horizon, None, TerminationReason.HORIZON)
        case HitStop(target=target):
            mask = np.zeros(g.n, dtype=bool)
            mask[g.index(target)] = True
            return _Stop(None, mask, TerminationReason.HIT_TARGET)
        case EscapeStop(region=region):
            inside = proper_subset(g, region)
            mask = np.array([s not in inside for s in g.states])
            return _Stop(None, mask, TerminationReason.ESCAPED)
    msg = f"Unknown stop rule {stop!r}"  # pragma: no cover
    raise ValueError(msg)  # pragma: no cover


def _walk(
    chain: JumpChain,
    draws: _Draws,
    start: int,
    stop: _Stop,
    weights: FloatArray,
    jumps: list[Jump] | None = None,
) -> tuple[FloatArray, int, TerminationReason, float]:
    """Exact path integral of ``weights`` rows; (integral, terminal, reason, tail)"""
    i = start
    elapsed = 0.0
    integral = np.zeros(weights.shape[1])
    while True:
        if stop.absorbing is not None and stop.absorbing[i]:
            return integral, i, stop.reason, 0.0
        holding = draws.exponential() / chain.exit_rates[i]
        if stop.horizon is not None and elapsed + holding >= stop.horizon:
            tail = stop.horizon - elapsed
            integral += tail * weights[i]
            return integral, i, TerminationReason.HORIZON, tail
        elapsed += holding
        integral += holding * weights[i]
        j = chain.next_state(i, draws.uniform())
        if jumps is not None:
            jumps.append(Jump(holding, chain.states[j]))
        i = j


@dataclass(frozen=True, slots=True, eq=False)
class _ChunkTask:
    chain: JumpChain
    start: int | None
    start_cumulative: FloatArray | None
    stop: _Stop
    weights: FloatArray
    seed: int
    chunk: int
    size: int


def _run_chunk(task: _ChunkTask) -> FloatArray:
    draws = _Draws(chunk_generator(task.seed, task.chunk))
    samples = np.empty((task.size, task.weights.shape[1]))
    for k in range(task.size):
        start = task.start
        if start is None:
            position = np.searchsorted(
                task.start_cumulative,  # type: ignore[arg-type]
                draws.uniform(),
                side="right",
            )
            start = min(int(position), task.chain.exit_rates.size - 1)
        samples[k] = _walk(task.chain, draws, start, task.stop, task.weights)[0]
    return samples


def _chunks(count: int) -> list[tuple[int, int]]:
    return [
        (chunk, min(CHUNK_SIZE, count - begin))
        for chunk, begin in enumerate(range(0, count, CHUNK_SIZE))
    ]


def _sample(
    g: RateGraph,
    start: int | None,
    stop: _Stop,
    weights: FloatArray,
    count: int,
    seed: int,
    workers: int,
) -> FloatArray:
    """count × width path integrals; identical for any worker count"""
    if count < MIN_SAMPLES:
        raise TooFewSamplesError(count=count, minimum=MIN_SAMPLES)
    start_cumulative = None
    if start is None:
        rho = stationary_distribution(generator(g)).values
        start_cumulative = np.cumsum(rho) / np.sum(rho)
    chain = JumpChain.from_graph(g)
    tasks = [
        _ChunkTask(chain, start, start_cumulative, stop, weights, seed, chunk, size)
        for chunk, size in _chunks(count)
    ]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, tasks))
    else:
        parts = [_run_chunk(task) for task in tasks]
    logger.debug("Drew %d samples in %d chunks (seed %d)", count, len(tasks), seed)
    return np.concatenate(parts)


def _estimate(
    samples: npt.NDArray[np.float64],
    seed: int,
    truncation_allowance: float | None = None,
) -> McEstimate:
    count = samples.size
    return McEstimate(
        mean=float(np.mean(samples)),
        stderr=float(np.std(samples, ddof=1) / math.sqrt(count)),
        count=count,
        seed=seed,
        truncation_allowance=truncation_allowance,
    )


def _column(values: npt.ArrayLike) -> FloatArray:
    return np.asarray(values, dtype=np.float64).reshape(-1, 1)


def sample_path(
    g: RateGraph,
    x0: str,
    stop: StopRule,
    seed: int,
) -> Trajectory:
    """Gillespie path: Exp(exit rate) holding times, jumps ∝ k(x, ·)"""
    return sample_paths(g, x0, stop, 1, seed)[0]


def sample_paths(
    g: RateGraph,
    x0: str,
    stop: StopRule,
    count: int,
    seed: int,
    *,
    sink: TrajectorySink | None = None,
    dump_cap: int = 100,
) -> list[Trajectory]:
    """``count`` paths on the chunked streams; the first ``dump_cap`` go to
    ``sink``"""
    chain = JumpChain.from_graph(g)
    resolved = _resolve_stop(g, stop)
    start = g.index(x0)
    weights = np.zeros((g.n, 1))
    trajectories: list[Trajectory] = []
    for chunk, size in _chunks(count):
        draws = _Draws(chunk_generator(seed, chunk))
        for _ in range(size):
            jumps: list[Jump] = []
            _, terminal, reason, tail = _walk(
                chain,
                draws,
                start,
                resolved,
                weights,
                jumps,
            )
            trajectory = Trajectory(
                initial=x0,
                jumps=tuple(jumps),
                terminal=g.states[terminal],
                reason=reason,
                tail_time=tail,
            )
            if sink is not None and len(trajectories) < dump_cap:
                sink.write(trajectory)
            trajectories.append(trajectory)
    return trajectories


def estimate_mfpt(
    g: RateGraph,
    x: str,
    z: str,
    count: int,
    seed: int,
    *,
    workers: int = 1,
) -> McEstimate:
    if x == z:
        raise SamePointError(x)
    samples = _sample(
        g,
        g.index(x),
        _resolve_stop(g, HitStop(z)),
        np.ones((g.n, 1)),
        count,
        seed,
        workers,
    )
    return _estimate(samples, seed)


def estimate_stopped_accumulation(
    g: RateGraph,
    x: str,
    interior: Collection[str],
    f: ScalarField,
    count: int,
    seed: int,
    *,
    workers: int = 1,
) -> McEstimate:
    """Samples Σ holding_time·f(state) until escape from H"""
    stop = _resolve_stop(g, EscapeStop(frozenset(interior)))
    samples = _sample(g, g.index(x), stop, _column(f.values), count, seed, workers)
    return _estimate(samples, seed)


def estimate_pair_accumulation(
    g: RateGraph,
    x: str,
    y: str,
    f: ScalarField,
    count: int,
    seed: int,
    *,
    workers: int = 1,
) -> McEstimate:
    """Samples ∫ (f − ⟨f⟩)(X_t) dt from x until the first visit to y"""
    if x == y:
        raise SamePointError(x)
    rho = stationary_distribution(generator(g)).values
    source = f.centered(rho)
    samples = _sample(
        g,
        g.index(x),
        _resolve_stop(g, HitStop(y)),
        _column(source.values),
        count,
        seed,
        workers,
    )
    return _estimate(samples, seed)


def estimate_excess(
    g: RateGraph,
    x: str | None,
    f: ScalarField,
    horizon: float,
    count: int,
    seed: int,
    *,
    workers: int = 1,
) -> McEstimate:
    """Samples ∫_0^T f(X_t) dt; ``x=None`` starts from the stationary law.

    The truncation allowance is the exact bias V(x) − ∫_0^T e^{tL}f(x) dt.
    """
    L = generator(g)
    rho = stationary_distribution(L).values
    source = center_source(f, rho, auto_center=True)
    gap = spectral_gap(L)
    if gap is not None and horizon < HORIZON_GAPS / gap:
        raise HorizonTooShortError(horizon=horizon, minimum=HORIZON_GAPS / gap)
    start = None if x is None else g.index(x)
    samples = _sample(
        g,
        start,
        _Stop(horizon, None, TerminationReason.HORIZON),
        _column(source.values),
        count,
        seed,
        workers,
    )
    v = quasipotential(g, source).values
    integral, _ = integrated_semigroup(L, source.values, horizon)
    bias = v - integral
    allowance = abs(float(rho @ bias)) if start is None else abs(float(bias[start]))
    return _estimate(samples, seed, truncation_allowance=allowance)


def estimate_occupation(
    g: RateGraph,
    x0: str,
    horizon: float,
    count: int,
    seed: int,
    *,
    workers: int = 1,
) -> dict[str, McEstimate]:
    """Fraction of [0, T] spent in each state"""
    if not horizon > 0:
        msg = f"horizon must be positive, got {horizon}"
        raise ValueError(msg)
    samples = _sample(
        g,
        g.index(x0),
        _Stop(horizon, None, TerminationReason.HORIZON),
        np.eye(g.n) / horizon,
        count,
        seed,
        workers,
    )
    return {
        state: _estimate(samples[:, i], seed)
        for i, state in enumerate(g.states)
    }


def escape_time_samples(
    g: RateGraph,
    x: str,
    interior: Collection[str],
    count: int,
    seed: int,
    *,
    workers: int = 1,
) -> FloatArray:
    stop = _resolve_stop(g, EscapeStop(frozenset(interior)))
    return _sample(g, g.index(x), stop, np.ones((g.n, 1)), count, seed, workers)[:, 0]


def fit_tail_decay(
    samples: npt.ArrayLike,
    *,
    upper: float = 0.5,
    lower: float = 0.01,
) -> float:
    """Decay rate of the empirical survival P(T > t), fitted log-linearly
    where the survival lies in [lower, upper]"""
    times = np.sort(np.asarray(samples, dtype=np.float64))
    count = times.size
    survival = 1.0 - np.arange(1, count + 1) / count
    window = (survival <= upper) & (survival >= lower)
    if np.count_nonzero(window) < 2:  # noqa: PLR2004
        raise TooFewSamplesError(count=int(np.count_nonzero(window)), minimum=2)
    slope, _ = np.polyfit(times[window], np.log(survival[window]), 1)
    return float(-slope)
