"""Seeded Monte Carlo trajectories of repeated ancilla measurements.

A trajectory starts from the configured initial state, samples m binary
outcomes (one uniform draw each) with the exact per-step probabilities,
applies the corresponding diagonal Kraus update, and records the catness
at the configured checkpoints.

Reproducibility: every trajectory draws from its own counter-based
stream, Philox keyed with (master_seed, trajectory_index), so ensembles
are bit-identical for any worker count or scheduling order.  Replaying a
stored outcome sequence goes through the same update path and therefore
reproduces recorded catness values exactly.

The engine evolves all sector blocks stacked into one zero-padded 3-d
array so each step costs a handful of vectorized operations; outcome
probabilities equal ``measurement.outcome_probabilities`` up to summation
order (tested at 1e-12).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .blocks import BlockBasis, EnsembleState, all_up_state, build_block_basis, thermal_state
from .errors import ConfigurationError, DomainError, ImpossibleOutcomeError
from .measurement import MINUS, PLUS, PROBABILITY_FLOOR, KrausPair, build_kraus
from .metric import catness

DEFAULT_CHECKPOINTS = (10, 50, 100, 600, 1000)

_SEED_MASK = 0xFFFFFFFFFFFFFFFF

INITIAL_CONVENTIONS = ("gibbs", "all_up")


@dataclass(frozen=True)
class TrajectoryConfig:
    """Parameters of one Monte Carlo experiment.

    ``checkpoints=None`` resolves to the default set intersected with
    [0, m] (falling back to {0} when the intersection is empty, so short
    runs still record the initial value).  ``initial`` selects the Gibbs
    state of the longitudinal field or the all-up product state (the
    zero-temperature convention of the closed-form analysis).
    """

    n: int
    beta: float
    omega_p: float
    gt: float
    m: int
    checkpoints: tuple[int, ...] | None = None
    master_seed: int = 0
    initial: str = "gibbs"

    def __post_init__(self):
        if self.m < 0:
            raise ConfigurationError(f"m must be >= 0, got {self.m}")
        if self.initial not in INITIAL_CONVENTIONS:
            raise ConfigurationError(
                f"initial must be one of {INITIAL_CONVENTIONS}, got {self.initial!r}"
            )
        if self.checkpoints is not None:
            cps = tuple(sorted(set(int(c) for c in self.checkpoints)))
            if cps and (cps[0] < 0 or cps[-1] > self.m):
                raise ConfigurationError(
                    f"checkpoints {cps} not contained in [0, {self.m}]"
                )
            object.__setattr__(self, "checkpoints", cps)

    def resolved_checkpoints(self) -> tuple[int, ...]:
        if self.checkpoints is not None:
            return self.checkpoints
        cps = tuple(c for c in DEFAULT_CHECKPOINTS if c <= self.m)
        return cps if cps else (0,)


@dataclass
class TrajectoryRecord:
    """Outcome sequence and checkpoint catness of one trajectory."""

    trajectory_index: int
    outcomes: np.ndarray
    k: int
    catness_at: dict[int, float]
    final_state: EnsembleState | None = None


@dataclass(frozen=True)
class EnsembleAverage:
    """Per-checkpoint mean catness over an ensemble of trajectories."""

    checkpoints: tuple[int, ...]
    mean: np.ndarray
    stderr: np.ndarray
    runs: int


def trajectory_stream(master_seed: int, trajectory_index: int) -> np.random.Generator:
    """Counter-based per-trajectory stream: Philox keyed with
    (master_seed, trajectory_index)."""
    key = np.array(
        [master_seed & _SEED_MASK, trajectory_index & _SEED_MASK], dtype=np.uint64
    )
    return np.random.Generator(np.random.Philox(key=key))


def sample_outcome(p_plus: float, stream: np.random.Generator) -> int:
    """+1 with probability p_plus, else -1; consumes exactly one uniform."""
    if not 0.0 <= p_plus <= 1.0:
        raise DomainError(f"p_plus must lie in [0, 1], got {p_plus}")
    return PLUS if stream.random() < p_plus else MINUS


def initial_state(config: TrajectoryConfig, basis: BlockBasis) -> EnsembleState:
    if config.initial == "gibbs":
        return thermal_state(basis, config.beta, config.omega_p)
    return all_up_state(basis)


class _Engine:
    """Padded stacked-block evolution shared by sampling and replay.

    Both supported initial states and the sine amplitudes are real, so
    the evolving blocks stay real symmetric; the engine works in float64
    and converts back to the complex public representation at
    checkpoints.
    """

    def __init__(self, basis: BlockBasis, kraus: KrausPair):
        self.basis = basis
        self.kraus = kraus
        dims = [s.dim for s in basis.sectors]
        ns, dmax = len(dims), max(dims)
        self.dims = dims
        self.weighted_plus_sq = np.zeros((ns, dmax))
        self.weighted_minus_sq = np.zeros((ns, dmax))
        self.amp_plus = np.zeros((ns, dmax))
        self.amp_minus = np.zeros((ns, dmax))
        for i, sector in enumerate(basis.sectors):
            d = dims[i]
            w = float(sector.multiplicity)
            ap = kraus.amp_plus[i]
            am = kraus.amp_minus[i]
            self.weighted_plus_sq[i, :d] = w * ap * ap
            self.weighted_minus_sq[i, :d] = w * am * am
            self.amp_plus[i, :d] = ap
            self.amp_minus[i, :d] = am

    def pack(self, state: EnsembleState) -> np.ndarray:
        ns, dmax = self.amp_plus.shape
        stacked = np.zeros((ns, dmax, dmax))
        for i, block in enumerate(state.blocks):
            d = self.dims[i]
            stacked[i, :d, :d] = block.real
        return stacked

    def unpack(self, stacked: np.ndarray) -> EnsembleState:
        blocks = [
            np.ascontiguousarray(stacked[i, :d, :d], dtype=np.complex128)
            for i, d in enumerate(self.dims)
        ]
        return EnsembleState(self.basis, blocks)

    def probabilities(self, stacked: np.ndarray) -> tuple[float, float]:
        diag = np.einsum("kii->ki", stacked)
        p_plus = float(np.einsum("ki,ki->", self.weighted_plus_sq, diag))
        p_minus = float(np.einsum("ki,ki->", self.weighted_minus_sq, diag))
        return p_plus, p_minus

    def apply(self, stacked: np.ndarray, outcome: int, p: float) -> None:
        if p <= PROBABILITY_FLOOR:
            raise ImpossibleOutcomeError(f"outcome {outcome:+d} has probability {p}")
        amps = self.amp_plus if outcome == PLUS else self.amp_minus
        b = amps * (1.0 / math.sqrt(p))
        stacked *= b[:, :, None]
        stacked *= b[:, None, :]


def _evolve(
    config: TrajectoryConfig,
    engine: _Engine,
    outcome_source: Callable[[int, float], int],
    trajectory_index: int,
    retain_final_state: bool,
) -> TrajectoryRecord:
    checkpoints = set(config.resolved_checkpoints())
    stacked = engine.pack(initial_state(config, engine.basis))
    catness_at: dict[int, float] = {}
    if 0 in checkpoints:
        catness_at[0] = catness(engine.unpack(stacked)).value
    outcomes = np.empty(config.m, dtype=np.int8)
    for step in range(1, config.m + 1):
        p_plus, p_minus = engine.probabilities(stacked)
        outcome = outcome_source(step - 1, min(max(p_plus, 0.0), 1.0))
        outcomes[step - 1] = outcome
        engine.apply(stacked, outcome, p_plus if outcome == PLUS else p_minus)
        if step in checkpoints:
            catness_at[step] = catness(engine.unpack(stacked)).value
    return TrajectoryRecord(
        trajectory_index=trajectory_index,
        outcomes=outcomes,
        k=int(np.count_nonzero(outcomes == PLUS)),
        catness_at=catness_at,
        final_state=engine.unpack(stacked) if retain_final_state else None,
    )


def _sampling_source(stream: np.random.Generator) -> Callable[[int, float], int]:
    return lambda _step, p_plus: sample_outcome(p_plus, stream)


def run_trajectory(
    config: TrajectoryConfig,
    basis: BlockBasis,
    kraus: KrausPair,
    stream: np.random.Generator,
    trajectory_index: int = 0,
    retain_final_state: bool = False,
) -> TrajectoryRecord:
    """One seeded trajectory: sample, update, record checkpoint catness."""
    engine = _Engine(basis, kraus)
    return _evolve(
        config,
        engine,
        lambda _step, p_plus: sample_outcome(p_plus, stream),
        trajectory_index,
        retain_final_state,
    )


def replay_trajectory(
    config: TrajectoryConfig,
    basis: BlockBasis,
    kraus: KrausPair,
    outcomes: Sequence[int],
    trajectory_index: int = 0,
    retain_final_state: bool = False,
) -> TrajectoryRecord:
    """Deterministically re-run a stored outcome sequence."""
    seq = np.asarray(outcomes, dtype=np.int8)
    if seq.shape != (config.m,) or not np.all(np.isin(seq, (PLUS, MINUS))):
        raise DomainError("outcomes must be a length-m sequence of +1/-1")
    engine = _Engine(basis, kraus)
    return _evolve(
        config,
        engine,
        lambda step, _p: int(seq[step]),
        trajectory_index,
        retain_final_state,
    )


# -------------------------------------------------------------- ensembles

_WORKER: dict = {}


def _worker_init(config: TrajectoryConfig) -> None:
    basis = build_block_basis(config.n)
    kraus = build_kraus(basis, config.gt)
    _WORKER["config"] = config
    _WORKER["engine"] = _Engine(basis, kraus)


def _worker_run(args: tuple[int, int, bool]) -> list[TrajectoryRecord]:
    lo, hi, retain = args
    config = _WORKER["config"]
    engine = _WORKER["engine"]
    records = []
    for idx in range(lo, hi):
        stream = trajectory_stream(config.master_seed, idx)
        records.append(
            _evolve(
                config,
                engine,
                lambda _step, p_plus: sample_outcome(p_plus, stream),
                idx,
                retain,
            )
        )
    return records


def run_ensemble(
    config: TrajectoryConfig,
    runs: int,
    workers: int = 1,
    retain_final_states: bool = False,
) -> tuple[EnsembleAverage, list[TrajectoryRecord]]:
    """Independent trajectories 0..runs-1 plus their per-checkpoint average.

    Results do not depend on ``workers``: streams are derived from the
    trajectory index and aggregation runs over index order with pairwise
    summation.
    """
    if runs < 1:
        raise DomainError(f"need at least one run, got {runs}")
    if workers < 1:
        raise DomainError(f"workers must be >= 1, got {workers}")
    if workers == 1:
        _worker_init(config)
        records = _worker_run((0, runs, retain_final_states))
        _WORKER.clear()
    else:
        bounds = np.linspace(0, runs, workers + 1, dtype=int)
        chunks = [
            (int(lo), int(hi), retain_final_states)
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_worker_init, initargs=(config,)
        ) as pool:
            records = [rec for chunk in pool.map(_worker_run, chunks) for rec in chunk]
    records.sort(key=lambda r: r.trajectory_index)
    checkpoints = config.resolved_checkpoints()
    mean = np.zeros(len(checkpoints))
    stderr = np.zeros(len(checkpoints))
    for i, cp in enumerate(checkpoints):
        values = np.array([r.catness_at[cp] for r in records])
        mean[i] = float(np.mean(values))
        stderr[i] = float(np.std(values, ddof=1) / math.sqrt(runs)) if runs > 1 else 0.0
    return EnsembleAverage(checkpoints=checkpoints, mean=mean, stderr=stderr, runs=runs), records
