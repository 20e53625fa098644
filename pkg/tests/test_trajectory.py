import math

import numpy as np
import pytest

import spincat as sc
from spincat.errors import ConfigurationError, DomainError
from spincat.trajectory import trajectory_stream

from tests.conftest import cached_basis


def _setup(config):
    basis = cached_basis(config.n)
    return basis, sc.build_kraus(basis, config.gt)


def test_config_validation():
    with pytest.raises(ConfigurationError):
        sc.TrajectoryConfig(n=2, beta=1.0, omega_p=0.5, gt=0.2, m=-1)
    with pytest.raises(ConfigurationError):
        sc.TrajectoryConfig(n=2, beta=1.0, omega_p=0.5, gt=0.2, m=5, checkpoints=(7,))
    with pytest.raises(ConfigurationError):
        sc.TrajectoryConfig(n=2, beta=1.0, omega_p=0.5, gt=0.2, m=5, initial="cold")


def test_default_checkpoints_resolution():
    cfg = sc.TrajectoryConfig(n=2, beta=1.0, omega_p=0.5, gt=0.2, m=700)
    assert cfg.resolved_checkpoints() == (10, 50, 100, 600)
    tiny = sc.TrajectoryConfig(n=2, beta=1.0, omega_p=0.5, gt=0.2, m=0)
    assert tiny.resolved_checkpoints() == (0,)


def test_zero_measurements_record_initial_catness():
    cfg = sc.TrajectoryConfig(n=4, beta=2.0, omega_p=0.5, gt=0.2, m=0, master_seed=5)
    basis, kraus = _setup(cfg)
    initial = sc.catness(sc.thermal_state(basis, 2.0, 0.5)).value
    values = [
        sc.run_trajectory(cfg, basis, kraus, trajectory_stream(5, i), trajectory_index=i).catness_at[0]
        for i in range(3)
    ]
    assert values == [initial] * 3


def test_single_spin_extreme_coupling_locks_first_outcome():
    cfg = sc.TrajectoryConfig(
        n=1, beta=0.0, omega_p=0.5, gt=math.pi / 2, m=12, checkpoints=(), master_seed=3
    )
    basis, kraus = _setup(cfg)
    seen = set()
    for i in range(20):
        rec = sc.run_trajectory(cfg, basis, kraus, trajectory_stream(3, i),
                                trajectory_index=i, retain_final_state=True)
        assert np.all(rec.outcomes == rec.outcomes[0])
        assert rec.k in (0, 12)
        seen.add(rec.k)
        idx = basis.top.eigenvalue_index(1 if rec.k == 12 else -1)
        assert abs(rec.final_state.blocks[0][idx, idx].real - 1.0) < 1e-12
    assert seen == {0, 12}


def test_convergence_to_predicted_eigenstate():
    cfg = sc.TrajectoryConfig(
        n=4, beta=0.0, omega_p=0.5, gt=0.2, m=1500, checkpoints=(), master_seed=11, initial="all_up"
    )
    basis, kraus = _setup(cfg)
    for i in range(5):
        rec = sc.run_trajectory(cfg, basis, kraus, trajectory_stream(11, i),
                                trajectory_index=i, retain_final_state=True)
        pred = sc.predict_convergence(4, cfg.m, rec.k, 0.2)
        assert not pred.degenerate
        idx = basis.top.eigenvalue_index(pred.L)
        assert rec.final_state.blocks[0][idx, idx].real >= 0.99


def test_sample_outcome_extremes_and_statistics():
    stream = trajectory_stream(123, 0)
    assert all(sc.sample_outcome(1.0, stream) == 1 for _ in range(50))
    assert all(sc.sample_outcome(0.0, stream) == -1 for _ in range(50))
    with pytest.raises(DomainError):
        sc.sample_outcome(1.5, stream)
    draws = 10**6
    total = sum(sc.sample_outcome(0.5, stream) == 1 for _ in range(draws))
    sigma = 0.5 * math.sqrt(draws)
    assert abs(total - draws / 2) < 3 * sigma


def test_bit_identical_reruns_and_replay():
    cfg = sc.TrajectoryConfig(
        n=3, beta=2.0, omega_p=0.5, gt=0.3, m=60, checkpoints=(10, 60), master_seed=77
    )
    basis, kraus = _setup(cfg)
    a = sc.run_trajectory(cfg, basis, kraus, trajectory_stream(77, 4), trajectory_index=4)
    b = sc.run_trajectory(cfg, basis, kraus, trajectory_stream(77, 4), trajectory_index=4)
    assert np.array_equal(a.outcomes, b.outcomes)
    assert a.catness_at == b.catness_at
    replay = sc.replay_trajectory(cfg, basis, kraus, a.outcomes)
    assert replay.catness_at == a.catness_at
    assert replay.k == a.k


def test_replay_consistent_with_public_update_path():
    cfg = sc.TrajectoryConfig(
        n=4, beta=1.0, omega_p=0.5, gt=0.3, m=30, checkpoints=(30,), master_seed=2
    )
    basis, kraus = _setup(cfg)
    rec = sc.run_trajectory(cfg, basis, kraus, trajectory_stream(2, 0), retain_final_state=True)
    state = sc.thermal_state(basis, 1.0, 0.5)
    for outcome in rec.outcomes:
        state = sc.apply_outcome(state, kraus, int(outcome))
    for a, b in zip(state.blocks, rec.final_state.blocks):
        assert np.max(np.abs(a - b)) < 1e-12
    assert math.isclose(sc.catness(state).value, rec.catness_at[30], rel_tol=1e-12, abs_tol=1e-12)


def test_equal_k_means_equal_final_state():
    cfg = sc.TrajectoryConfig(
        n=3, beta=1.5, omega_p=0.5, gt=0.25, m=16, checkpoints=(), master_seed=0
    )
    basis, kraus = _setup(cfg)
    rng = np.random.default_rng(4)
    outcomes = np.array([1] * 6 + [-1] * 10, dtype=np.int8)
    shuffled = outcomes.copy()
    rng.shuffle(shuffled)
    a = sc.replay_trajectory(cfg, basis, kraus, outcomes, retain_final_state=True)
    b = sc.replay_trajectory(cfg, basis, kraus, shuffled, retain_final_state=True)
    assert a.k == b.k
    for x, y in zip(a.final_state.blocks, b.final_state.blocks):
        assert np.max(np.abs(x - y)) < 1e-12


def test_ensemble_single_run_statistics():
    cfg = sc.TrajectoryConfig(
        n=3, beta=1.0, omega_p=0.5, gt=0.3, m=20, checkpoints=(20,), master_seed=6
    )
    basis, kraus = _setup(cfg)
    average, records = sc.run_ensemble(cfg, 1)
    assert average.runs == 1
    assert average.stderr[0] == 0.0
    solo = sc.run_trajectory(cfg, basis, kraus, trajectory_stream(6, 0))
    assert average.mean[0] == solo.catness_at[20]
    assert len(records) == 1


def test_ensemble_worker_count_invariance():
    cfg = sc.TrajectoryConfig(
        n=3, beta=2.0, omega_p=0.5, gt=0.3, m=25, checkpoints=(25,), master_seed=13
    )
    serial, recs1 = sc.run_ensemble(cfg, 7, workers=1)
    pooled, recs2 = sc.run_ensemble(cfg, 7, workers=3)
    assert np.array_equal(serial.mean, pooled.mean)
    assert np.array_equal(serial.stderr, pooled.stderr)
    for a, b in zip(recs1, recs2):
        assert a.trajectory_index == b.trajectory_index
        assert np.array_equal(a.outcomes, b.outcomes)
        assert a.catness_at == b.catness_at


def test_empirical_k_distribution_tracks_analytic(basis):
    cfg = sc.TrajectoryConfig(
        n=3, beta=0.0, omega_p=0.5, gt=0.2, m=50, checkpoints=(0,),
        master_seed=42, initial="all_up",
    )
    _, records = sc.run_ensemble(cfg, 20000)
    counts = np.bincount([r.k for r in records], minlength=51) / len(records)
    analytic = sc.pk_distribution(3, 50, 0.2).probabilities
    assert 0.5 * np.abs(counts - analytic).sum() < 0.03


def test_run_ensemble_argument_checks():
    cfg = sc.TrajectoryConfig(n=2, beta=1.0, omega_p=0.5, gt=0.2, m=3)
    with pytest.raises(DomainError):
        sc.run_ensemble(cfg, 0)
    with pytest.raises(DomainError):
        sc.run_ensemble(cfg, 2, workers=0)
