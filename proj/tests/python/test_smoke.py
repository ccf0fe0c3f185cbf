"""Smoke tests for the python module: import, schedule math, predictor
exactness, the error bound, and run determinism."""

import math
import os

import pytest

import foca


def test_schedule_math():
    s = foca.CacheSchedule(interval=5, total_steps=50, warmup_steps=0)
    assert s.evaluation_count() == 10
    assert s.acceleration_ratio() == pytest.approx(5.0)
    assert s.is_full_step(0)
    assert not s.is_full_step(4)

    s2 = foca.CacheSchedule(interval=7, total_steps=50, warmup_steps=1)
    assert s2.evaluation_count() == 8

    with pytest.raises(ValueError):
        foca.CacheSchedule(interval=0, total_steps=10)


def test_predictors_on_simple_trajectories():
    cache = foca.CacheState(h=1.0, taylor_capacity=3)
    cache.observe_full(0, [2.0])
    cache.observe_full(1, [2.0])
    assert foca.predict_reuse(cache) == [2.0]
    assert foca.predict_bdf2(cache, 1.0)[0] == pytest.approx(2.0)

    affine = foca.CacheState(h=1.0, taylor_capacity=3)
    affine.observe_full(0, [0.0])
    affine.observe_full(5, [5.0])
    assert foca.predict_taylor(affine, k=3, interval=5, m=1)[0] == pytest.approx(8.0)

    diffs = foca.finite_differences([[0.0], [1.0], [4.0]], 2)
    assert diffs[0][0] == pytest.approx(3.0)
    assert diffs[1][0] == pytest.approx(2.0)

    with pytest.raises(RuntimeError):
        foca.predict_reuse(foca.CacheState())


def test_error_bound_grid():
    for rho in (0.1, 0.5, 0.9):
        report = foca.verify_proposition1(rho=rho, max_k=20)
        assert report.rho == pytest.approx(rho)
        assert report.passed
    reuse = foca.verify_proposition1(rho=0.5, max_k=10, kind=foca.PredictorKind.REUSE)
    assert reuse.error_increasing_in_k


def test_cached_run_determinism_and_accounting():
    src = foca.linear_source(rho=0.5, dim=2)
    schedule = foca.CacheSchedule(interval=5, total_steps=40, warmup_steps=2)
    r1 = foca.run_cached_sampler(src, schedule, foca.PredictorKind.FOCA, seed=7)
    r2 = foca.run_cached_sampler(src, schedule, foca.PredictorKind.FOCA, seed=7)
    assert r1.evaluation_count == schedule.evaluation_count()
    assert r1.used_features() == r2.used_features()
    assert not r1.aborted
    assert math.isfinite(r1.terminal_sample_deviation)


def test_diagnostics():
    traj = [[math.exp(-0.1 * s)] for s in range(41)]
    lte = foca.local_truncation_error(traj, h=0.1, at=20)
    assert lte > 0.0
    flat = [[1.0 + 0.5 * s] for s in range(20)]
    assert foca.local_truncation_error(flat, h=1.0, at=10) < 1e-10
    assert foca.stiffness_index(flat, h=1.0, at=10, window=3) == 0.0

    a = [[0.0, 0.0]] * 100
    assert abs(foca.mmd_sample_quality(a, a)) < 1e-9
    assert foca.relative_error([2.0], [1.0]) == pytest.approx(1.0)


def test_denoiser_source_if_weights_present():
    data_dir = os.environ.get("FOCA_DATA_DIR")
    if not data_dir:
        pytest.skip("FOCA_DATA_DIR not set")
    weights = os.path.join(data_dir, "denoiser_v1.txt")
    if not os.path.exists(weights):
        pytest.skip("reference weights not present")
    src = foca.denoiser_source(weights)
    assert src.feature_dim() == 64
    schedule = foca.CacheSchedule(interval=5, total_steps=50, warmup_steps=2)
    report = foca.run_cached_sampler(src, schedule, foca.PredictorKind.FOCA, seed=1)
    assert report.evaluation_count == schedule.evaluation_count()
    assert not report.aborted
