import json

import numpy as np
import pytest

from closure.models import ClosureData, LaggedCovariance
from closure.moments import (
    LaggedCovarianceAccumulator,
    MomentAccumulator,
    accumulate_moments,
    lag_count,
    lagged_covariance,
)
from closure.response import ClosureAccumulator, build_closure, response_operator
from integrator.models import IntegrationPlan, SampleSeries
from integrator.rk4 import integrate_sampled
from model.lorenz import FastLimitingSystem
from utils.errors import ConfigError, EmptyInputError, InsufficientDataError, NonSPDCovarianceError


def _series(values, dt=0.05):
    return SampleSeries(dt, 0.0, np.asarray(values, dtype=float))


def _brute_force_lagged(values, n_lags, stride):
    mean = values.mean(axis=0)
    span = (n_lags - 1) * stride
    n_past = values.shape[0] - span
    past = values[:n_past] - mean
    return np.array([values[m * stride:m * stride + n_past].T @ past / n_past for m in range(n_lags)])


# -----------------
# Moments
# -----------------

def test_constant_series_moments():
    mean, cov = accumulate_moments(_series(np.tile([1.5, -2.0, 0.25], (50, 1))))
    np.testing.assert_array_equal(mean, [1.5, -2.0, 0.25])
    np.testing.assert_allclose(cov, np.zeros((3, 3)), atol=1e-15)


def test_alternating_series_moments():
    a = np.array([1.0, -3.0, 2.0])
    values = np.array([a if k % 2 == 0 else -a for k in range(100)])
    mean, cov = accumulate_moments(_series(values))
    np.testing.assert_allclose(mean, np.zeros(3), atol=1e-15)
    np.testing.assert_allclose(cov, np.outer(a, a), rtol=1e-14)


def test_empty_series_moments():
    with pytest.raises(EmptyInputError):
        accumulate_moments(_series(np.zeros((0, 2))))


def test_streaming_moments_match_two_pass(rng):
    values = rng.normal(10.0, 2.0, size=(1000, 4))
    acc = MomentAccumulator(4)
    for start in range(0, 1000, 137):
        acc.update_block(values[start:start + 137])
    mean, cov = acc.finalize()
    ref_mean, ref_cov = accumulate_moments(_series(values))
    np.testing.assert_allclose(mean, ref_mean, rtol=1e-12)
    np.testing.assert_allclose(cov, ref_cov, rtol=1e-9, atol=1e-12)


# -----------------
# Lagged covariance
# -----------------

def test_lag_grid():
    assert lag_count(50.0, 0.05, 1) == 1001
    assert lag_count(50.0, 0.05, 2) == 501
    lc = lagged_covariance(_series(np.random.default_rng(0).standard_normal((400, 2))), 2.0, lag_stride=2)
    assert lc.n_lags == 21
    assert lc.dt_lag == pytest.approx(0.1)
    np.testing.assert_allclose(lc.lags[-1], 2.0)


def test_lagged_covariance_matches_brute_force(rng):
    values = rng.standard_normal((300, 3)) + np.array([1.0, 0.0, -2.0])
    lc = lagged_covariance(_series(values), t_corr=0.5, lag_stride=2, block_size=64)
    expected = _brute_force_lagged(values, lag_count(0.5, 0.05, 2), 2)
    np.testing.assert_allclose(lc.matrices, expected, rtol=1e-10, atol=1e-12)
    assert lc.n_pairs == 300 - 10


def test_lag_zero_is_right_centered_covariance_on_admissible_window(rng):
    values = rng.standard_normal((500, 3)) + 3.0
    lc = lagged_covariance(_series(values), t_corr=1.0)
    mean, _ = accumulate_moments(_series(values))
    past = values[:lc.n_pairs]
    expected = past.T @ (past - mean) / lc.n_pairs
    np.testing.assert_allclose(lc.matrices[0], expected, rtol=1e-8)


def test_block_size_and_workers_do_not_change_result(rng):
    values = rng.standard_normal((777, 4))
    series = _series(values)
    a = lagged_covariance(series, 3.0, block_size=50)
    b = lagged_covariance(series, 3.0, block_size=10_000)
    c = lagged_covariance(series, 3.0, block_size=128, workers=3)
    np.testing.assert_allclose(a.matrices, b.matrices, rtol=1e-11, atol=1e-14)
    np.testing.assert_allclose(a.matrices, c.matrices, rtol=1e-11, atol=1e-14)


def test_white_noise_decorrelates(rng):
    lc = lagged_covariance(_series(rng.standard_normal((100_000, 3))), t_corr=1.0)
    np.testing.assert_allclose(lc.matrices[0], np.eye(3), atol=0.02)
    assert np.abs(lc.matrices[1:]).max() < 0.02


def test_window_longer_than_series():
    with pytest.raises(InsufficientDataError):
        lagged_covariance(_series(np.zeros((10, 2))), t_corr=1.0)


def test_nonpositive_window():
    with pytest.raises(ConfigError):
        lagged_covariance(_series(np.zeros((10, 2))), t_corr=0.0)


def test_accumulator_without_pairs():
    acc = LaggedCovarianceAccumulator(2, n_lags=5)
    acc.update_block(np.zeros((3, 2)))
    with pytest.raises(InsufficientDataError):
        acc.finalize(np.zeros(2), 0.05)


# -----------------
# Response operator
# -----------------

def test_scalar_exponential_response():
    dt, t_corr, sigma2 = 0.01, 6.0, 2.5
    lags = dt * np.arange(int(round(t_corr / dt)) + 1)
    lc = LaggedCovariance(dt, (sigma2 * np.exp(-lags))[:, None, None])
    r = response_operator(lc, np.array([[sigma2]]))
    assert r[0, 0] == pytest.approx(1.0 - np.exp(-t_corr), rel=1e-4)


def test_response_of_matrix_exponential():
    gamma = np.array([[2.0, 0.5], [0.0, 1.0]])
    sigma = np.array([[1.0, 0.2], [0.2, 0.8]])
    dt = 0.005
    lags = dt * np.arange(4001)
    w, v = np.linalg.eig(gamma)
    mats = np.array([np.real(v @ np.diag(np.exp(-s * w)) @ np.linalg.inv(v)) @ sigma for s in lags])
    r = response_operator(LaggedCovariance(dt, mats), sigma)
    np.testing.assert_allclose(r, np.linalg.inv(gamma), rtol=1e-4, atol=1e-6)


def test_zero_covariance_is_not_spd():
    lc = LaggedCovariance(0.1, np.zeros((3, 2, 2)))
    with pytest.raises(NonSPDCovarianceError):
        response_operator(lc, np.zeros((2, 2)))


def test_asymmetric_covariance_rejected():
    lc = LaggedCovariance(0.1, np.zeros((3, 2, 2)))
    with pytest.raises(NonSPDCovarianceError):
        response_operator(lc, np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_ridge_is_opt_in():
    lc = LaggedCovariance(0.1, np.ones((3, 2, 2)))
    singular = np.ones((2, 2))
    with pytest.raises(NonSPDCovarianceError):
        response_operator(lc, singular)
    assert np.all(np.isfinite(response_operator(lc, singular, ridge=True)))


# -----------------
# Closure assembly
# -----------------

def test_identity_response_gives_scaled_identity_correction(params):
    closure = ClosureData.assemble(np.zeros(params.n_x), np.zeros(params.n_y), np.eye(params.n_y),
                                   np.eye(params.n_y), params)
    np.testing.assert_allclose(closure.c_star, params.lambda_x * params.lambda_y * np.eye(params.n_x))
    np.testing.assert_array_equal(closure.b_star, np.zeros(params.n_x))


def test_build_closure_matches_streaming_accumulator(params, rng):
    values = rng.standard_normal((2000, params.n_y)) * 0.7 + 0.3
    series = _series(values)
    x_star = np.full(params.n_x, 0.1)
    stored = build_closure(series, x_star, params, t_corr=1.0)

    acc = ClosureAccumulator(params.n_y, series.dt_sample, t_corr=1.0, block_size=333)
    acc.update_series(series)
    streamed = acc.finalize(x_star, params)

    np.testing.assert_allclose(streamed.r_star, stored.r_star, rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(streamed.b_star, stored.b_star, rtol=1e-12)
    assert stored.provenance['n_pairs'] == 2000 - 20
    assert 'min_eig_r' in stored.provenance and 'min_eig_lrl' in stored.provenance


def test_closure_follows_cyclic_relabelling(params, rng):
    j = params.j
    x_star = rng.uniform(-0.5, 0.5, params.n_x)
    z0 = rng.uniform(-0.5, 0.5, params.n_y)
    plan = IntegrationPlan(dt=5e-3, duration=30.0, spin_up=1.0, sample_every=10, seed=3)

    def closure_from(x, z):
        series = integrate_sampled(FastLimitingSystem(params, x), z, plan)
        return build_closure(series, x, params, t_corr=2.0)

    base = closure_from(x_star, z0)
    moved = closure_from(np.roll(x_star, 1), np.roll(z0, j))
    scale = np.abs(base.r_star).max()
    np.testing.assert_allclose(moved.r_star, np.roll(np.roll(base.r_star, j, 0), j, 1),
                               rtol=1e-6, atol=1e-6 * scale)
    np.testing.assert_allclose(moved.b_star, np.roll(base.b_star, 1), rtol=1e-6, atol=1e-9)


def test_closure_json_round_trip(params, rng):
    n_y = params.n_y
    closure = ClosureData.assemble(rng.standard_normal(params.n_x), rng.standard_normal(n_y),
                                   np.eye(n_y), rng.standard_normal((n_y, n_y)), params, {'t_av': 10.0})
    back = ClosureData.from_dict(json.loads(json.dumps(closure.to_dict())))
    np.testing.assert_array_equal(back.r_star, closure.r_star)
    np.testing.assert_array_equal(back.c_star, closure.c_star)
    assert back.params == params
    assert back.provenance == {'t_av': 10.0}
