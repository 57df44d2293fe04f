"""Mean, covariance and time-lagged covariance of sampled trajectories.

Both accumulators consume blocks of samples so that a trajectory can be
streamed straight from the integrator without being held in memory.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Tuple

import numpy as np

from integrator.models import SampleSeries
from closure.models import LaggedCovariance
from utils.errors import ConfigError, DimensionError, EmptyInputError, InsufficientDataError

logger = logging.getLogger(__name__)


def accumulate_moments(series: SampleSeries) -> Tuple[np.ndarray, np.ndarray]:
    """Two-pass sample mean and (population) covariance over all samples."""
    if series.is_empty():
        raise EmptyInputError("Cannot compute moments of an empty series")
    values = series.values
    mean = values.mean(axis=0)
    centered = values - mean
    cov = centered.T @ centered / values.shape[0]
    return mean, 0.5 * (cov + cov.T)


class MomentAccumulator:
    """Streaming mean and covariance, with sums taken around the first sample."""

    def __init__(self, dim: int):
        self.dim = dim
        self.count = 0
        self._shift: Optional[np.ndarray] = None
        self._sum = np.zeros(dim)
        self._outer = np.zeros((dim, dim))

    def update_block(self, block: np.ndarray):
        block = np.asarray(block, dtype=float)
        if block.ndim != 2 or block.shape[1] != self.dim:
            raise DimensionError(f"Expected block of shape (n, {self.dim}), got {block.shape}")
        if block.shape[0] == 0:
            return
        if self._shift is None:
            self._shift = block[0].copy()
        d = block - self._shift
        self.count += block.shape[0]
        self._sum += d.sum(axis=0)
        self._outer += d.T @ d

    def finalize(self) -> Tuple[np.ndarray, np.ndarray]:
        if self.count == 0:
            raise EmptyInputError("No samples were accumulated")
        d_mean = self._sum / self.count
        cov = self._outer / self.count - np.outer(d_mean, d_mean)
        return self._shift + d_mean, 0.5 * (cov + cov.T)


class LaggedCovarianceAccumulator:
    """Streaming estimate of C(s_m) = <z(tau + s_m)(z(tau) - zbar)^T>.

    Lag m sits m*lag_stride samples ahead. A sample becomes a "past" point
    tau once its whole lag window has arrived, so the last span samples of a
    stream only ever appear as futures. Each block is processed together with
    the carried tail of the previous one; memory stays O(dim * (block + span)).

    zbar is only needed at finalize: the uncentered sums are kept and the
    centering is applied afterwards.
    """

    def __init__(self, dim: int, n_lags: int, lag_stride: int = 1, workers: int = 1):
        if n_lags < 1 or lag_stride < 1:
            raise ConfigError("n_lags and lag_stride must be positive")
        self.dim = dim
        self.n_lags = n_lags
        self.lag_stride = lag_stride
        self.span = (n_lags - 1) * lag_stride
        self.workers = workers
        self.n_pairs = 0
        self._cross = np.zeros((n_lags, dim, dim))
        self._future_sums = np.zeros((n_lags, dim))
        self._carry = np.zeros((0, dim))

    def _accumulate_lags(self, data: np.ndarray, past: np.ndarray, n_past: int, lags: range):
        for m in lags:
            offset = m * self.lag_stride
            future = data[offset:offset + n_past]
            self._cross[m] += future.T @ past
            self._future_sums[m] += future.sum(axis=0)

    def update_block(self, block: np.ndarray):
        block = np.asarray(block, dtype=float)
        if block.ndim != 2 or block.shape[1] != self.dim:
            raise DimensionError(f"Expected block of shape (n, {self.dim}), got {block.shape}")
        data = np.concatenate([self._carry, block]) if self._carry.shape[0] else block
        n_past = data.shape[0] - self.span
        if n_past <= 0:
            self._carry = data.copy()
            return
        past = data[:n_past]
        if self.workers > 1:
            # every lag owns its accumulator, so the split does not change the sums
            chunks = np.array_split(np.arange(self.n_lags), self.workers)
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                list(pool.map(lambda c: self._accumulate_lags(data, past, n_past, c), chunks))
        else:
            self._accumulate_lags(data, past, n_past, range(self.n_lags))
        self.n_pairs += n_past
        self._carry = data[n_past:].copy()

    def finalize(self, mean: np.ndarray, dt_lag: float) -> LaggedCovariance:
        if self.n_pairs == 0:
            raise InsufficientDataError(
                f"Series shorter than the lag window of {self.span} samples"
            )
        mean = np.asarray(mean, dtype=float)
        n = float(self.n_pairs)
        matrices = self._cross / n - (self._future_sums / n)[:, :, None] * mean[None, None, :]
        return LaggedCovariance(dt_lag=dt_lag, matrices=matrices, n_pairs=self.n_pairs)


def lag_count(t_corr: float, dt_sample: float, lag_stride: int) -> int:
    """Number of lag points 0..M with M*lag_stride*dt_sample <= t_corr."""
    return int(np.floor(t_corr / (lag_stride * dt_sample) + 1e-9)) + 1


def lagged_covariance(
    series: SampleSeries,
    t_corr: float,
    lag_stride: int = 1,
    block_size: int = 4096,
    workers: int = 1,
) -> LaggedCovariance:
    """Time-lagged covariance with the right factor centered by the series mean."""
    if not t_corr > 0:
        raise ConfigError(f"t_corr must be positive, got {t_corr}")
    if series.is_empty() or t_corr > series.duration:
        raise InsufficientDataError(
            f"Lag window {t_corr:g} exceeds series duration {series.duration:g}"
        )
    mean, _ = accumulate_moments(series)
    n_lags = lag_count(t_corr, series.dt_sample, lag_stride)
    acc = LaggedCovarianceAccumulator(series.dim, n_lags, lag_stride, workers=workers)
    for start in range(0, series.count, block_size):
        acc.update_block(series.values[start:start + block_size])
    return acc.finalize(mean, dt_lag=lag_stride * series.dt_sample)
