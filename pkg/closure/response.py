"""Quasi-Gaussian linear response operator and closure assembly."""

import logging
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from closure.models import ClosureData, LaggedCovariance
from closure.moments import (
    LaggedCovarianceAccumulator,
    MomentAccumulator,
    accumulate_moments,
    lag_count,
    lagged_covariance,
)
from config import ACCUMULATOR_BLOCK, T_CORR
from integrator.models import SampleSeries
from model.models import ModelParams
from utils.errors import DimensionError, NonSPDCovarianceError

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-10
RIDGE_SCALE = 1e-8


def response_operator(lc: LaggedCovariance, sigma: np.ndarray, ridge: bool = False) -> np.ndarray:
    """R* = [trapezoidal integral of C(s) over the lag grid] Sigma^{-1}.

    Sigma^{-1} is applied through a Cholesky solve. A failing factorization
    is an error unless the opt-in ridge (delta = 1e-8 * trace / N) is set.
    """
    sigma = np.asarray(sigma, dtype=float)
    n = lc.dim
    if sigma.shape != (n, n):
        raise DimensionError(f"Covariance must be {n}x{n}, got {sigma.shape}")
    scale = max(np.abs(sigma).max(), np.finfo(float).tiny)
    if np.abs(sigma - sigma.T).max() > SYMMETRY_TOLERANCE * scale:
        raise NonSPDCovarianceError("Covariance matrix is not symmetric")
    if ridge:
        sigma = sigma + (RIDGE_SCALE * np.trace(sigma) / n) * np.eye(n)

    integral = trapezoid(lc.matrices, dx=lc.dt_lag, axis=0)
    try:
        factor = cho_factor(sigma)
    except LinAlgError as e:
        raise NonSPDCovarianceError(f"Covariance matrix is not positive definite: {e}") from e
    # R = A Sigma^{-1}  <=>  R^T = Sigma^{-1} A^T
    return cho_solve(factor, integral.T).T


def build_closure(
    series: SampleSeries,
    x_star,
    params: ModelParams,
    t_corr: float = T_CORR,
    lag_stride: int = 1,
    ridge: bool = False,
    provenance: Optional[dict] = None,
) -> ClosureData:
    """Closure from a stored fast-limiting trajectory frozen at x_star."""
    z_bar, sigma = accumulate_moments(series)
    lc = lagged_covariance(series, t_corr, lag_stride)
    r_star = response_operator(lc, sigma, ridge=ridge)
    info = {'t_corr': t_corr, 'dt_lag': lc.dt_lag, 'n_pairs': lc.n_pairs,
            'dt_sample': series.dt_sample, 'ridge': ridge}
    info.update(provenance or {})
    return _finish(x_star, z_bar, sigma, r_star, params, info)


def _finish(x_star, z_bar, sigma, r_star, params, provenance) -> ClosureData:
    closure = ClosureData.assemble(x_star, z_bar, sigma, r_star, params, provenance)
    r_min, lrl_min = closure.lowest_symmetric_eigenvalues()
    closure.provenance['min_eig_r'] = r_min
    closure.provenance['min_eig_lrl'] = lrl_min
    logger.info(f"Closure built: lowest symmetric eigenvalues R* {r_min:.4e}, L R* L^T {lrl_min:.4e}")
    return closure


class ClosureAccumulator:
    """Integrator observer that builds the closure while the fast run streams by."""

    def __init__(self, dim: int, dt_sample: float, t_corr: float = T_CORR,
                 lag_stride: int = 1, block_size: int = ACCUMULATOR_BLOCK, workers: int = 1):
        self.dim = dim
        self.dt_sample = dt_sample
        self.t_corr = t_corr
        self.lag_stride = lag_stride
        self.moments = MomentAccumulator(dim)
        self.lagged = LaggedCovarianceAccumulator(dim, lag_count(t_corr, dt_sample, lag_stride),
                                                  lag_stride, workers=workers)
        self._block = np.empty((block_size, dim))
        self._fill = 0

    def __call__(self, t: float, state: np.ndarray):
        self._block[self._fill] = state
        self._fill += 1
        if self._fill == self._block.shape[0]:
            self._flush()

    def update_series(self, series: SampleSeries):
        for row in series.values:
            self(0.0, row)

    def _flush(self):
        if self._fill:
            block = self._block[:self._fill]
            self.moments.update_block(block)
            self.lagged.update_block(block)
            self._fill = 0

    def statistics(self, ridge: bool = False):
        """(zbar*, Sigma*, lagged covariance, R*) of everything observed so far."""
        self._flush()
        z_bar, sigma = self.moments.finalize()
        lc = self.lagged.finalize(z_bar, dt_lag=self.lag_stride * self.dt_sample)
        return z_bar, sigma, lc, response_operator(lc, sigma, ridge=ridge)

    def finalize(self, x_star, params: ModelParams, ridge: bool = False,
                 provenance: Optional[dict] = None) -> ClosureData:
        z_bar, sigma, lc, r_star = self.statistics(ridge)
        info = {'t_corr': self.t_corr, 'dt_lag': lc.dt_lag, 'n_pairs': lc.n_pairs,
                'dt_sample': self.dt_sample, 'ridge': ridge}
        info.update(provenance or {})
        return _finish(x_star, z_bar, sigma, r_star, params, info)
