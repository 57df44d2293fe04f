"""PDF and correlation diagnostics of the slow variables.

Correlations use raw (uncentered) moments, averaged over time and pooled
over the index i. Input arrays are (n_times, n_indices).
"""

import logging
from typing import List, Union

import numpy as np

from config import CORRELATION_WINDOW, PDF_BINS, PDF_HI, PDF_LO
from stats.models import Histogram, LagCurve, SystemDiagnostics
from utils.errors import ConfigError, EmptyInputError, GridMismatchError, InsufficientDataError

logger = logging.getLogger(__name__)


def histogram_pdf(samples, lo: float = PDF_LO, hi: float = PDF_HI, n_bins: int = PDF_BINS) -> Histogram:
    """Bin-counted PDF normalized over the in-range samples."""
    if n_bins < 1 or not hi > lo:
        raise ConfigError(f"Invalid histogram grid [{lo}, {hi}] with {n_bins} bins")
    samples = np.asarray(samples, dtype=float).ravel()
    counts, _ = np.histogram(samples, bins=n_bins, range=(lo, hi))
    in_range = int(counts.sum())
    if in_range == 0:
        raise EmptyInputError(f"No samples inside [{lo}, {hi}]")
    width = (hi - lo) / n_bins
    density = counts / (in_range * width)
    return Histogram(lo=lo, hi=hi, n_bins=n_bins, density=density,
                     n_samples=samples.size, n_out_of_range=samples.size - in_range)


def _as_panel(values) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    return values


def _lag_points(n_times: int, max_lag: float, dt_sample: float) -> int:
    n_lags = int(np.floor(max_lag / dt_sample + 1e-9))
    if n_lags >= n_times:
        raise InsufficientDataError(
            f"Series of {n_times} samples is too short for lag window {max_lag:g}"
        )
    return n_lags


def _lagged_mean(a: np.ndarray, b: np.ndarray, m: int, axis=None):
    """Mean over t (and over i when axis is None) of a[t] * b[t + m]."""
    n = a.shape[0]
    return np.mean(a[:n - m] * b[m:], axis=axis)


def _correlation(a: np.ndarray, b: np.ndarray, max_lag: float, dt_sample: float, axis=None) -> np.ndarray:
    n_lags = _lag_points(a.shape[0], max_lag, dt_sample)
    variance = _lagged_mean(a, a, 0, axis)
    return np.array([_lagged_mean(a, b, m, axis) for m in range(n_lags + 1)]) / variance


def autocorrelation(values, max_lag: float = CORRELATION_WINDOW, dt_sample: float = 0.05) -> LagCurve:
    """<x_i(t) x_i(t+s)> / <x_i^2>, pooled over i; equals 1 at s = 0."""
    x = _as_panel(values)
    return LagCurve(dt_sample, _correlation(x, x, max_lag, dt_sample))


def autocorrelation_per_index(values, max_lag: float = CORRELATION_WINDOW,
                              dt_sample: float = 0.05) -> List[LagCurve]:
    x = _as_panel(values)
    table = _correlation(x, x, max_lag, dt_sample, axis=0)
    return [LagCurve(dt_sample, table[:, i]) for i in range(x.shape[1])]


def cross_correlation(values, max_lag: float = CORRELATION_WINDOW, dt_sample: float = 0.05) -> LagCurve:
    """<x_i(t) x_{i+1}(t+s)> / <x_i^2>, index i+1 taken cyclically."""
    x = _as_panel(values)
    neighbour = np.roll(x, -1, axis=1)
    n_lags = _lag_points(x.shape[0], max_lag, dt_sample)
    variance = _lagged_mean(x, x, 0)
    curve = np.array([_lagged_mean(x, neighbour, m) for m in range(n_lags + 1)]) / variance
    return LagCurve(dt_sample, curve)


def energy_autocorrelation(values, max_lag: float = CORRELATION_WINDOW, dt_sample: float = 0.05) -> LagCurve:
    """K(s) = <x^2(t) x^2(t+s)> / (<x^2>^2 + 2 <x(t) x(t+s)>^2); identically 1 for a Gaussian process."""
    x = _as_panel(values)
    energy = x * x
    n_lags = _lag_points(x.shape[0], max_lag, dt_sample)
    variance = _lagged_mean(x, x, 0)
    curve = np.empty(n_lags + 1)
    for m in range(n_lags + 1):
        covariance = _lagged_mean(x, x, m)
        curve[m] = _lagged_mean(energy, energy, m) / (variance ** 2 + 2.0 * covariance ** 2)
    return LagCurve(dt_sample, curve)


def l2_distance(a: Union[Histogram, LagCurve], b: Union[Histogram, LagCurve]) -> float:
    """sqrt(sum (a_k - b_k)^2 * spacing) on a shared grid."""
    if type(a) is not type(b):
        raise GridMismatchError(f"Cannot compare {type(a).__name__} with {type(b).__name__}")
    if isinstance(a, Histogram):
        same = (a.lo, a.hi, a.n_bins) == (b.lo, b.hi, b.n_bins)
    else:
        same = np.isclose(a.dt_lag, b.dt_lag, rtol=1e-12, atol=0.0) and a.values.shape == b.values.shape
    if not same:
        raise GridMismatchError("Curves are defined on different grids")
    diff = a.values - b.values
    return float(np.sqrt(np.sum(diff * diff) * a.spacing))


def index_shift_gap(values, i: int, k: int, max_lag: float = CORRELATION_WINDOW,
                    dt_sample: float = 0.05) -> float:
    """Sup-norm distance between the autocorrelations of indices i and k."""
    curves = autocorrelation_per_index(values, max_lag, dt_sample)
    return float(np.max(np.abs(curves[i].values - curves[k].values)))


def compute_diagnostics(values, dt_sample: float, max_lag: float = CORRELATION_WINDOW,
                        lo: float = PDF_LO, hi: float = PDF_HI, n_bins: int = PDF_BINS) -> SystemDiagnostics:
    x = _as_panel(values)
    pdf = histogram_pdf(x, lo, hi, n_bins)
    if pdf.n_out_of_range:
        logger.debug(f"{pdf.n_out_of_range} of {pdf.n_samples} samples outside [{lo}, {hi}]")
    return SystemDiagnostics(
        pdf=pdf,
        acf=autocorrelation(x, max_lag, dt_sample),
        ccf=cross_correlation(x, max_lag, dt_sample),
        kcf=energy_autocorrelation(x, max_lag, dt_sample),
    )
