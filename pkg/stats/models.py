"""Data models for statistical diagnostics"""

from dataclasses import dataclass

import numpy as np

from utils.errors import ConfigError


@dataclass
class Histogram:
    """Bin-counted probability density on [lo, hi]; out-of-range samples are only counted."""
    lo: float
    hi: float
    n_bins: int
    density: np.ndarray
    n_samples: int = 0
    n_out_of_range: int = 0

    def __post_init__(self):
        self.density = np.asarray(self.density, dtype=float)
        if not self.hi > self.lo or self.n_bins < 1 or self.density.shape != (self.n_bins,):
            raise ConfigError(f"Inconsistent histogram grid [{self.lo}, {self.hi}] x {self.n_bins}")

    @property
    def bin_width(self) -> float:
        return (self.hi - self.lo) / self.n_bins

    @property
    def centers(self) -> np.ndarray:
        return self.lo + self.bin_width * (np.arange(self.n_bins) + 0.5)

    @property
    def out_of_range_fraction(self) -> float:
        return self.n_out_of_range / self.n_samples if self.n_samples else 0.0

    @property
    def grid(self) -> np.ndarray:
        return self.centers

    @property
    def spacing(self) -> float:
        return self.bin_width

    @property
    def values(self) -> np.ndarray:
        return self.density

    def mass(self) -> float:
        return float(self.density.sum() * self.bin_width)


@dataclass
class LagCurve:
    """Values of a function of the lag s at 0, dt_lag, 2*dt_lag, ..."""
    dt_lag: float
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if not self.dt_lag > 0 or self.values.ndim != 1:
            raise ConfigError("LagCurve needs dt_lag > 0 and a 1-D value array")

    @property
    def lags(self) -> np.ndarray:
        return self.dt_lag * np.arange(self.values.shape[0])

    @property
    def grid(self) -> np.ndarray:
        return self.lags

    @property
    def spacing(self) -> float:
        return self.dt_lag


@dataclass
class SystemDiagnostics:
    """The four slow-variable diagnostics of one system."""
    pdf: Histogram
    acf: LagCurve
    ccf: LagCurve
    kcf: LagCurve

    def get(self, name: str):
        return getattr(self, name)
