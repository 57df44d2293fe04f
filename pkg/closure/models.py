"""Data models for the linear-response closure"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from model.lorenz import block_sum, coarse_sum
from model.models import ModelParams
from utils.errors import ConfigError, DimensionError


@dataclass
class LaggedCovariance:
    """C(s_m) = <z(tau + s_m) (z(tau) - zbar)^T>, m = 0..M, on a uniform lag grid."""
    dt_lag: float
    matrices: np.ndarray  # (M+1, N, N)
    n_pairs: int = 0

    def __post_init__(self):
        self.matrices = np.asarray(self.matrices, dtype=float)
        if self.matrices.ndim != 3 or self.matrices.shape[1] != self.matrices.shape[2]:
            raise DimensionError(f"Lag matrices must be (M+1, N, N), got {self.matrices.shape}")

    @property
    def n_lags(self) -> int:
        return self.matrices.shape[0]

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    @property
    def lags(self) -> np.ndarray:
        return self.dt_lag * np.arange(self.n_lags)


@dataclass
class ClosureData:
    """Frozen-x* statistics of the fast dynamics and the slow-equation terms built from them."""
    x_star: np.ndarray
    z_bar_star: np.ndarray
    sigma_star: np.ndarray
    r_star: np.ndarray
    b_star: np.ndarray
    c_star: np.ndarray
    params: Optional[ModelParams] = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ('x_star', 'z_bar_star', 'sigma_star', 'r_star', 'b_star', 'c_star'):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))

    @staticmethod
    def slow_terms(z_bar_star: np.ndarray, r_star: np.ndarray, params: ModelParams):
        """b* = -(lambda_y/J) L zbar*,  C* = (lambda_x lambda_y / J) L R* L^T"""
        b_star = -(params.lambda_y / params.j) * coarse_sum(z_bar_star, params.n_x, params.j)
        c_star = (params.lambda_x * params.lambda_y / params.j) * block_sum(r_star, params.n_x, params.j)
        return b_star, c_star

    @classmethod
    def assemble(cls, x_star, z_bar_star, sigma_star, r_star, params: ModelParams,
                 provenance: Optional[dict] = None) -> "ClosureData":
        x_star = np.asarray(x_star, dtype=float)
        z_bar_star = np.asarray(z_bar_star, dtype=float)
        r_star = np.asarray(r_star, dtype=float)
        n_y = params.n_y
        if x_star.shape != (params.n_x,) or z_bar_star.shape != (n_y,):
            raise DimensionError(
                f"Expected x* ({params.n_x},) and zbar* ({n_y},), got {x_star.shape} and {z_bar_star.shape}"
            )
        if np.shape(sigma_star) != (n_y, n_y) or r_star.shape != (n_y, n_y):
            raise DimensionError(f"Expected {n_y}x{n_y} covariance and response matrices")
        b_star, c_star = cls.slow_terms(z_bar_star, r_star, params)
        return cls(
            x_star=x_star,
            z_bar_star=z_bar_star,
            sigma_star=sigma_star,
            r_star=r_star,
            b_star=b_star,
            c_star=c_star,
            params=params,
            provenance=dict(provenance or {}),
        )

    def with_correction(self, c_star: np.ndarray) -> "ClosureData":
        """Copy with a replaced correction matrix (zero-order checks inject zeros)."""
        return ClosureData(self.x_star, self.z_bar_star, self.sigma_star, self.r_star,
                           self.b_star, np.asarray(c_star, dtype=float), self.params, dict(self.provenance))

    def lowest_symmetric_eigenvalues(self) -> tuple:
        """Lowest eigenvalues of the symmetric parts of R* and L R* L^T."""
        if self.params is None:
            raise ConfigError("Closure has no model parameters attached")
        lrl = block_sum(self.r_star, self.params.n_x, self.params.j)
        r_min = np.linalg.eigvalsh(0.5 * (self.r_star + self.r_star.T))[0]
        lrl_min = np.linalg.eigvalsh(0.5 * (lrl + lrl.T))[0]
        return float(r_min), float(lrl_min)

    def to_dict(self) -> dict:
        return {
            'params': self.params.to_dict() if self.params else None,
            'x_star': self.x_star.tolist(),
            'z_bar_star': self.z_bar_star.tolist(),
            'sigma_star': self.sigma_star.ravel().tolist(),
            'r_star': self.r_star.ravel().tolist(),
            'b_star': self.b_star.tolist(),
            'c_star': self.c_star.ravel().tolist(),
            'provenance': self.provenance,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ClosureData":
        params = ModelParams.from_dict(data['params']) if data.get('params') else None
        z_bar = np.asarray(data['z_bar_star'], dtype=float)
        x_star = np.asarray(data['x_star'], dtype=float)
        n_y, n_x = z_bar.shape[0], x_star.shape[0]
        return cls(
            x_star=x_star,
            z_bar_star=z_bar,
            sigma_star=np.asarray(data['sigma_star'], dtype=float).reshape(n_y, n_y),
            r_star=np.asarray(data['r_star'], dtype=float).reshape(n_y, n_y),
            b_star=np.asarray(data['b_star'], dtype=float),
            c_star=np.asarray(data['c_star'], dtype=float).reshape(n_x, n_x),
            params=params,
            provenance=dict(data.get('provenance') or {}),
        )


@dataclass
class OUSpec:
    """dz = -Gamma (z - m) dt + L_x x dt + sigma dW"""
    gamma: np.ndarray
    m: np.ndarray
    sigma_noise: np.ndarray
    l_x: np.ndarray
    x: np.ndarray
    dt: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        self.gamma = np.atleast_2d(np.asarray(self.gamma, dtype=float))
        self.m = np.atleast_1d(np.asarray(self.m, dtype=float))
        self.sigma_noise = np.atleast_2d(np.asarray(self.sigma_noise, dtype=float))
        self.l_x = np.atleast_2d(np.asarray(self.l_x, dtype=float))
        self.x = np.atleast_1d(np.asarray(self.x, dtype=float))
        n = self.gamma.shape[0]
        if self.gamma.shape != (n, n) or self.m.shape != (n,) or self.sigma_noise.shape[0] != n:
            raise DimensionError("Gamma, m and sigma must share the process dimension")
        if self.l_x.shape != (n, self.x.shape[0]):
            raise DimensionError(f"L_x must be ({n}, {self.x.shape[0]}), got {self.l_x.shape}")
        sym = 0.5 * (self.gamma + self.gamma.T)
        if np.linalg.eigvalsh(sym)[0] <= 0:
            raise ConfigError("Symmetric part of Gamma must be positive definite")
        if not self.dt > 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")

    @property
    def dim(self) -> int:
        return self.gamma.shape[0]

    def with_x(self, x) -> "OUSpec":
        return OUSpec(self.gamma, self.m, self.sigma_noise, self.l_x, x, self.dt, self.seed)
