"""Data models for the two-scale Lorenz 96 system"""

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from utils.errors import ConfigError, DimensionError, InvalidRescaleError


@dataclass(frozen=True)
class RescaleConstants:
    """Long-term mean and standard deviation of the uncoupled model at one forcing."""
    mean: float
    beta: float

    def __post_init__(self):
        if not np.isfinite(self.mean) or not np.isfinite(self.beta) or self.beta <= 0:
            raise InvalidRescaleError(f"Rescale constants need finite mean and beta > 0, got {self}")

    def to_dict(self) -> dict:
        return {'mean': float(self.mean), 'beta': float(self.beta)}

    @classmethod
    def from_dict(cls, data: dict) -> "RescaleConstants":
        return cls(mean=float(data['mean']), beta=float(data['beta']))


IDENTITY_RESCALE = RescaleConstants(mean=0.0, beta=1.0)


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the rescaled two-scale model.

    rescale_x / rescale_y may be left unset while a regime is being
    configured; every right-hand side requires them (see require_calibrated).
    """
    n_x: int
    j: int
    eps: float
    f_x: float
    f_y: float
    lambda_x: float
    lambda_y: float
    rescale_x: Optional[RescaleConstants] = None
    rescale_y: Optional[RescaleConstants] = None

    def __post_init__(self):
        if int(self.n_x) != self.n_x or self.n_x < 4:
            raise ConfigError(f"n_x must be an integer >= 4, got {self.n_x}")
        if int(self.j) != self.j or self.j < 1:
            raise ConfigError(f"j must be a positive integer, got {self.j}")
        if not self.eps > 0:
            raise ConfigError(f"eps must be positive, got {self.eps}")

    @property
    def n_y(self) -> int:
        return self.n_x * self.j

    @property
    def is_calibrated(self) -> bool:
        return self.rescale_x is not None and self.rescale_y is not None

    def require_calibrated(self) -> "ModelParams":
        if not self.is_calibrated:
            raise ConfigError("Model parameters are missing rescale constants; calibrate first")
        return self

    def with_rescale(self, rescale_x: RescaleConstants, rescale_y: RescaleConstants) -> "ModelParams":
        return replace(self, rescale_x=rescale_x, rescale_y=rescale_y)

    def to_dict(self) -> dict:
        return {
            'n_x': self.n_x,
            'j': self.j,
            'eps': self.eps,
            'f_x': self.f_x,
            'f_y': self.f_y,
            'lambda_x': self.lambda_x,
            'lambda_y': self.lambda_y,
            'rescale_x': self.rescale_x.to_dict() if self.rescale_x else None,
            'rescale_y': self.rescale_y.to_dict() if self.rescale_y else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModelParams":
        rescale_x = data.get('rescale_x')
        rescale_y = data.get('rescale_y')
        return cls(
            n_x=int(data['n_x']),
            j=int(data['j']),
            eps=float(data['eps']),
            f_x=float(data['f_x']),
            f_y=float(data['f_y']),
            lambda_x=float(data['lambda_x']),
            lambda_y=float(data['lambda_y']),
            rescale_x=RescaleConstants.from_dict(rescale_x) if rescale_x else None,
            rescale_y=RescaleConstants.from_dict(rescale_y) if rescale_y else None,
        )


@dataclass
class FullState:
    """State of the coupled system: slow block x (n_x) and fast block y (n_x*j, row-major)."""
    slow: np.ndarray
    fast: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        self.slow = np.asarray(self.slow, dtype=float)
        self.fast = np.asarray(self.fast, dtype=float)

    def check(self, params: ModelParams) -> "FullState":
        if self.slow.shape != (params.n_x,) or self.fast.shape != (params.n_y,):
            raise DimensionError(
                f"Expected slow ({params.n_x},) and fast ({params.n_y},), "
                f"got {self.slow.shape} and {self.fast.shape}"
            )
        return self

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.slow, self.fast])

    @classmethod
    def from_vector(cls, vector: np.ndarray, params: ModelParams) -> "FullState":
        vector = np.asarray(vector, dtype=float)
        if vector.shape != (params.n_x + params.n_y,):
            raise DimensionError(f"Expected vector of length {params.n_x + params.n_y}, got {vector.shape}")
        return cls(slow=vector[:params.n_x].copy(), fast=vector[params.n_x:].copy())

    def fast_block(self, params: ModelParams) -> np.ndarray:
        """Fast variables addressed as (i, k)."""
        return self.fast.reshape(params.n_x, params.j)
