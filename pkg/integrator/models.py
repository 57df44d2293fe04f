"""Data models for trajectory integration"""

from dataclasses import dataclass, replace

import numpy as np

from utils.errors import ConfigError, DimensionError


@dataclass(frozen=True)
class IntegrationPlan:
    """Fixed-step integration schedule.

    duration is the sampled span after spin_up; a sample is taken every
    sample_every steps, starting with the first post-spin-up state.
    """
    dt: float
    duration: float
    spin_up: float = 0.0
    sample_every: int = 1
    seed: int = 0

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if self.duration < 0:
            raise ConfigError(f"duration must be non-negative, got {self.duration}")
        if self.spin_up < 0:
            raise ConfigError(f"spin_up must be non-negative, got {self.spin_up}")
        if int(self.sample_every) != self.sample_every or self.sample_every < 1:
            raise ConfigError(f"sample_every must be a positive integer, got {self.sample_every}")

    @property
    def dt_sample(self) -> float:
        return self.dt * self.sample_every

    @property
    def spin_up_steps(self) -> int:
        return int(round(self.spin_up / self.dt))

    @property
    def sample_count(self) -> int:
        if self.duration == 0:
            return 0
        # 1e-9 guards against duration/dt_sample landing just under an integer
        return int(np.floor(self.duration / self.dt_sample + 1e-9)) + 1

    def with_seed(self, seed: int) -> "IntegrationPlan":
        return replace(self, seed=int(seed))

    def with_duration(self, duration: float) -> "IntegrationPlan":
        return replace(self, duration=float(duration))

    def to_dict(self) -> dict:
        return {
            'dt': self.dt,
            'duration': self.duration,
            'spin_up': self.spin_up,
            'sample_every': self.sample_every,
            'seed': self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "IntegrationPlan":
        return cls(
            dt=float(data['dt']),
            duration=float(data['duration']),
            spin_up=float(data.get('spin_up', 0.0)),
            sample_every=int(data.get('sample_every', 1)),
            seed=int(data.get('seed', 0)),
        )


@dataclass
class SampleSeries:
    """Uniformly sampled trajectory: values[m] is the state at t_start + m*dt_sample."""
    dt_sample: float
    t_start: float
    values: np.ndarray

    def __post_init__(self):
        if not self.dt_sample > 0:
            raise ConfigError(f"dt_sample must be positive, got {self.dt_sample}")
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim == 1:
            self.values = self.values.reshape(-1, 1)
        if self.values.ndim != 2:
            raise DimensionError(f"Series values must be (count, dim), got shape {self.values.shape}")

    @property
    def count(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def duration(self) -> float:
        return max(self.count - 1, 0) * self.dt_sample

    @property
    def times(self) -> np.ndarray:
        return self.t_start + self.dt_sample * np.arange(self.count)

    def is_empty(self) -> bool:
        return self.count == 0

    def columns(self, start: int, stop: int) -> "SampleSeries":
        """Series restricted to state components [start, stop)."""
        return SampleSeries(self.dt_sample, self.t_start, self.values[:, start:stop])
