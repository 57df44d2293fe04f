"""Calibration of the rescaling constants of the uncoupled Lorenz 96 model."""

import logging
from dataclasses import dataclass

import numpy as np

from config import (
    CALIBRATION_DT,
    CALIBRATION_N,
    CALIBRATION_PERTURBATION,
    CALIBRATION_SAMPLE_EVERY,
    CALIBRATION_SPIN_UP,
    CALIBRATION_T_TOTAL,
    MIN_BETA,
)
from integrator.models import IntegrationPlan
from integrator.rk4 import integrate_sampled
from model.lorenz import L96System, RescaledL96System
from model.models import RescaleConstants
from utils.errors import ConfigError, DegenerateAttractorError

logger = logging.getLogger(__name__)


class PooledMoments:
    """Observer pooling the first two moments over every index and sample.

    Sums are taken around the first observed value to keep the variance
    well conditioned when the mean is large.
    """

    def __init__(self):
        self.count = 0
        self._shift = None
        self._sum = 0.0
        self._sum_sq = 0.0

    def __call__(self, t: float, state: np.ndarray):
        if self._shift is None:
            self._shift = float(state[0])
        d = state - self._shift
        self.count += d.size
        self._sum += float(d.sum())
        self._sum_sq += float(d @ d)

    @property
    def mean(self) -> float:
        return self._shift + self._sum / self.count

    @property
    def std(self) -> float:
        m = self._sum / self.count
        return float(np.sqrt(max(self._sum_sq / self.count - m * m, 0.0)))


@dataclass(frozen=True)
class CalibrationProtocol:
    n: int = CALIBRATION_N
    t_total: float = CALIBRATION_T_TOTAL
    dt: float = CALIBRATION_DT
    spin_up: float = CALIBRATION_SPIN_UP
    seed: int = 0
    sample_every: int = CALIBRATION_SAMPLE_EVERY
    min_beta: float = MIN_BETA

    def to_dict(self) -> dict:
        return {
            'n': self.n,
            't_total': self.t_total,
            'dt': self.dt,
            'spin_up': self.spin_up,
            'seed': self.seed,
            'sample_every': self.sample_every,
            'min_beta': self.min_beta,
        }


def _perturbed_start(center: float, n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return center + rng.uniform(-CALIBRATION_PERTURBATION, CALIBRATION_PERTURBATION, size=n)


def calibrate(
    forcing: float,
    n: int = CALIBRATION_N,
    t_total: float = CALIBRATION_T_TOTAL,
    dt: float = CALIBRATION_DT,
    spin_up: float = CALIBRATION_SPIN_UP,
    seed: int = 0,
    sample_every: int = CALIBRATION_SAMPLE_EVERY,
    min_beta: float = MIN_BETA,
) -> RescaleConstants:
    """Long-term mean and standard deviation of the uncoupled model, pooled over indices and time."""
    if not t_total > 0:
        raise ConfigError(f"t_total must be positive, got {t_total}")
    plan = IntegrationPlan(dt=dt, duration=t_total, spin_up=spin_up, sample_every=sample_every, seed=seed)
    moments = PooledMoments()
    x0 = _perturbed_start(forcing, n, seed)

    logger.info(f"Calibrating forcing {forcing:g}: n={n}, T={t_total:g}, dt={dt:g}, seed={seed}")
    integrate_sampled(L96System(forcing), x0, plan, observer=moments, collect=False)

    mean, beta = moments.mean, moments.std
    if beta < min_beta:
        raise DegenerateAttractorError(forcing, beta, min_beta)

    logger.info(f"Forcing {forcing:g}: mean = {mean:.6f}, beta = {beta:.6f}")
    return RescaleConstants(mean=mean, beta=beta)


def calibrate_with(forcing: float, protocol: CalibrationProtocol) -> RescaleConstants:
    return calibrate(
        forcing,
        n=protocol.n,
        t_total=protocol.t_total,
        dt=protocol.dt,
        spin_up=protocol.spin_up,
        seed=protocol.seed,
        sample_every=protocol.sample_every,
        min_beta=protocol.min_beta,
    )


def rescaled_statistics(
    forcing: float,
    rescale: RescaleConstants,
    n: int = CALIBRATION_N,
    t_total: float = CALIBRATION_T_TOTAL,
    dt: float = CALIBRATION_DT,
    spin_up: float = CALIBRATION_SPIN_UP,
    seed: int = 1,
) -> RescaleConstants:
    """Pooled mean and standard deviation of the rescaled uncoupled model.

    With well calibrated constants the result is close to (0, 1).
    """
    plan = IntegrationPlan(dt=dt, duration=t_total, spin_up=spin_up,
                           sample_every=CALIBRATION_SAMPLE_EVERY, seed=seed)
    moments = PooledMoments()
    x0 = _perturbed_start(0.0, n, seed)
    integrate_sampled(RescaledL96System(forcing, rescale), x0, plan, observer=moments, collect=False)
    return RescaleConstants(mean=moments.mean, beta=max(moments.std, np.finfo(float).tiny))
