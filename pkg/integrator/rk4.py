"""Fixed-step classical Runge-Kutta integration with spin-up and uniform sampling."""

import logging
from typing import Callable, List, Optional

import numpy as np

from integrator.models import IntegrationPlan, SampleSeries
from utils.errors import BlowUpError, InvalidStateError

logger = logging.getLogger(__name__)

Rhs = Callable[[np.ndarray], np.ndarray]
Observer = Callable[[float, np.ndarray], None]


def rk4_step(rhs: Rhs, state: np.ndarray, dt: float, t: float = 0.0) -> np.ndarray:
    """One RK4 step of an autonomous system; t only labels a blow-up."""
    k1 = rhs(state)
    k2 = rhs(state + 0.5 * dt * k1)
    k3 = rhs(state + 0.5 * dt * k2)
    k4 = rhs(state + dt * k3)
    increment = k1 + 2.0 * k2 + 2.0 * k3 + k4
    if not np.all(np.isfinite(increment)):
        raise BlowUpError(time=t + dt, system=getattr(rhs, 'name', None))
    return state + (dt / 6.0) * increment


class SeriesCollector:
    """Observer that keeps every sample (optionally a slice of each state)."""

    def __init__(self, start: int = 0, stop: Optional[int] = None):
        self.start = start
        self.stop = stop
        self._rows: List[np.ndarray] = []

    def __call__(self, t: float, state: np.ndarray):
        self._rows.append(state[self.start:self.stop].copy())

    def to_array(self, dim: int) -> np.ndarray:
        if not self._rows:
            return np.zeros((0, dim))
        return np.vstack(self._rows)


def integrate_sampled(
    rhs: Rhs,
    s0,
    plan: IntegrationPlan,
    observer: Optional[Observer] = None,
    collect: bool = True,
) -> SampleSeries:
    """Advance rhs from s0 according to plan.

    The spin-up is discarded; afterwards every plan.sample_every-th state is
    handed to observer(t, state) and, when collect is set, stored in the
    returned series. Streaming consumers pass collect=False so long runs are
    not held in memory.
    """
    state = np.array(s0, dtype=float)
    if state.ndim == 0:
        state = state.reshape(1)
    if not np.all(np.isfinite(state)):
        raise InvalidStateError("Initial state contains non-finite values")

    dt = plan.dt
    n_spin = plan.spin_up_steps
    n_samples = plan.sample_count
    t_start = n_spin * dt
    collector = SeriesCollector() if collect else None
    system = getattr(rhs, 'name', 'system')

    if n_samples == 0:
        return SampleSeries(plan.dt_sample, t_start, np.zeros((0, state.shape[0])))

    t = 0.0
    step = 0
    for _ in range(n_spin):
        state = rk4_step(rhs, state, dt, t)
        step += 1
        t = step * dt

    logger.debug(f"{system}: spin-up of {n_spin} steps done, sampling {n_samples} states")
    progress_every = max(n_samples // 10, 1)

    for m in range(n_samples):
        if m > 0:
            for _ in range(plan.sample_every):
                state = rk4_step(rhs, state, dt, t)
                step += 1
                t = step * dt
        if observer is not None:
            observer(t, state)
        if collector is not None:
            collector(t, state)
        if m % progress_every == 0:
            logger.debug(f"{system}: sample {m}/{n_samples} at t = {t:.2f}")

    values = collector.to_array(state.shape[0]) if collector is not None else np.zeros((0, state.shape[0]))
    return SampleSeries(plan.dt_sample, t_start, values)
