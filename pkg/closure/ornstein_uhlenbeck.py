"""Ornstein-Uhlenbeck reference process, for which the quasi-Gaussian response is exact.

The Euler-Maruyama recursion z_{n+1} = (I - dt Gamma) z_n + dt (Gamma m + L_x x) + sqrt(dt) sigma xi_n
is linear, so it is run mode by mode in the eigenbasis of Gamma with
scipy.signal.lfilter instead of a Python loop over steps.
"""

import logging
from typing import Callable, Optional

import numpy as np
from scipy.linalg import solve_continuous_lyapunov
from scipy.signal import lfilter

from closure.models import OUSpec
from integrator.models import IntegrationPlan, SampleSeries
from utils.errors import BlowUpError, InvalidStateError

logger = logging.getLogger(__name__)

CHUNK_STEPS = 1 << 18
MAX_EIGVEC_CONDITION = 1e8


def ou_mean(spec: OUSpec) -> np.ndarray:
    """Stationary mean m + Gamma^{-1} L_x x."""
    return spec.m + np.linalg.solve(spec.gamma, spec.l_x @ spec.x)


def ou_covariance(spec: OUSpec) -> np.ndarray:
    """Stationary covariance: Gamma S + S Gamma^T = sigma sigma^T."""
    return solve_continuous_lyapunov(spec.gamma, spec.sigma_noise @ spec.sigma_noise.T)


def ou_response(spec: OUSpec) -> np.ndarray:
    return np.linalg.inv(spec.gamma)


def _modal_recursion(spec: OUSpec, dt: float):
    eigvals, vectors = np.linalg.eig(spec.gamma)
    if np.linalg.cond(vectors) > MAX_EIGVEC_CONDITION:
        return None
    return 1.0 - dt * eigvals, vectors, np.linalg.inv(vectors)


def _step_chunk_modal(u0, n_steps, forcing, noise, modal):
    multipliers, vectors, inverse = modal
    inputs = (forcing[None, :] + noise) @ inverse.T  # modal coordinates, (n_steps, N)
    u = np.empty_like(inputs)
    for k, a in enumerate(multipliers):
        u[:, k], _ = lfilter([1.0], [1.0, -a], inputs[:, k], zi=[a * u0[k]])
    return u


def _step_chunk_direct(z0, drift_matrix, forcing, noise):
    z = np.empty_like(noise)
    state = z0
    for n in range(noise.shape[0]):
        state = drift_matrix @ state + forcing + noise[n]
        z[n] = state
    return z


def ou_simulate(
    spec: OUSpec,
    plan: IntegrationPlan,
    z0=None,
    observer: Optional[Callable[[float, np.ndarray], None]] = None,
    collect: bool = True,
) -> SampleSeries:
    """Euler-Maruyama path of the OU process sampled per plan.

    The step is plan.dt, the noise comes from spec.seed and the path starts
    at the deterministic fixed point unless z0 is given.
    """
    dt = plan.dt
    n = spec.dim
    rng = np.random.default_rng(spec.seed)
    z = ou_mean(spec) if z0 is None else np.array(z0, dtype=float)
    if not np.all(np.isfinite(z)):
        raise InvalidStateError("Initial OU state contains non-finite values")

    n_spin = plan.spin_up_steps
    n_samples = plan.sample_count
    if n_samples == 0:
        return SampleSeries(plan.dt_sample, n_spin * dt, np.zeros((0, n)))
    total_steps = n_spin + (n_samples - 1) * plan.sample_every

    forcing = dt * (spec.gamma @ spec.m + spec.l_x @ spec.x)
    noise_scale = np.sqrt(dt) * spec.sigma_noise
    modal = _modal_recursion(spec, dt)
    drift_matrix = np.eye(n) - dt * spec.gamma

    samples = []

    def emit(step: int, state: np.ndarray):
        if observer is not None:
            observer(step * dt, state)
        if collect:
            samples.append(state.copy())

    if n_spin == 0:
        emit(0, z)

    u = np.linalg.solve(modal[1], z) if modal is not None else None
    done = 0
    while done < total_steps:
        n_chunk = min(CHUNK_STEPS, total_steps - done)
        noise = rng.standard_normal((n_chunk, spec.sigma_noise.shape[1])) @ noise_scale.T
        if modal is not None:
            u_chunk = _step_chunk_modal(u, n_chunk, forcing, noise, modal)
            u = u_chunk[-1]
            z_chunk = np.real(u_chunk @ modal[1].T)
        else:
            z_chunk = _step_chunk_direct(z, drift_matrix, forcing, noise)
            z = z_chunk[-1]

        steps = done + 1 + np.arange(n_chunk)
        bad = ~np.all(np.isfinite(z_chunk), axis=1)
        if bad.any():
            raise BlowUpError(time=float(steps[np.argmax(bad)] * dt), system="ornstein_uhlenbeck")

        picked = (steps >= n_spin) & ((steps - n_spin) % plan.sample_every == 0)
        for step, row in zip(steps[picked], z_chunk[picked]):
            emit(int(step), row)
        done += n_chunk

    values = np.vstack(samples) if collect else np.zeros((0, n))
    logger.debug(f"OU path: {total_steps} steps, {n_samples} samples")
    return SampleSeries(plan.dt_sample, n_spin * dt, values)
