"""Right-hand sides of the Lorenz 96 family.

All functions are pure. Periodic indexing is done with np.roll:
np.roll(x, 1)[i] == x[i-1], np.roll(x, -1)[i] == x[i+1], np.roll(x, 2)[i] == x[i-2].

The fast variables are stored row-major as (i, k) with k in [0, j), so the
wrap y[i, j] -> y[i+1, 0] is simply the next element of one flat ring of
length n_x*j.
"""

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from model.models import FullState, ModelParams, RescaleConstants
from utils.errors import DimensionError, InvalidRescaleError

if TYPE_CHECKING:
    from closure.models import ClosureData


def _as_ring(x, name: str = "state") -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] < 4:
        raise DimensionError(f"{name} must be a vector of length >= 4, got shape {x.shape}")
    return x


def _check_rescale(rescale: RescaleConstants):
    if not rescale.beta > 0:
        raise InvalidRescaleError(f"beta must be positive, got {rescale.beta}")


def l96_rhs(x, forcing: float) -> np.ndarray:
    """dx_i = x_{i-1}(x_{i+1} - x_{i-2}) - x_i + F"""
    x = _as_ring(x)
    return np.roll(x, 1) * (np.roll(x, -1) - np.roll(x, 2)) - x + forcing


def rescaled_l96_rhs(x_hat, forcing: float, rescale: RescaleConstants) -> np.ndarray:
    """Uncoupled model in the variables x = mean + beta*x_hat, t = tau/beta."""
    x = _as_ring(x_hat)
    _check_rescale(rescale)
    beta = rescale.beta
    gradient = np.roll(x, -1) - np.roll(x, 2)
    return (np.roll(x, 1) * gradient
            + (rescale.mean * gradient - x) / beta
            + (forcing - rescale.mean) / beta ** 2)


def rescaled_fast_term(y, forcing: float, rescale: RescaleConstants) -> np.ndarray:
    """Bracketed fast term of the two-scale model on the flat ring.

    The fast lattice runs in the opposite direction to the slow one:
    y_{k+1}(y_{k-1} - y_{k+2}) + [ybar(y_{k-1} - y_{k+2}) - y_k]/beta + (F - ybar)/beta^2
    """
    y = _as_ring(y, "fast state")
    _check_rescale(rescale)
    beta = rescale.beta
    gradient = np.roll(y, 1) - np.roll(y, -2)
    return (np.roll(y, -1) * gradient
            + (rescale.mean * gradient - y) / beta
            + (forcing - rescale.mean) / beta ** 2)


# -----------------
# Coupling operator L, L_{i,(j,k)} = delta_ij
# -----------------

def coarse_sum(y, n_x: int, j: int) -> np.ndarray:
    """(L y)_i = sum_k y_(i,k)"""
    y = np.asarray(y, dtype=float)
    if y.shape != (n_x * j,):
        raise DimensionError(f"Expected fast vector of length {n_x * j}, got {y.shape}")
    return y.reshape(n_x, j).sum(axis=1)


def spread(x, j: int) -> np.ndarray:
    """(L^T x)_(i,k) = x_i"""
    return np.repeat(np.asarray(x, dtype=float), j)


def block_sum(matrix, n_x: int, j: int) -> np.ndarray:
    """L M L^T for an (n_x*j) x (n_x*j) matrix M."""
    matrix = np.asarray(matrix, dtype=float)
    n_y = n_x * j
    if matrix.shape != (n_y, n_y):
        raise DimensionError(f"Expected {n_y}x{n_y} matrix, got {matrix.shape}")
    return matrix.reshape(n_x, j, n_x, j).sum(axis=(1, 3))


def coupling_matrix(n_x: int, j: int) -> np.ndarray:
    """Dense L, shape (n_x, n_x*j)."""
    return np.kron(np.eye(n_x), np.ones((1, j)))


# -----------------
# Coupled, limiting and reduced systems
# -----------------

def _two_scale_vector_rhs(x: np.ndarray, y: np.ndarray, params: ModelParams):
    slow = (rescaled_l96_rhs(x, params.f_x, params.rescale_x)
            - (params.lambda_y / params.j) * coarse_sum(y, params.n_x, params.j))
    fast = (rescaled_fast_term(y, params.f_y, params.rescale_y) / params.eps
            + (params.lambda_x / params.eps) * spread(x, params.j))
    return slow, fast


def two_scale_rhs(state: FullState, params: ModelParams) -> FullState:
    """Time derivative of the rescaled two-scale model."""
    params.require_calibrated()
    state.check(params)
    slow, fast = _two_scale_vector_rhs(state.slow, state.fast, params)
    return FullState(slow=slow, fast=fast)


def fast_limiting_rhs(z, x_star, params: ModelParams) -> np.ndarray:
    """Fast dynamics at frozen x on the order-one time scale: eps*g(z) + lambda_x L^T x*."""
    params.require_calibrated()
    z = np.asarray(z, dtype=float)
    x_star = np.asarray(x_star, dtype=float)
    if z.shape != (params.n_y,) or x_star.shape != (params.n_x,):
        raise DimensionError(
            f"Expected z ({params.n_y},) and x* ({params.n_x},), got {z.shape} and {x_star.shape}"
        )
    return rescaled_fast_term(z, params.f_y, params.rescale_y) + params.lambda_x * spread(x_star, params.j)


def reduced_rhs(x, closure: "ClosureData", params: ModelParams, zero_order: bool = False) -> np.ndarray:
    """f(x) + b* - C*(x - x*); zero_order drops the linear correction."""
    params.require_calibrated()
    x = np.asarray(x, dtype=float)
    if x.shape != (params.n_x,) or closure.x_star.shape != (params.n_x,):
        raise DimensionError(f"Expected slow vectors of length {params.n_x}")
    drift = rescaled_l96_rhs(x, params.f_x, params.rescale_x) + closure.b_star
    if not zero_order:
        drift = drift - closure.c_star @ (x - closure.x_star)
    return drift


# -----------------
# Callables for the integrator (flat state vectors)
# -----------------

@dataclass(frozen=True)
class L96System:
    forcing: float
    name: str = "l96"

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return l96_rhs(x, self.forcing)


@dataclass(frozen=True)
class RescaledL96System:
    forcing: float
    rescale: RescaleConstants
    name: str = "rescaled_l96"

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return rescaled_l96_rhs(x, self.forcing, self.rescale)


@dataclass(frozen=True)
class TwoScaleSystem:
    """Full model on the concatenated vector [x, y]."""
    params: ModelParams
    name: str = "full"

    def __post_init__(self):
        self.params.require_calibrated()

    @property
    def dim(self) -> int:
        return self.params.n_x + self.params.n_y

    def __call__(self, state: np.ndarray) -> np.ndarray:
        n_x = self.params.n_x
        slow, fast = _two_scale_vector_rhs(state[:n_x], state[n_x:], self.params)
        return np.concatenate([slow, fast])


@dataclass(frozen=True)
class FastLimitingSystem:
    params: ModelParams
    x_star: np.ndarray
    name: str = "fast"

    def __post_init__(self):
        self.params.require_calibrated()

    def __call__(self, z: np.ndarray) -> np.ndarray:
        return fast_limiting_rhs(z, self.x_star, self.params)


@dataclass(frozen=True)
class ReducedSystem:
    params: ModelParams
    closure: "ClosureData"
    zero_order: bool = False
    name: str = "reduced"

    def __post_init__(self):
        self.params.require_calibrated()

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return reduced_rhs(x, self.closure, self.params, self.zero_order)
