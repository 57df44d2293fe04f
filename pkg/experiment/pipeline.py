"""Single-regime pipeline: calibrate, estimate x*, build the closure, compare
the full two-scale model with the reduced and zero-order models, persist."""

import json
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from closure.models import ClosureData
from closure.response import ClosureAccumulator
from config import FAST_DIAGNOSTIC_DURATION, INITIAL_PERTURBATION, MAX_OUT_OF_RANGE_FRACTION
from integrator.models import IntegrationPlan, SampleSeries
from integrator.rk4 import SeriesCollector, integrate_sampled
from model.calibration import calibrate_with
from model.lorenz import FastLimitingSystem, ReducedSystem, TwoScaleSystem
from model.models import ModelParams, RescaleConstants
from stats.diagnostics import (
    autocorrelation,
    compute_diagnostics,
    histogram_pdf,
    index_shift_gap,
    l2_distance,
)
from stats.models import SystemDiagnostics
from storage.results_store import ResultsStore, save_trajectory_csv, save_trajectory_npz
from experiment.models import RegimeResult, RegimeSpec
from utils.constants import (
    DIAG_ACF,
    DIAG_PDF,
    DIAGNOSTICS,
    MSG_STAGE_DONE,
    PLAN_FAST,
    PLAN_X_STAR,
    REDUCED_VARIANTS,
    SEED_STREAMS,
    STAGE_CALIBRATE,
    STAGE_CLOSURE,
    STAGE_DIAGNOSE,
    STAGE_INTEGRATE,
    STAGE_PERSIST,
    STAGE_X_STAR,
    SYSTEM_FULL,
    SYSTEM_REDUCED,
    SYSTEM_ZERO_ORDER,
    SYSTEMS,
    TRAJECTORY_CSV,
    X_STAR_FILE,
    X_STAR_ZERO,
)
from utils.errors import DimensionError, StageError
from utils.logger import Logger

logger = Logger(__name__)


def stage_seeds(master_seed: int) -> Dict[str, int]:
    """One independent seed per stream, derived from the regime's master seed."""
    children = np.random.SeedSequence(master_seed).spawn(len(SEED_STREAMS))
    return {name: int(child.generate_state(1)[0]) for name, child in zip(SEED_STREAMS, children)}


@contextmanager
def _stage(name: str, timings: Optional[Dict[str, float]] = None, system: Optional[str] = None):
    label = f"{name}/{system}" if system else name
    start = time.perf_counter()
    try:
        yield
    except StageError:
        raise
    except Exception as e:
        logger.error(f"Stage '{label}' failed: {e}")
        raise StageError(name, e, system) from e
    seconds = time.perf_counter() - start
    if timings is not None:
        timings[label] = seconds
    logger.info(MSG_STAGE_DONE.format(stage=label, seconds=seconds))


def _perturbation(n: int, seed: int) -> np.ndarray:
    # rescaled variables have mean near zero
    rng = np.random.default_rng(seed)
    return rng.uniform(-INITIAL_PERTURBATION, INITIAL_PERTURBATION, size=n)


class _SlowSum:
    """Observer summing the first n_x components of each sample."""

    def __init__(self, n_x: int):
        self.n_x = n_x
        self.count = 0
        self.total = np.zeros(n_x)

    def __call__(self, t: float, state: np.ndarray):
        self.total += state[:self.n_x]
        self.count += 1


class _FastObserver:
    """Feeds the closure accumulator and keeps a leading window for fast diagnostics."""

    def __init__(self, accumulator: ClosureAccumulator, keep: int):
        self.accumulator = accumulator
        self.keep = keep
        self.rows: List[np.ndarray] = []

    def __call__(self, t: float, state: np.ndarray):
        self.accumulator(t, state)
        if len(self.rows) < self.keep:
            self.rows.append(state.copy())


# -----------------
# Stages
# -----------------

def calibrate_params(spec: RegimeSpec, store: Optional[ResultsStore] = None) -> ModelParams:
    """Rescale constants for F_x and F_y, read from the store cache when the protocol matches."""
    protocol = spec.calibration
    constants: Dict[float, RescaleConstants] = {}
    for forcing in (spec.params.f_x, spec.params.f_y):
        if forcing in constants:
            continue
        cached = store.load_calibration(forcing, protocol.to_dict()) if store else None
        if cached is not None:
            logger.info(f"Using cached calibration for forcing {forcing:g}")
            constants[forcing] = cached
            continue
        constants[forcing] = calibrate_with(forcing, protocol)
        if store is not None:
            store.save_calibration(forcing, protocol.to_dict(), constants[forcing])
    return spec.params.with_rescale(constants[spec.params.f_x], constants[spec.params.f_y])


def _load_x_star_file(path: str, n_x: int) -> np.ndarray:
    path = Path(path)
    if path.suffix == '.json':
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
        if isinstance(data, dict):
            data = data['x_star']
        vector = np.asarray(data, dtype=float)
    else:
        vector = np.loadtxt(path, delimiter=',', ndmin=1)
    vector = vector.ravel()
    if vector.shape != (n_x,):
        raise DimensionError(f"x* in {path} has length {vector.shape[0]}, expected {n_x}")
    return vector


def estimate_x_star(spec: RegimeSpec, params: Optional[ModelParams] = None, seed: Optional[int] = None) -> np.ndarray:
    """Frozen slow state x* around which the closure is built.

    full_mean integrates the full model for spec.x_star_duration and returns
    the time mean, pooled over indices unless spec.pool_indices is off.
    """
    n_x = spec.params.n_x
    if spec.x_star_mode == X_STAR_ZERO:
        return np.zeros(n_x)
    if spec.x_star_mode == X_STAR_FILE:
        return _load_x_star_file(spec.x_star_file, n_x)

    params = (params or spec.params).require_calibrated()
    seed = stage_seeds(spec.seed)[PLAN_X_STAR] if seed is None else seed
    plan = spec.plan_for(PLAN_X_STAR, seed)
    system = TwoScaleSystem(params)
    slow_sum = _SlowSum(n_x)
    integrate_sampled(system, _perturbation(system.dim, seed), plan, observer=slow_sum, collect=False)
    mean = slow_sum.total / slow_sum.count
    if spec.pool_indices:
        mean = np.full(n_x, mean.mean())
    logger.info(f"x* from {plan.duration:g} time units of the full model: mean component {mean.mean():.4f}")
    return mean


def build_closure_for(spec: RegimeSpec, params: ModelParams, x_star: np.ndarray, seed: int,
                      workers: int = 1, keep_fast: int = 0):
    """Run the fast limiting dynamics at x* and stream them into the closure.

    Returns the closure and the leading keep_fast fast samples.
    """
    plan = spec.plan_for(PLAN_FAST, seed)
    accumulator = ClosureAccumulator(params.n_y, plan.dt_sample, spec.t_corr,
                                     lag_stride=spec.lag_stride, workers=workers)
    observer = _FastObserver(accumulator, keep_fast)
    integrate_sampled(FastLimitingSystem(params, x_star), _perturbation(params.n_y, seed), plan,
                      observer=observer, collect=False)
    provenance = {
        'regime_id': spec.regime_id,
        't_av': spec.t_av,
        'dt': plan.dt,
        'seed': seed,
        'x_star_mode': spec.x_star_mode,
        'lag_stride': spec.lag_stride,
    }
    closure = accumulator.finalize(x_star, params, ridge=spec.ridge, provenance=provenance)
    fast = SampleSeries(plan.dt_sample, plan.spin_up_steps * plan.dt,
                        np.vstack(observer.rows) if observer.rows else np.zeros((0, params.n_y)))
    return closure, fast


def integrate_system(name: str, spec: RegimeSpec, params: ModelParams, closure: ClosureData,
                     seed: int) -> SampleSeries:
    """Slow-variable series of one compared system over t_stats."""
    plan: IntegrationPlan = spec.plan_for(name, seed)
    n_x = params.n_x
    if name == SYSTEM_FULL:
        system = TwoScaleSystem(params)
        s0 = _perturbation(system.dim, seed)
    else:
        system = ReducedSystem(params, closure, zero_order=(name == SYSTEM_ZERO_ORDER), name=name)
        s0 = _perturbation(n_x, seed)
    collector = SeriesCollector(0, n_x)
    series = integrate_sampled(system, s0, plan, observer=collector, collect=False)
    return SampleSeries(series.dt_sample, series.t_start, collector.to_array(n_x))


def compare(diagnostics: Dict[str, SystemDiagnostics]) -> Dict[str, Dict[str, float]]:
    """L2 errors of both reduced variants against the full model, per diagnostic."""
    reference = diagnostics[SYSTEM_FULL]
    return {
        diagnostic: {
            variant: l2_distance(diagnostics[variant].get(diagnostic), reference.get(diagnostic))
            for variant in REDUCED_VARIANTS
        }
        for diagnostic in DIAGNOSTICS
    }


# -----------------
# Entry points
# -----------------

def run_closure(spec: RegimeSpec, store: Optional[ResultsStore] = None, workers: int = 1) -> ClosureData:
    """Calibration, x* and closure construction only."""
    seeds = stage_seeds(spec.seed)
    with _stage(STAGE_CALIBRATE):
        params = calibrate_params(spec, store)
    with _stage(STAGE_X_STAR):
        x_star = estimate_x_star(spec, params, seeds[PLAN_X_STAR])
    with _stage(STAGE_CLOSURE):
        closure, _ = build_closure_for(spec, params, x_star, seeds[PLAN_FAST], workers)
    return closure


def run_regime(spec: RegimeSpec, out_dir: Path, workers: int = 1) -> RegimeResult:
    """Full comparison for one regime; results land in out_dir/<regime-id>/."""
    store = ResultsStore(Path(out_dir))
    regime_id = spec.regime_id
    seeds = stage_seeds(spec.seed)
    timings: Dict[str, float] = {}
    logger.info(f"Regime {regime_id}: starting")

    with _stage(STAGE_CALIBRATE, timings):
        params = calibrate_params(spec, store)
    with _stage(STAGE_X_STAR, timings):
        x_star = estimate_x_star(spec, params, seeds[PLAN_X_STAR])
    with _stage(STAGE_CLOSURE, timings):
        keep = int(round(FAST_DIAGNOSTIC_DURATION / spec.plans[PLAN_FAST].dt_sample)) + 1
        closure, fast = build_closure_for(spec, params, x_star, seeds[PLAN_FAST], workers, keep)

    series: Dict[str, SampleSeries] = {}
    for name in SYSTEMS:
        with _stage(STAGE_INTEGRATE, timings, system=name):
            series[name] = integrate_system(name, spec, params, closure, seeds[name])

    with _stage(STAGE_DIAGNOSE, timings):
        diagnostics = {name: compute_diagnostics(s.values, s.dt_sample) for name, s in series.items()}
        for name, diag in diagnostics.items():
            if diag.pdf.out_of_range_fraction > MAX_OUT_OF_RANGE_FRACTION:
                logger.warning(f"{regime_id}/{name}: {diag.pdf.out_of_range_fraction:.2e} of samples "
                               f"outside the PDF range")
        errors = compare(diagnostics)
        gap = index_shift_gap(series[SYSTEM_FULL].values, 0, params.n_x // 2,
                              dt_sample=series[SYSTEM_FULL].dt_sample)
        fast_pdf = histogram_pdf(fast.values) if not fast.is_empty() else None
        fast_acf = None
        if fast.duration > diagnostics[SYSTEM_FULL].acf.lags[-1]:
            fast_acf = autocorrelation(fast.values, dt_sample=fast.dt_sample)

    result = RegimeResult(
        regime_id=regime_id,
        spec=spec,
        params=params,
        closure=closure,
        diagnostics=diagnostics,
        errors=errors,
        fast_pdf=fast_pdf,
        fast_acf=fast_acf,
        index_gap=gap,
        timings=timings,
    )

    with _stage(STAGE_PERSIST, timings):
        persist_result(result, store, series if spec.save_trajectories else None)
    store.save_timings(regime_id, timings)

    for diagnostic in DIAGNOSTICS:
        logger.info(f"{regime_id} {diagnostic}: reduced {errors[diagnostic][SYSTEM_REDUCED]:.4e}, "
                    f"zero-order {errors[diagnostic][SYSTEM_ZERO_ORDER]:.4e}")
    return result


def persist_result(result: RegimeResult, store: ResultsStore,
                   trajectories: Optional[Dict[str, SampleSeries]] = None):
    regime_id = result.regime_id
    store.save_closure(regime_id, result.closure)
    store.save_response_columns(regime_id, result.closure)
    for name, diag in result.diagnostics.items():
        for diagnostic in DIAGNOSTICS:
            store.save_curve(regime_id, name, diagnostic, diag.get(diagnostic))
    if result.fast_pdf is not None:
        store.save_curve(regime_id, PLAN_FAST, DIAG_PDF, result.fast_pdf)
    if result.fast_acf is not None:
        store.save_curve(regime_id, PLAN_FAST, DIAG_ACF, result.fast_acf)
    if trajectories:
        for name, s in trajectories.items():
            if result.spec.trajectory_format == TRAJECTORY_CSV:
                save_trajectory_csv(store.regime_dir(regime_id) / f"{name}_slow.csv", s)
            else:
                save_trajectory_npz(store.regime_dir(regime_id) / f"{name}_slow.npz", s)
    store.save_summary(regime_id, result.to_summary_dict())
