"""Data models for regime experiments"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from closure.models import ClosureData
from config import (
    CORRELATION_WINDOW,
    DEFAULT_EPS,
    DEFAULT_J,
    DEFAULT_N_X,
    FAST_MODEL_DT,
    FULL_MODEL_DT,
    MAX_OUT_OF_RANGE_FRACTION,
    SAMPLE_SPACING,
    SLOW_MODEL_DT,
    STATS_SPIN_UP,
    T_AV,
    T_CORR,
    T_STATS_DESK,
    X_STAR_DURATION,
)
from integrator.models import IntegrationPlan
from model.calibration import CalibrationProtocol
from model.models import ModelParams, RescaleConstants
from stats.models import Histogram, LagCurve, SystemDiagnostics
from utils.constants import (
    DIAGNOSTICS,
    PLAN_FAST,
    PLAN_NAMES,
    PLAN_X_STAR,
    REDUCED_VARIANTS,
    SYSTEM_FULL,
    SYSTEM_REDUCED,
    SYSTEM_ZERO_ORDER,
    SYSTEMS,
    TRAJECTORY_FORMATS,
    TRAJECTORY_NPZ,
    X_STAR_FILE,
    X_STAR_FULL_MEAN,
    X_STAR_MODES,
)
from utils.errors import ConfigError


def _plan(dt: float) -> IntegrationPlan:
    # durations are filled in per run; sampling always lands on SAMPLE_SPACING
    return IntegrationPlan(dt=dt, duration=0.0, spin_up=STATS_SPIN_UP,
                           sample_every=int(round(SAMPLE_SPACING / dt)))


def default_plans() -> Dict[str, IntegrationPlan]:
    return {
        PLAN_FAST: _plan(FAST_MODEL_DT),
        PLAN_X_STAR: _plan(FULL_MODEL_DT),
        SYSTEM_FULL: _plan(FULL_MODEL_DT),
        SYSTEM_REDUCED: _plan(SLOW_MODEL_DT),
        SYSTEM_ZERO_ORDER: _plan(SLOW_MODEL_DT),
    }


def _plan_from_dict(base: IntegrationPlan, data: dict) -> IntegrationPlan:
    merged = base.to_dict()
    merged.update(data)
    return IntegrationPlan.from_dict(merged)


@dataclass(frozen=True)
class RegimeSpec:
    """One dynamical regime and the full protocol used to study it.

    params usually arrives without rescale constants; run_regime calibrates
    them. Plan durations are set per run (t_av + t_corr for the fast run,
    x_star_duration for the x* run, t_stats for the three compared systems).
    """
    params: ModelParams
    t_av: float = T_AV
    t_corr: float = T_CORR
    t_stats: float = T_STATS_DESK
    plans: Dict[str, IntegrationPlan] = field(default_factory=default_plans)
    x_star_mode: str = X_STAR_FULL_MEAN
    x_star_file: Optional[str] = None
    x_star_duration: float = X_STAR_DURATION
    pool_indices: bool = True
    seed: int = 0
    lag_stride: int = 1
    ridge: bool = False
    calibration: CalibrationProtocol = field(default_factory=CalibrationProtocol)
    save_trajectories: bool = False
    trajectory_format: str = TRAJECTORY_NPZ
    name: Optional[str] = None

    def __post_init__(self):
        if not self.t_stats > CORRELATION_WINDOW:
            raise ConfigError(f"t_stats must exceed the correlation window {CORRELATION_WINDOW:g}")
        if not self.t_corr > 0 or self.t_av < self.t_corr:
            raise ConfigError(f"Need 0 < t_corr <= t_av, got t_corr={self.t_corr}, t_av={self.t_av}")
        if self.x_star_mode not in X_STAR_MODES:
            raise ConfigError(f"Unknown x_star_mode '{self.x_star_mode}', expected one of {X_STAR_MODES}")
        if self.x_star_mode == X_STAR_FILE and not self.x_star_file:
            raise ConfigError("x_star_mode 'file' needs x_star_file")
        if self.trajectory_format not in TRAJECTORY_FORMATS:
            raise ConfigError(f"Unknown trajectory_format '{self.trajectory_format}', "
                              f"expected one of {TRAJECTORY_FORMATS}")
        if self.x_star_duration <= 0:
            raise ConfigError("x_star_duration must be positive")
        if int(self.lag_stride) != self.lag_stride or self.lag_stride < 1:
            raise ConfigError(f"lag_stride must be a positive integer, got {self.lag_stride}")
        missing = set(PLAN_NAMES) - set(self.plans)
        if missing:
            raise ConfigError(f"Missing integration plans: {sorted(missing)}")
        spacing = {name: self.plans[name].dt_sample for name in SYSTEMS}
        if not np.allclose(list(spacing.values()), spacing[SYSTEM_FULL], rtol=1e-12, atol=0.0):
            raise ConfigError(f"Compared systems must share one sampling interval, got {spacing}")

    @property
    def regime_id(self) -> str:
        if self.name:
            return self.name
        p = self.params
        lam = f"{p.lambda_x:g}" if p.lambda_x == p.lambda_y else f"{p.lambda_x:g}-{p.lambda_y:g}"
        return f"lam{lam}_fx{p.f_x:g}_fy{p.f_y:g}"

    @property
    def dt_sample(self) -> float:
        return self.plans[SYSTEM_FULL].dt_sample

    def plan_for(self, name: str, seed: int) -> IntegrationPlan:
        """Plan of one run with its duration and derived seed filled in."""
        if name == PLAN_FAST:
            duration = self.t_av + self.t_corr
        elif name == PLAN_X_STAR:
            duration = self.x_star_duration
        else:
            duration = self.t_stats
        return self.plans[name].with_duration(duration).with_seed(seed)

    def to_dict(self) -> dict:
        params = self.params.to_dict()
        params.pop('rescale_x', None)
        params.pop('rescale_y', None)
        return {
            'name': self.name,
            'params': params,
            't_av': self.t_av,
            't_corr': self.t_corr,
            't_stats': self.t_stats,
            'plans': {name: {k: v for k, v in plan.to_dict().items() if k not in ('duration', 'seed')}
                      for name, plan in self.plans.items()},
            'x_star_mode': self.x_star_mode,
            'x_star_file': self.x_star_file,
            'x_star_duration': self.x_star_duration,
            'pool_indices': self.pool_indices,
            'seed': self.seed,
            'lag_stride': self.lag_stride,
            'ridge': self.ridge,
            'calibration': self.calibration.to_dict(),
            'save_trajectories': self.save_trajectories,
            'trajectory_format': self.trajectory_format,
        }

    @classmethod
    def from_dict(cls, data: dict, base_dir: Optional[Path] = None) -> "RegimeSpec":
        """Regime from its JSON form; absent fields take the configured defaults."""
        try:
            raw = dict(data['params'])
            params = ModelParams(
                n_x=int(raw.get('n_x', DEFAULT_N_X)),
                j=int(raw.get('j', DEFAULT_J)),
                eps=float(raw.get('eps', DEFAULT_EPS)),
                f_x=float(raw['f_x']),
                f_y=float(raw['f_y']),
                lambda_x=float(raw['lambda_x']),
                lambda_y=float(raw.get('lambda_y', raw['lambda_x'])),
            )
        except KeyError as e:
            raise ConfigError(f"Regime configuration is missing {e}") from e

        plans = default_plans()
        for name, plan_data in (data.get('plans') or {}).items():
            if name not in plans:
                raise ConfigError(f"Unknown plan '{name}', expected one of {PLAN_NAMES}")
            plans[name] = _plan_from_dict(plans[name], plan_data)

        calibration = CalibrationProtocol(**(data.get('calibration') or {}))
        x_star_file = data.get('x_star_file')
        if x_star_file and base_dir is not None and not Path(x_star_file).is_absolute():
            x_star_file = str(Path(base_dir) / x_star_file)

        return cls(
            params=params,
            t_av=float(data.get('t_av', T_AV)),
            t_corr=float(data.get('t_corr', T_CORR)),
            t_stats=float(data.get('t_stats', T_STATS_DESK)),
            plans=plans,
            x_star_mode=data.get('x_star_mode', X_STAR_FULL_MEAN),
            x_star_file=x_star_file,
            x_star_duration=float(data.get('x_star_duration', X_STAR_DURATION)),
            pool_indices=bool(data.get('pool_indices', True)),
            seed=int(data.get('seed', 0)),
            lag_stride=int(data.get('lag_stride', 1)),
            ridge=bool(data.get('ridge', False)),
            calibration=calibration,
            save_trajectories=bool(data.get('save_trajectories', False)),
            trajectory_format=str(data.get('trajectory_format', TRAJECTORY_NPZ)),
            name=data.get('name'),
        )


@dataclass
class RegimeResult:
    """Everything a regime run produced"""
    regime_id: str
    spec: RegimeSpec
    params: ModelParams
    closure: ClosureData
    diagnostics: Dict[str, SystemDiagnostics]
    errors: Dict[str, Dict[str, float]]  # errors[diagnostic][variant]
    fast_pdf: Optional[Histogram] = None
    fast_acf: Optional[LagCurve] = None
    index_gap: Optional[float] = None
    timings: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for diagnostic in DIAGNOSTICS:
            for variant in REDUCED_VARIANTS:
                if variant not in self.errors.get(diagnostic, {}):
                    raise ConfigError(f"Missing error entry {diagnostic}/{variant}")

    @property
    def rescale_x(self) -> RescaleConstants:
        return self.params.rescale_x

    @property
    def rescale_y(self) -> RescaleConstants:
        return self.params.rescale_y

    def out_of_range(self) -> Dict[str, float]:
        return {name: diag.pdf.out_of_range_fraction for name, diag in self.diagnostics.items()}

    def pdf_range_ok(self) -> bool:
        """Every system has at most MAX_OUT_OF_RANGE_FRACTION of its samples outside the PDF grid."""
        return all(f <= MAX_OUT_OF_RANGE_FRACTION for f in self.out_of_range().values())

    def to_summary_dict(self) -> dict:
        """Deterministic summary: everything except wall-clock timings."""
        provenance = self.closure.provenance
        return {
            'regime_id': self.regime_id,
            'spec': self.spec.to_dict(),
            'rescale_x': self.rescale_x.to_dict(),
            'rescale_y': self.rescale_y.to_dict(),
            'x_star': self.closure.x_star.tolist(),
            'errors': {d: {v: float(e) for v, e in by_variant.items()} for d, by_variant in self.errors.items()},
            'eigenvalues': {
                'min_sym_r_star': provenance.get('min_eig_r'),
                'min_sym_lrl': provenance.get('min_eig_lrl'),
            },
            'closure_pairs': provenance.get('n_pairs'),
            'out_of_range_fraction': self.out_of_range(),
            'pdf_range_ok': self.pdf_range_ok(),
            'index_shift_gap': self.index_gap,
        }


@dataclass
class SuiteOutcome:
    """Summaries of the regimes that finished and the errors of those that did not."""
    summaries: Dict[str, dict] = field(default_factory=dict)
    failures: Dict[str, str] = field(default_factory=dict)

    @property
    def regime_ids(self) -> List[str]:
        return sorted(set(self.summaries) | set(self.failures))

    def to_dict(self) -> dict:
        return {'summaries': self.summaries, 'failures': self.failures}
