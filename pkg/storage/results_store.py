"""Results directory layout and file persistence.

    out_dir/
        calibration/F_<forcing>.json
        <regime-id>/closure.json, summary.json, timings.json,
                    response_columns.csv, curves/<variant>_<diagnostic>.csv
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from closure.models import ClosureData
from config import CSV_FLOAT_FORMAT, RESULTS_DIR
from integrator.models import SampleSeries
from model.lorenz import block_sum
from model.models import RescaleConstants
from stats.models import Histogram, LagCurve
from utils.constants import (
    CALIBRATION_DIR,
    CLOSURE_FILE,
    CURVES_DIR,
    RESPONSE_COLUMNS_FILE,
    SUMMARY_FILE,
    TIMINGS_FILE,
)
from utils.errors import ConfigError, DimensionError

logger = logging.getLogger(__name__)


def save_json(path: Path, data: dict):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f, indent=2, sort_keys=True)


def load_json(path: Path) -> dict:
    with open(path, 'r', encoding='utf-8') as f:
        return json.load(f)


def save_closure(closure: ClosureData, path: Path):
    save_json(path, closure.to_dict())
    logger.info(f"Closure saved: {path}")


def load_closure(path: Path) -> ClosureData:
    return ClosureData.from_dict(load_json(path))


def save_curve(path: Path, curve: Union[Histogram, LagCurve], diagnostic: str, regime: str, variant: str):
    """Two-column CSV (lag or bin center, value) behind a one-line header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = f"diagnostic={diagnostic} regime={regime} variant={variant}"
    if isinstance(curve, Histogram):
        header += f" lo={curve.lo!r} hi={curve.hi!r} n_out_of_range={curve.n_out_of_range} n_samples={curve.n_samples}"
    header += "\ngrid,value"
    np.savetxt(path, np.column_stack([curve.grid, curve.values]), fmt=CSV_FLOAT_FORMAT,
               delimiter=',', header=header)


def read_curve_header(path: Path) -> Dict[str, str]:
    with open(path, 'r', encoding='utf-8') as f:
        first = f.readline().lstrip('#').strip()
    return dict(item.split('=', 1) for item in first.split())


def load_curve(path: Path) -> Union[Histogram, LagCurve]:
    """Inverse of save_curve."""
    meta = read_curve_header(path)
    table = np.loadtxt(path, delimiter=',', comments='#', ndmin=2)
    grid, values = table[:, 0], table[:, 1]
    if 'lo' in meta:
        return Histogram(lo=float(meta['lo']), hi=float(meta['hi']), n_bins=values.shape[0],
                         density=values, n_samples=int(meta['n_samples']),
                         n_out_of_range=int(meta['n_out_of_range']))
    dt_lag = grid[1] - grid[0] if grid.shape[0] > 1 else 1.0
    return LagCurve(dt_lag=float(dt_lag), values=values)


def save_trajectory_csv(path: Path, series: SampleSeries):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = (f"dim={series.dim} dt_sample={series.dt_sample!r} t_start={series.t_start!r} count={series.count}\n"
              + ",".join(['t'] + [f"v{i}" for i in range(series.dim)]))
    np.savetxt(path, np.column_stack([series.times, series.values]), fmt=CSV_FLOAT_FORMAT,
               delimiter=',', header=header)


def load_trajectory_csv(path: Path) -> SampleSeries:
    meta = read_curve_header(path)
    dim = int(meta['dim'])
    table = np.loadtxt(path, delimiter=',', comments='#', ndmin=2).reshape(-1, dim + 1)
    if table.shape[0] != int(meta['count']):
        raise DimensionError(f"{path}: expected {meta['count']} rows, found {table.shape[0]}")
    return SampleSeries(float(meta['dt_sample']), float(meta['t_start']), table[:, 1:])


def save_trajectory_npz(path: Path, series: SampleSeries):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savez(path, values=series.values, dt_sample=series.dt_sample, t_start=series.t_start)


def load_trajectory_npz(path: Path) -> SampleSeries:
    with np.load(path) as data:
        return SampleSeries(float(data['dt_sample']), float(data['t_start']), data['values'])


def response_columns(closure: ClosureData) -> pd.DataFrame:
    """Central columns of R* and L R* L^T indexed by offset from the diagonal."""
    params = closure.params
    if params is None:
        raise ConfigError("Closure has no model parameters attached")
    frames = []
    for name, matrix in (('r_star', closure.r_star),
                         ('lrl', block_sum(closure.r_star, params.n_x, params.j))):
        n = matrix.shape[0]
        c = n // 2
        frames.append(pd.DataFrame({'matrix': name, 'offset': np.arange(n) - c, 'value': matrix[:, c]}))
    return pd.concat(frames, ignore_index=True)


class ResultsStore:
    """File-backed store for calibration caches and per-regime results"""

    def __init__(self, root: Optional[Path] = None):
        self.root = Path(root) if root is not None else RESULTS_DIR
        self.init_store()

    def init_store(self):
        try:
            self.root.mkdir(parents=True, exist_ok=True)
            logger.debug(f"Results store at {self.root}")
        except Exception as e:
            logger.error(f"Results store initialization failed: {e}")
            raise

    def regime_dir(self, regime_id: str) -> Path:
        path = self.root / regime_id
        (path / CURVES_DIR).mkdir(parents=True, exist_ok=True)
        return path

    def curve_path(self, regime_id: str, variant: str, diagnostic: str) -> Path:
        return self.regime_dir(regime_id) / CURVES_DIR / f"{variant}_{diagnostic}.csv"

    # -----------------
    # Calibration cache
    # -----------------

    def _calibration_path(self, forcing: float) -> Path:
        return self.root / CALIBRATION_DIR / f"F_{forcing:g}.json"

    def load_calibration(self, forcing: float, protocol: dict) -> Optional[RescaleConstants]:
        """Cached constants, only if they were produced by the same protocol."""
        path = self._calibration_path(forcing)
        if not path.exists():
            return None
        try:
            data = load_json(path)
            if data.get('protocol') != protocol:
                logger.info(f"Calibration cache for forcing {forcing:g} has a different protocol; ignoring")
                return None
            return RescaleConstants.from_dict(data['rescale'])
        except Exception as e:
            logger.warning(f"Unreadable calibration cache {path}: {e}")
            return None

    def save_calibration(self, forcing: float, protocol: dict, rescale: RescaleConstants):
        save_json(self._calibration_path(forcing),
                  {'forcing': forcing, 'protocol': protocol, 'rescale': rescale.to_dict()})

    # -----------------
    # Regime results
    # -----------------

    def save_closure(self, regime_id: str, closure: ClosureData) -> Path:
        path = self.regime_dir(regime_id) / CLOSURE_FILE
        save_closure(closure, path)
        return path

    def load_closure(self, regime_id: str) -> ClosureData:
        return load_closure(self.root / regime_id / CLOSURE_FILE)

    def save_summary(self, regime_id: str, summary: dict) -> Path:
        path = self.regime_dir(regime_id) / SUMMARY_FILE
        save_json(path, summary)
        return path

    def load_summary(self, regime_id: str) -> dict:
        return load_json(self.root / regime_id / SUMMARY_FILE)

    def save_timings(self, regime_id: str, timings: dict) -> Path:
        path = self.regime_dir(regime_id) / TIMINGS_FILE
        save_json(path, timings)
        return path

    def save_curve(self, regime_id: str, variant: str, diagnostic: str, curve) -> Path:
        path = self.curve_path(regime_id, variant, diagnostic)
        save_curve(path, curve, diagnostic, regime_id, variant)
        return path

    def load_curve(self, regime_id: str, variant: str, diagnostic: str):
        return load_curve(self.root / regime_id / CURVES_DIR / f"{variant}_{diagnostic}.csv")

    def save_response_columns(self, regime_id: str, closure: ClosureData) -> Path:
        path = self.regime_dir(regime_id) / RESPONSE_COLUMNS_FILE
        response_columns(closure).to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
        return path

    def list_summaries(self) -> List[Tuple[str, dict]]:
        """(regime_id, summary) for every regime directory holding a summary."""
        found = []
        for path in sorted(self.root.glob(f"*/{SUMMARY_FILE}")):
            try:
                found.append((path.parent.name, load_json(path)))
            except Exception as e:
                logger.error(f"Skipping unreadable summary {path}: {e}")
        return found
