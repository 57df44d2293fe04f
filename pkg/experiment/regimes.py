"""Regime and suite configuration files, and the reference regime grid."""

import json
import logging
from pathlib import Path
from typing import List, Optional

from config import DEFAULT_EPS, DEFAULT_J, DEFAULT_N_X, T_STATS_DESK, T_STATS_FULL
from experiment.models import RegimeSpec
from utils.constants import PROFILE_DESK, PROFILE_FULL
from utils.errors import ConfigError

logger = logging.getLogger(__name__)

REFERENCE_LAMBDAS = (0.3, 0.4)
REFERENCE_F_Y = (8.0, 12.0)
REFERENCE_F_X = (6.0, 16.0)

PROFILE_T_STATS = {PROFILE_DESK: T_STATS_DESK, PROFILE_FULL: T_STATS_FULL}


def reference_regime_dicts(profile: str = PROFILE_DESK, **overrides) -> List[dict]:
    if profile not in PROFILE_T_STATS:
        raise ConfigError(f"Unknown profile '{profile}', expected one of {sorted(PROFILE_T_STATS)}")
    regimes = []
    for lam in REFERENCE_LAMBDAS:
        for f_y in REFERENCE_F_Y:
            for f_x in REFERENCE_F_X:
                data = {
                    'params': {'n_x': DEFAULT_N_X, 'j': DEFAULT_J, 'eps': DEFAULT_EPS,
                               'f_x': f_x, 'f_y': f_y, 'lambda_x': lam, 'lambda_y': lam},
                    't_stats': PROFILE_T_STATS[profile],
                }
                data.update(overrides)
                regimes.append(data)
    return regimes


def reference_regimes(profile: str = PROFILE_DESK, **overrides) -> List[RegimeSpec]:
    """The eight reference regimes: lambda in {0.3, 0.4}, F_y in {8, 12}, F_x in {6, 16}.

    overrides replace top-level regime fields (e.g. t_av, x_star_mode) in all eight.
    """
    return [RegimeSpec.from_dict(data) for data in reference_regime_dicts(profile, **overrides)]


def _read_json(path: Path) -> dict:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}") from e


def load_regime(path: Path) -> RegimeSpec:
    path = Path(path)
    spec = RegimeSpec.from_dict(_read_json(path), base_dir=path.parent)
    logger.info(f"Loaded regime {spec.regime_id} from {path}")
    return spec


def load_suite(path: Path, profile: Optional[str] = None) -> List[RegimeSpec]:
    """Regimes of a suite file.

    Either {"regimes": [regime | "relative/path.json", ...]} or
    {"reference_regimes": {"profile": "desk", ...overrides}}. A profile passed
    here replaces the one in the file.
    """
    path = Path(path)
    data = _read_json(path)
    if 'reference_regimes' in data:
        options = dict(data['reference_regimes'] or {})
        chosen = profile or options.pop('profile', PROFILE_DESK)
        options.pop('profile', None)
        return reference_regimes(chosen, **options)

    if profile is not None and profile not in PROFILE_T_STATS:
        raise ConfigError(f"Unknown profile '{profile}', expected one of {sorted(PROFILE_T_STATS)}")
    specs = []
    for entry in data.get('regimes', []):
        base_dir = path.parent
        if isinstance(entry, str):
            entry_path = path.parent / entry
            entry, base_dir = _read_json(entry_path), entry_path.parent
        if profile is not None and 't_stats' not in entry:
            entry = dict(entry, t_stats=PROFILE_T_STATS[profile])
        specs.append(RegimeSpec.from_dict(entry, base_dir=base_dir))
    return specs
