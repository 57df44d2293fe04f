"""Builders shared by several test modules."""

import numpy as np


def random_spd(n: int, seed: int, max_condition: float = 10.0) -> np.ndarray:
    """SPD matrix with eigenvalues spread over [1, max_condition]."""
    generator = np.random.default_rng(seed)
    q, _ = np.linalg.qr(generator.standard_normal((n, n)))
    eigvals = np.linspace(1.0, max_condition, n)
    return (q * eigvals) @ q.T


def quick_regime_dict(**overrides) -> dict:
    """Regime small enough to run end to end in a few seconds."""
    data = {
        'params': {'n_x': 8, 'j': 2, 'eps': 0.05, 'f_x': 6.0, 'f_y': 8.0, 'lambda_x': 0.3},
        't_av': 40.0,
        't_corr': 2.0,
        't_stats': 25.0,
        'plans': {
            'fast': {'dt': 0.005, 'spin_up': 2.0, 'sample_every': 10},
            'x_star': {'dt': 0.001, 'spin_up': 2.0, 'sample_every': 50},
            'full': {'dt': 0.001, 'spin_up': 2.0, 'sample_every': 50},
            'reduced': {'dt': 0.005, 'spin_up': 2.0, 'sample_every': 10},
            'zero_order': {'dt': 0.005, 'spin_up': 2.0, 'sample_every': 10},
        },
        'x_star_mode': 'zero',
        'x_star_duration': 5.0,
        'calibration': {'n': 16, 't_total': 100.0, 'spin_up': 10.0},
        'seed': 5,
    }
    data.update(overrides)
    return data
