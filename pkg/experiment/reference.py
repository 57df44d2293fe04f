"""Published L2 error tables for the eight reference regimes.

Keys are (lambda, F_y, F_x); values are (reduced, zero-order) errors
against the full two-scale model.
"""

from typing import Dict, Optional, Tuple

from utils.constants import DIAG_ACF, DIAG_CCF, DIAG_KCF, DIAG_PDF

RegimeKey = Tuple[float, float, float]

PUBLISHED_ERRORS: Dict[str, Dict[RegimeKey, Tuple[float, float]]] = {
    DIAG_PDF: {
        (0.3, 8.0, 6.0): (5.036e-3, 1.165e-2),
        (0.3, 8.0, 16.0): (5.593e-3, 1.469e-2),
        (0.3, 12.0, 6.0): (2.581e-3, 1.576e-2),
        (0.3, 12.0, 16.0): (2.71e-3, 1.818e-2),
        (0.4, 8.0, 6.0): (0.1022, 8.857e-2),
        (0.4, 8.0, 16.0): (3.725e-3, 2.703e-2),
        (0.4, 12.0, 6.0): (9.28e-2, 0.1113),
        (0.4, 12.0, 16.0): (5.885e-3, 3.209e-2),
    },
    DIAG_ACF: {
        (0.3, 8.0, 6.0): (5.841e-2, 0.1211),
        (0.3, 8.0, 16.0): (4.079e-2, 5.342e-2),
        (0.3, 12.0, 6.0): (6.539e-2, 0.1572),
        (0.3, 12.0, 16.0): (1.559e-2, 7.396e-2),
        (0.4, 8.0, 6.0): (5.538e-2, 0.3677),
        (0.4, 8.0, 16.0): (8.534e-2, 0.1355),
        (0.4, 12.0, 6.0): (0.2981, 0.3986),
        (0.4, 12.0, 16.0): (4.835e-2, 0.1482),
    },
    DIAG_CCF: {
        (0.3, 8.0, 6.0): (6.825e-2, 0.1437),
        (0.3, 8.0, 16.0): (0.1094, 0.2134),
        (0.3, 12.0, 6.0): (6.838e-2, 0.1799),
        (0.3, 12.0, 16.0): (3.687e-2, 0.2548),
        (0.4, 8.0, 6.0): (5.313e-2, 0.3666),
        (0.4, 8.0, 16.0): (0.1258, 0.3232),
        (0.4, 12.0, 6.0): (0.3137, 0.3942),
        (0.4, 12.0, 16.0): (6.953e-2, 0.3321),
    },
    DIAG_KCF: {
        (0.3, 8.0, 6.0): (8.911e-3, 2.027e-2),
        (0.3, 8.0, 16.0): (6.885e-3, 1.434e-2),
        (0.3, 12.0, 6.0): (6.783e-3, 2.131e-2),
        (0.3, 12.0, 16.0): (4.154e-3, 1.455e-2),
        (0.4, 8.0, 6.0): (2.66e-2, 0.2779),
        (0.4, 8.0, 16.0): (9.746e-3, 2.284e-2),
        (0.4, 12.0, 6.0): (3.499e-2, 0.3125),
        (0.4, 12.0, 16.0): (5.49e-3, 2.414e-2),
    },
}

# Lowest eigenvalues of the symmetric parts of R* and L R* L^T at lambda=0.4, F_x=6, F_y=8
PUBLISHED_EIGENVALUES = {'min_sym_r_star': 6.314e-2, 'min_sym_lrl': 0.8814}
EIGENVALUE_REGIME: RegimeKey = (0.4, 8.0, 6.0)


def regime_key(lam: float, f_y: float, f_x: float) -> RegimeKey:
    return round(float(lam), 6), round(float(f_y), 6), round(float(f_x), 6)


def published_pair(diagnostic: str, lam: float, f_y: float, f_x: float) -> Optional[Tuple[float, float]]:
    return PUBLISHED_ERRORS.get(diagnostic, {}).get(regime_key(lam, f_y, f_x))


def sign_agrees(diagnostic: str, lam: float, f_y: float, f_x: float,
                reduced: float, zero_order: float) -> Optional[bool]:
    """Whether reduced - zero_order has the published sign; None off the published grid."""
    pair = published_pair(diagnostic, lam, f_y, f_x)
    if pair is None:
        return None
    return (reduced < zero_order) == (pair[0] < pair[1])
