"""
Mobius (pseudo-hyperbolic) geometry of the unit disc
"""

import numpy as np

from peakkit.shared.errors import DomainViolation


def mobius_distance(a: complex, b: complex) -> float:
    """
    Pseudo-hyperbolic distance |a - b| / |1 - conj(a) b| on the unit disc

    Raises:
        DomainViolation: if |a| >= 1 or |b| >= 1
    """
    if abs(a) >= 1.0 or abs(b) >= 1.0:
        raise DomainViolation(f"mobius_distance needs points of the open disc, got {a!r}, {b!r}")
    return float(abs(a - b) / abs(1.0 - np.conj(a) * b))


def mobius_distance_batch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise mobius distance; entries outside the disc come back as nan"""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    inside = (np.abs(a) < 1.0) & (np.abs(b) < 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.abs(a - b) / np.abs(1.0 - np.conj(a) * b)
    return np.where(inside, d, np.nan)


def poincare_from_mobius(m: float) -> float:
    """Poincare distance arctanh(m) for a Mobius-scale value m in [0, 1)"""
    if not 0.0 <= m < 1.0:
        raise DomainViolation(f"Mobius value must lie in [0, 1), got {m}")
    return float(np.arctanh(m))
