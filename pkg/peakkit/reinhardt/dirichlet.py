"""
Simultaneous Diophantine approximation by brute force over denominators
"""

from typing import Tuple

import numpy as np

from peakkit.shared.errors import InputError, NumericError

_CHUNK = 1 << 16
_SLACK = 1e-12


def dirichlet(l, mu: int) -> Tuple[np.ndarray, int]:
    """
    Smallest k in 1..mu^n with |l_j - alpha_j / k| <= 1 / (mu k) for every j

    alpha_j = round(k l_j). Dirichlet's theorem guarantees a hit within the range.

    Args:
        l: real vector
        mu: approximation quality, mu >= 1

    Returns:
        (alpha, k) with alpha an integer vector
    """
    l = np.atleast_1d(np.asarray(l, dtype=float))
    if mu < 1:
        raise InputError(f"dirichlet needs mu >= 1, got {mu}")
    limit = int(mu) ** l.size
    for start in range(1, limit + 1, _CHUNK):
        k = np.arange(start, min(limit, start + _CHUNK - 1) + 1, dtype=float)
        alpha = np.rint(k[:, None] * l[None, :])
        err = np.abs(k[:, None] * l[None, :] - alpha)
        hit = np.flatnonzero(np.all(err <= 1.0 / mu + _SLACK * k[:, None], axis=1))
        if hit.size:
            i = int(hit[0])
            return alpha[i].astype(np.int64), int(k[i])
    raise NumericError(f"no denominator up to {limit} satisfies the Dirichlet bound")
