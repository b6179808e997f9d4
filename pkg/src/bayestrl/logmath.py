"""Small log-domain helpers tuned for short rows (a handful of actions)."""

from __future__ import annotations

import math
from collections.abc import Iterable

import numpy as np


def logsumexp(values: Iterable[float]) -> float:
    vals = list(values)
    m = max(vals)
    if m == -math.inf:
        return -math.inf
    return m + math.log(sum(math.exp(v - m) for v in vals))


def logsumexp_rows(x: np.ndarray) -> np.ndarray:
    m = x.max(axis=-1, keepdims=True)
    return (m + np.log(np.exp(x - m).sum(axis=-1, keepdims=True)))[..., 0]


def log_mix(log_a: float, log_b: float, rho: float) -> float:
    """``log((1 - rho) * exp(log_a) + rho * exp(log_b))`` for rho in [0, 1]."""
    if rho >= 1.0:
        return log_b
    if rho <= 0.0:
        return log_a
    x = math.log1p(-rho) + log_a
    y = math.log(rho) + log_b
    if x < y:
        x, y = y, x
    return x + math.log1p(math.exp(y - x))
