"""Behaviour policies: B-proportional with an optional prior mask, and Boltzmann over Q."""

from __future__ import annotations

import numpy as np

from .oracle import BTable
from .prior import PriorMemory


def bayes_policy_from_B(b: BTable, mem: PriorMemory | None, s: int,
                        prev_action: int | None = None) -> np.ndarray:
    """``q(a | s) ∝ B(s, a) * f(a; memory)``.

    Without a memory this is the plain on-policy ``p(a | s) ∝ B(s, a)``. When
    the prior rules out every action the step falls back to uniform.
    """
    if b.terminal[s]:
        raise ValueError(f"no behaviour policy at terminal state {s}")
    row = b.log_b[s]
    w = np.exp(row - row.max())
    if mem is not None:
        allowed = mem.mask(s, prev_action)
        if not allowed.any():
            return np.full(row.shape[0], 1.0 / row.shape[0])
        w = np.where(allowed, w, 0.0)
        # masked actions may hold the row max
        if w.sum() == 0.0:
            sub = np.where(allowed, row, -np.inf)
            w = np.where(allowed, np.exp(sub - sub.max()), 0.0)
    return w / w.sum()


def softmax_q_policy(q_row: np.ndarray, beta: float) -> np.ndarray:
    if beta < 0:
        raise ValueError("beta must be non-negative")
    z = beta * np.asarray(q_row, dtype=float)
    w = np.exp(z - z.max())
    return w / w.sum()


def sample_action(dist: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF draw; zero-probability actions are never returned."""
    cdf = np.cumsum(dist)
    a = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    if a >= len(dist) or dist[a] == 0.0:
        a = int(np.flatnonzero(dist)[-1])
    return a
