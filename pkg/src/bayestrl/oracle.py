"""Exact B/A functions for known dynamics, plus the independent oracles.

``B(s, a) = exp(beta * r(s, a)) * pi0(a | s) * sum_s' p(s' | s, a) * A(s')`` with
``A(s) = sum_a B(s, a)`` and ``A = 1`` on terminal states. Everything is held
as ``log B``; with beta = 1000 and unit rewards the linear values overflow.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .logmath import logsumexp, logsumexp_rows
from .mdp import TabularMdp


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class IncompleteSumError(RuntimeError):
    """Trajectory enumeration hit the horizon with non-negligible mass left."""


@dataclass
class BTable:
    """Log-domain state-action table ``log_b[s, a] = log B(s, a)``."""

    log_b: np.ndarray
    beta: float
    terminal: np.ndarray

    def log_A(self) -> np.ndarray:
        return logsumexp_rows(self.log_b)

    @property
    def num_actions(self) -> int:
        return self.log_b.shape[1]


@dataclass
class QTable:
    q: np.ndarray


def pinned_table(mdp: TabularMdp, beta: float, init_log_b: float | None = None) -> BTable:
    """Fresh table: terminal rows at log(1/|A|), the rest at ``init_log_b``."""
    uniform = -math.log(mdp.num_actions)
    fill = uniform if init_log_b is None else float(init_log_b)
    log_b = np.full((mdp.num_states, mdp.num_actions), fill)
    log_b[mdp.terminal_mask] = uniform
    return BTable(log_b, float(beta), mdp.terminal_mask.copy())


def _backward_order(mdp: TabularMdp) -> list[int]:
    """Non-terminal states sorted by step distance to the terminal set.

    Raises if some state cannot reach a terminal state.
    """
    preds: list[set[int]] = [set() for _ in range(mdp.num_states)]
    src, _, dst = np.nonzero(mdp.transition > 0)
    for s, s2 in zip(src.tolist(), dst.tolist()):
        preds[s2].add(s)
    dist = {s: 0 for s in mdp.terminals}
    queue = deque(mdp.terminals)
    while queue:
        s2 = queue.popleft()
        for s in preds[s2]:
            if s not in dist:
                dist[s] = dist[s2] + 1
                queue.append(s)
    missing = [s for s in range(mdp.num_states) if s not in dist]
    if missing:
        raise ValueError(f"states {missing[:10]} cannot reach a terminal state")
    return sorted((s for s in dist if s not in mdp.terminals), key=lambda s: (dist[s], s))


def solve_exact_B(mdp: TabularMdp, beta: float, tol: float = 1e-10,
                  max_iters: int | None = None) -> BTable:
    """Fixed point of the B recursion by repeated log-domain sweeps.

    States are swept closest-to-terminal first and each sweep reuses values
    written earlier in the same sweep. Iterates until the largest change in
    ``log_b`` drops below ``tol``.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    if not mdp.terminals:
        raise ValueError("MDP has no terminal states")
    if max_iters is None:
        max_iters = max(10 * mdp.num_states * mdp.num_actions, 10_000)
    table = pinned_table(mdp, beta)
    order = _backward_order(mdp)
    if not order:
        return table

    log_b = table.log_b
    log_A = logsumexp_rows(log_b)
    base = beta * mdp.reward + mdp.log_pi0
    with np.errstate(divide="ignore"):
        log_p = np.log(mdp.transition)
    nxt = mdp.next_state

    residual = math.inf
    for _ in range(max_iters):
        residual = 0.0
        for s in order:
            if nxt is not None:
                row = base[s] + log_A[nxt[s]]
            else:
                row = base[s] + logsumexp_rows(log_p[s] + log_A[None, :])
            residual = max(residual, float(np.max(np.abs(row - log_b[s]))))
            log_b[s] = row
            log_A[s] = logsumexp(row.tolist())
        if residual < tol:
            return table
    raise ConvergenceError(f"B sweeps did not converge in {max_iters} iterations", residual)


def brute_force_log_B(mdp: TabularMdp, beta: float, s0: int, a0: int, horizon: int,
                      residual_tol: float = 0.0) -> float:
    """``log B(s0, a0)`` by explicit enumeration of every trajectory.

    Each trajectory contributes ``exp(beta * sum r) * prod pi0 * prod p`` and
    stops at its first terminal state. Prefixes still running after
    ``horizon`` actions are dropped; if their total weight relative to the
    sum exceeds ``residual_tol`` an :class:`IncompleteSumError` is raised.
    """
    if mdp.terminal_mask[s0]:
        raise ValueError("s0 must be non-terminal")
    done: list[float] = []
    cut: list[float] = []
    # (state, action about to be taken, accumulated log weight, actions taken so far)
    stack = [(s0, a0, 0.0, 0)]
    while stack:
        s, a, logw, depth = stack.pop()
        logw += beta * mdp.reward[s, a] + mdp.log_pi0[s, a]
        depth += 1
        for s2 in np.flatnonzero(mdp.transition[s, a]).tolist():
            w = logw + math.log(mdp.transition[s, a, s2])
            if mdp.terminal_mask[s2]:
                done.append(w)
            elif depth >= horizon:
                cut.append(w)
            else:
                stack.extend((s2, a2, w, depth) for a2 in range(mdp.num_actions))
    total = logsumexp(done) if done else -math.inf
    if cut:
        rel = math.exp(logsumexp(cut) - total) if done else math.inf
        if rel > residual_tol:
            raise IncompleteSumError(
                f"{len(cut)} trajectories unfinished after {horizon} steps "
                f"(relative residual {rel:.3e})")
    return total


def brute_force_B(mdp: TabularMdp, beta: float, s0: int, a0: int, horizon: int,
                  residual_tol: float = 0.0) -> float:
    return math.exp(brute_force_log_B(mdp, beta, s0, a0, horizon, residual_tol))


def optimal_policy_from_B(b: BTable, s: int) -> np.ndarray:
    row = b.log_b[s]
    p = np.exp(row - logsumexp(row.tolist()))
    return p / p.sum()


def value_iteration_Q(mdp: TabularMdp, tol: float = 1e-12,
                      max_iters: int | None = None) -> QTable:
    """Undiscounted Q-value iteration on a deterministic episodic MDP."""
    if not mdp.is_deterministic:
        raise ValueError("value_iteration_Q needs deterministic transitions")
    if max_iters is None:
        max_iters = 10 * mdp.num_states * mdp.num_actions
    nxt = mdp.next_state
    live = ~mdp.terminal_mask
    q = np.zeros((mdp.num_states, mdp.num_actions))
    change = math.inf
    for _ in range(max_iters):
        v = q.max(axis=1)
        v[mdp.terminal_mask] = 0.0
        new = np.where(live[:, None], mdp.reward + v[nxt], 0.0)
        change = float(np.max(np.abs(new - q)))
        q = new
        if change < tol:
            return QTable(q)
    raise ConvergenceError(f"value iteration did not converge in {max_iters} iterations", change)


def prop2_deviation(b: BTable, q: QTable) -> float:
    """Max over non-terminal pairs of ``|log B / beta - Q*|``."""
    live = ~b.terminal
    if not live.any():
        return 0.0
    return float(np.max(np.abs(b.log_b[live] / b.beta - q.q[live])))
