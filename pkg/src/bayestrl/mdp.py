"""Tabular episodic MDPs and trajectory execution.

Transitions are stored either as a deterministic ``(S, A)`` next-state table
or as a dense ``(S, A, S)`` probability table. Rewards are a deterministic
function of the state-action pair. The baseline policy ``pi0`` is kept as
log-probabilities so every consumer can stay in log domain.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

ROW_SUM_TOL = 1e-12


class TerminalStateError(ValueError):
    """Raised when an action is taken from a terminal state."""


class Step(NamedTuple):
    state: int
    action: int
    reward: float
    next_state: int


@dataclass
class EpisodeRecord:
    steps: list[Step] = field(default_factory=list)
    terminated: bool = False

    @property
    def length(self) -> int:
        return len(self.steps)

    def states(self) -> list[int]:
        if not self.steps:
            return []
        return [st.state for st in self.steps] + [self.steps[-1].next_state]


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TabularMdp:
    """Immutable discrete episodic MDP.

    Exactly one of ``next_state`` (deterministic, integer ``(S, A)``) or
    ``transition`` (stochastic, ``(S, A, S)``) is given at construction; the
    other is derived. ``log_pi0`` defaults to the uniform policy.
    """

    reward: np.ndarray
    terminals: frozenset[int]
    next_state: np.ndarray | None = None
    transition: np.ndarray | None = None
    log_pi0: np.ndarray | None = None
    start: int = 0

    def __post_init__(self) -> None:
        reward = np.asarray(self.reward, dtype=float)
        if reward.ndim != 2:
            raise ValueError("reward must be a (num_states, num_actions) table")
        n_s, n_a = reward.shape
        if n_s < 1 or n_a < 1:
            raise ValueError("MDP needs at least one state and one action")
        if not np.all(np.isfinite(reward)):
            raise ValueError("rewards must be finite")

        if (self.next_state is None) == (self.transition is None):
            raise ValueError("give exactly one of next_state or transition")
        if self.next_state is not None:
            nxt = np.asarray(self.next_state)
            if nxt.shape != (n_s, n_a) or not np.issubdtype(nxt.dtype, np.integer):
                raise ValueError("next_state must be an integer (S, A) table")
            if nxt.min() < 0 or nxt.max() >= n_s:
                raise ValueError("next_state entries out of range")
            trans = np.zeros((n_s, n_a, n_s))
            ii, jj = np.indices((n_s, n_a))
            trans[ii, jj, nxt] = 1.0
        else:
            trans = np.asarray(self.transition, dtype=float)
            if trans.shape != (n_s, n_a, n_s):
                raise ValueError("transition must be an (S, A, S) table")
            if np.any(trans < 0) or np.any(np.abs(trans.sum(axis=2) - 1.0) > ROW_SUM_TOL):
                raise ValueError(f"transition rows must be distributions (tol {ROW_SUM_TOL})")
            nxt = None
            if np.all((trans == 0.0) | (trans == 1.0)):
                nxt = trans.argmax(axis=2)

        if self.log_pi0 is None:
            log_pi0 = np.full((n_s, n_a), -np.log(n_a))
        else:
            log_pi0 = np.asarray(self.log_pi0, dtype=float)
            if log_pi0.shape != (n_s, n_a):
                raise ValueError("log_pi0 must be an (S, A) table")
            if not np.all(np.isfinite(log_pi0)):
                raise ValueError("pi0 must be strictly positive everywhere")
            if np.any(np.abs(np.exp(log_pi0).sum(axis=1) - 1.0) > ROW_SUM_TOL):
                raise ValueError("log_pi0 rows must be normalised")

        terminals = frozenset(int(s) for s in self.terminals)
        if any(s < 0 or s >= n_s for s in terminals):
            raise ValueError("terminal state out of range")
        if not 0 <= self.start < n_s:
            raise ValueError("start state out of range")

        set_ = object.__setattr__
        set_(self, "reward", _readonly(reward))
        set_(self, "transition", _readonly(trans))
        set_(self, "next_state", None if nxt is None else _readonly(nxt.astype(np.int64)))
        set_(self, "log_pi0", _readonly(log_pi0))
        set_(self, "terminals", terminals)
        mask = np.zeros(n_s, dtype=bool)
        mask[list(terminals)] = True
        set_(self, "terminal_mask", _readonly(mask))

    @property
    def num_states(self) -> int:
        return self.reward.shape[0]

    @property
    def num_actions(self) -> int:
        return self.reward.shape[1]

    @property
    def is_deterministic(self) -> bool:
        return self.next_state is not None


def is_terminal(mdp: TabularMdp, s: int) -> bool:
    if not 0 <= s < mdp.num_states:
        raise IndexError(f"state {s} out of range")
    return bool(mdp.terminal_mask[s])


def step(mdp: TabularMdp, s: int, a: int, rng: np.random.Generator) -> tuple[int, float]:
    """Sample ``(next_state, reward)`` for taking action ``a`` in state ``s``."""
    if mdp.terminal_mask[s]:
        raise TerminalStateError(f"cannot act from terminal state {s}")
    r = float(mdp.reward[s, a])
    if mdp.next_state is not None:
        return int(mdp.next_state[s, a]), r
    cdf = np.cumsum(mdp.transition[s, a])
    nxt = int(np.searchsorted(cdf, rng.random(), side="right"))
    if nxt >= mdp.num_states:
        nxt = int(np.flatnonzero(mdp.transition[s, a])[-1])
    return nxt, r
