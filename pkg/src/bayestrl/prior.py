"""Rule-based action prior built up from experience.

Two rules are realised online:

* first order: an action that left the state unchanged (with no positive
  reward) is never retried in that state;
* second order: an action that immediately undoes the previous one (returns
  to the state before it, again with no positive reward) is never taken
  right after that action. These undoing pairs live in the binary matrix
  ``undo_allowed[prev_action, action]``.

The prior is an indicator: ``prior_f`` is 1 for allowed actions, else 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass
class PriorMemory:
    num_actions: int
    second_order: bool = True
    universal_pairs: bool = True
    # blocked (state, action) -> reward observed on the self loop
    blocked: dict[tuple[int, int], float] = field(default_factory=dict)
    undo_allowed: np.ndarray | None = None
    # state-local undoing pairs (state, prev_action, action); only used when
    # universal_pairs is False
    local_pairs: set[tuple[int, int, int]] = field(default_factory=set)
    # (s_{t-1}, a_{t-1}, r_{t-1}, s_t) of the previous step
    window: tuple[int, int, float, int] | None = None

    def __post_init__(self) -> None:
        if self.undo_allowed is None:
            self.undo_allowed = np.ones((self.num_actions, self.num_actions), dtype=np.int8)
        else:
            g = np.asarray(self.undo_allowed, dtype=np.int8)
            if g.shape != (self.num_actions, self.num_actions) or not np.isin(g, (0, 1)).all():
                raise ValueError("undo_allowed must be a 0/1 matrix of shape (A, A)")
            self.undo_allowed = g.copy()

    def start_episode(self) -> None:
        self.window = None

    def mask(self, s: int, prev_action: int | None) -> np.ndarray:
        """Boolean vector over actions: True where ``prior_f`` is 1."""
        allowed = np.ones(self.num_actions, dtype=bool)
        for a in range(self.num_actions):
            if (s, a) in self.blocked:
                allowed[a] = False
        if self.second_order and prev_action is not None:
            if self.universal_pairs:
                allowed &= self.undo_allowed[prev_action].astype(bool)
            else:
                for a in range(self.num_actions):
                    if (s, prev_action, a) in self.local_pairs:
                        allowed[a] = False
        return allowed


def observe_transition(mem: PriorMemory, s: int, a: int, r: float, s_next: int) -> None:
    """Update the memory with one environment step; call once per step, in order."""
    if s_next == s and r <= 0:
        mem.blocked[(s, a)] = r
    if mem.second_order and mem.window is not None:
        s_prev, a_prev, r_prev, s_mid = mem.window
        if s_mid == s and s != s_prev and s_next == s_prev and r_prev <= 0 and r <= 0:
            if mem.universal_pairs:
                mem.undo_allowed[a_prev, a] = 0
            else:
                mem.local_pairs.add((s, a_prev, a))
    mem.window = (s, a, r, s_next)


def known_self_loops(mem: PriorMemory, s: int) -> list[tuple[int, float]]:
    """Blocked actions at ``s`` with their recorded reward; their outcome is known."""
    return [(a, mem.blocked[(s, a)]) for a in range(mem.num_actions) if (s, a) in mem.blocked]


def prior_f(mem: PriorMemory, s: int, a: int, prev_action: int | None = None) -> int:
    if (s, a) in mem.blocked:
        return 0
    if mem.second_order and prev_action is not None:
        if mem.universal_pairs:
            return int(mem.undo_allowed[prev_action, a])
        return 0 if (s, prev_action, a) in mem.local_pairs else 1
    return 1


def transfer(mem: PriorMemory) -> PriorMemory:
    """Memory for the next task: undoing pairs carry over, task-local state is dropped."""
    return PriorMemory(mem.num_actions, second_order=mem.second_order,
                       universal_pairs=mem.universal_pairs,
                       undo_allowed=mem.undo_allowed.copy())


def format_undo_matrix(g: np.ndarray) -> str:
    return "\n".join(" ".join(str(int(v)) for v in row) for row in g) + "\n"


def parse_undo_matrix(text: str) -> np.ndarray:
    rows = [line.split() for line in text.strip().splitlines() if line.strip()]
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ValueError("undo matrix must be square")
    if any(v not in ("0", "1") for r in rows for v in r):
        raise ValueError("undo matrix entries must be 0 or 1")
    return np.array([[int(v) for v in r] for r in rows], dtype=np.int8)


def save_undo_matrix(g: np.ndarray, path: str | Path) -> None:
    Path(path).write_text(format_undo_matrix(g))


def load_undo_matrix(path: str | Path) -> np.ndarray:
    return parse_undo_matrix(Path(path).read_text())
