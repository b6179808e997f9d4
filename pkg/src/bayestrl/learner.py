"""Stochastic-approximation learning of the B table from experience.

Each step mixes the current entry with a one-sample target::

    B(s, a) <- (1 - rho) * B(s, a) + rho * exp(beta * r) * pi0(a | s) * sum_a' B(s', a')

performed on ``log B`` with a log-sum-exp. Terminal rows stay at 1/|A| so
that A(terminal) = 1. A reasonable beta is on the order of 1/|r| for a
typical reward magnitude r.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from .logmath import log_mix, logsumexp
from .mdp import EpisodeRecord, Step, TabularMdp, TerminalStateError, step
from .oracle import BTable, pinned_table
from .policy import bayes_policy_from_B, sample_action
from .prior import PriorMemory, known_self_loops, observe_transition

Policy = Callable[[BTable, "PriorMemory | None", int, "int | None"], np.ndarray]


@dataclass(frozen=True)
class Schedule:
    """Per-pair learning rate ``rho0 * tau / (tau + n)`` after n visits."""

    rho0: float = 1.0
    tau: float = 100.0

    def __post_init__(self) -> None:
        if not 0.0 < self.rho0 <= 1.0:
            raise ValueError("rho0 must lie in (0, 1]")
        if self.tau <= 0:
            raise ValueError("tau must be positive")


def learning_rate(schedule: Schedule, n: int) -> float:
    if n < 0:
        raise ValueError("visit count must be non-negative")
    return schedule.rho0 * schedule.tau / (schedule.tau + n)


@dataclass(frozen=True)
class LearnerConfig:
    beta: float = 1000.0
    schedule: Schedule = field(default_factory=Schedule)
    max_steps_per_episode: int = 10_000
    init_log_b: float | None = None  # None means log(1/|A|)

    def __post_init__(self) -> None:
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.max_steps_per_episode < 1:
            raise ValueError("max_steps_per_episode must be at least 1")
        if self.init_log_b is not None and not math.isfinite(self.init_log_b):
            raise ValueError("init_log_b must be finite")


@dataclass
class LearnerState:
    b: BTable
    visit_counts: np.ndarray
    schedule: Schedule
    log_pi0: np.ndarray
    max_steps_per_episode: int


def init_learner(mdp: TabularMdp, config: LearnerConfig) -> LearnerState:
    return LearnerState(
        b=pinned_table(mdp, config.beta, config.init_log_b),
        visit_counts=np.zeros((mdp.num_states, mdp.num_actions), dtype=np.int64),
        schedule=config.schedule,
        log_pi0=np.asarray(mdp.log_pi0),
        max_steps_per_episode=config.max_steps_per_episode,
    )


def td_update(learner: LearnerState, s: int, a: int, r: float, s_next: int,
              rho: float | None = None) -> None:
    """Apply one log-domain mixing update to ``log_b[s, a]``.

    ``rho`` overrides the scheduled rate (the visit count still advances).
    """
    b = learner.b
    if b.terminal[s]:
        raise TerminalStateError(f"terminal row {s} is pinned")
    if rho is None:
        rho = learning_rate(learner.schedule, int(learner.visit_counts[s, a]))
    target = b.beta * r + float(learner.log_pi0[s, a]) + logsumexp(b.log_b[s_next].tolist())
    b.log_b[s, a] = log_mix(float(b.log_b[s, a]), target, rho)
    learner.visit_counts[s, a] += 1


def run_episode(mdp: TabularMdp, learner: LearnerState,
                policy: Policy = bayes_policy_from_B,
                prior: PriorMemory | None = None,
                rng: np.random.Generator | None = None,
                refresh_blocked: bool = True) -> EpisodeRecord:
    """Run one episode from ``mdp.start`` with online updates.

    Each step: draw from ``policy(b, prior, s, prev_action)``, act, let the
    prior observe the transition, then update the table. Stops at a terminal
    state or after ``max_steps_per_episode`` steps (``terminated=False``).

    Pairs the prior has blocked are never sampled again, so their entries
    would freeze at the value of their single visit and keep inflating
    A(s). With ``refresh_blocked`` they are updated alongside the state's
    sampled pair using the self-loop outcome stored in the memory.
    """
    if rng is None:
        rng = np.random.default_rng()
    s = mdp.start
    if mdp.terminal_mask[s]:
        raise TerminalStateError("episode cannot start in a terminal state")
    if prior is not None:
        prior.start_episode()
    record = EpisodeRecord()
    prev = None
    for _ in range(learner.max_steps_per_episode):
        a = sample_action(policy(learner.b, prior, s, prev), rng)
        s_next, r = step(mdp, s, a, rng)
        if prior is not None:
            observe_transition(prior, s, a, r, s_next)
        td_update(learner, s, a, r, s_next)
        if prior is not None and refresh_blocked:
            for a_blk, r_blk in known_self_loops(prior, s):
                if a_blk != a:
                    td_update(learner, s, a_blk, r_blk, s)
        record.steps.append(Step(s, a, r, s_next))
        prev, s = a, s_next
        if mdp.terminal_mask[s]:
            record.terminated = True
            break
    return record
