"""Maze transfer experiment: three behaviour-policy variants over a seeded maze corpus.

* ``no-prior``  -- behaviour policy proportional to B, no memory;
* ``1-prior``   -- B times the first-order (wall) rule, memory reset per maze;
* ``1-2-prior`` -- both rules; the undoing-pair matrix carries over between mazes.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .learner import LearnerConfig, Schedule, init_learner, run_episode
from .maze import GOAL_REWARD, STEP_REWARD, generate_maze, maze_to_mdp
from .prior import PriorMemory, transfer

METHODS = ("no-prior", "1-prior", "1-2-prior")
CSV_HEADER = ("method", "episode_index", "mean_length", "stderr_length", "num_mazes")


@dataclass(frozen=True)
class ExperimentConfig:
    method: str = "no-prior"
    num_mazes: int = 100
    width: int = 10
    height: int = 10
    beta: float = 1000.0
    episodes_per_maze: int = 50
    master_seed: int = 0
    step_reward: float = STEP_REWARD
    goal_reward: float = GOAL_REWARD
    output_path: str | None = None
    schedule: Schedule = field(default_factory=Schedule)
    max_steps_per_episode: int = 10_000
    refresh_blocked: bool = True

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        for name in ("num_mazes", "episodes_per_maze", "max_steps_per_episode"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.width < 2 or self.height < 2:
            raise ValueError("maze dimensions must be at least 2x2")
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if not (math.isfinite(self.step_reward) and math.isfinite(self.goal_reward)):
            raise ValueError("rewards must be finite")

    def learner_config(self) -> LearnerConfig:
        return LearnerConfig(beta=self.beta, schedule=self.schedule,
                             max_steps_per_episode=self.max_steps_per_episode)


@dataclass(frozen=True)
class CurveRecord:
    method: str
    episode_index: int
    mean_length: float
    stderr_length: float
    num_mazes: int


def maze_seed(master_seed: int, index: int) -> int:
    state = np.random.SeedSequence(master_seed, spawn_key=(index, 0)).generate_state(2, np.uint32)
    return int(state[0]) << 32 | int(state[1])


def run_rng(master_seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(index, 1)))


def make_memory(method: str, num_actions: int, undo_allowed: np.ndarray | None = None
                ) -> PriorMemory | None:
    if method == "no-prior":
        return None
    if method == "1-prior":
        return PriorMemory(num_actions, second_order=False)
    return PriorMemory(num_actions, second_order=True, undo_allowed=undo_allowed)


def run_maze(config: ExperimentConfig, index: int, undo_allowed: np.ndarray | None = None
             ) -> tuple[list[int], PriorMemory | None]:
    """Episode lengths on maze ``index``, plus the memory it ended with."""
    maze = generate_maze(config.width, config.height, maze_seed(config.master_seed, index))
    mdp = maze_to_mdp(maze, config.step_reward, config.goal_reward)
    learner = init_learner(mdp, config.learner_config())
    mem = make_memory(config.method, mdp.num_actions, undo_allowed)
    rng = run_rng(config.master_seed, index)
    lengths = [run_episode(mdp, learner, prior=mem, rng=rng,
                           refresh_blocked=config.refresh_blocked).length
               for _ in range(config.episodes_per_maze)]
    return lengths, mem


def _lengths_only(args: tuple[ExperimentConfig, int]) -> list[int]:
    return run_maze(*args)[0]


def run_method(config: ExperimentConfig, jobs: int = 1,
               undo_allowed: np.ndarray | None = None
               ) -> tuple[np.ndarray, PriorMemory | None]:
    """Episode-length matrix ``(num_mazes, episodes_per_maze)`` for one method.

    ``1-2-prior`` runs mazes in index order so the undoing-pair matrix can
    transfer; the other methods may spread mazes over ``jobs`` processes.
    Also returns the transferred memory after the last maze (1-2-prior only).
    """
    if config.method == "1-2-prior":
        rows, mem = [], None
        g = undo_allowed
        for i in range(config.num_mazes):
            lengths, mem = run_maze(config, i, g)
            rows.append(lengths)
            mem = transfer(mem)
            g = mem.undo_allowed
        return np.array(rows, dtype=np.int64), mem

    tasks = [(config, i) for i in range(config.num_mazes)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_lengths_only, tasks))
    else:
        rows = [_lengths_only(t) for t in tasks]
    return np.array(rows, dtype=np.int64), None


def aggregate_curves(matrices, method: str) -> list[CurveRecord]:
    rows = [list(r) for r in matrices]
    if not rows:
        raise ValueError("no mazes to aggregate")
    if len({len(r) for r in rows}) != 1:
        raise ValueError("all mazes must have the same number of episodes")
    data = np.asarray(rows, dtype=float)
    n = data.shape[0]
    mean = data.mean(axis=0)
    stderr = data.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.zeros(data.shape[1])
    return [CurveRecord(method, i, float(mean[i]), float(stderr[i]), n)
            for i in range(data.shape[1])]


def _method_key(method: str) -> tuple[int, str]:
    return (METHODS.index(method) if method in METHODS else len(METHODS), method)


def emit_csv(records: list[CurveRecord], path: str | Path) -> None:
    ordered = sorted(records, key=lambda r: (_method_key(r.method), r.episode_index))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in ordered:
            writer.writerow((r.method, r.episode_index, repr(r.mean_length),
                             repr(r.stderr_length), r.num_mazes))
