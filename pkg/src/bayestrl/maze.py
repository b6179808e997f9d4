"""Grid mazes: generation, text format, and compilation to a TabularMdp.

Walls are whole cells. The text format is one row per line using ``#`` for a
wall, ``.`` for a free cell, ``S`` for the start and ``G`` for the goal.
Coordinates are ``(row, col)`` with row 0 at the top.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .mdp import TabularMdp

Cell = tuple[int, int]

UP, DOWN, LEFT, RIGHT = 0, 1, 2, 3
ACTION_NAMES = ("up", "down", "left", "right")
MOVES = ((-1, 0), (1, 0), (0, -1), (0, 1))
OPPOSITE = {UP: DOWN, DOWN: UP, LEFT: RIGHT, RIGHT: LEFT}

STEP_REWARD = -0.001
GOAL_REWARD = 1.0


class MazeFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Maze:
    width: int
    height: int
    walls: frozenset[Cell]
    start: Cell
    goal: Cell

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise MazeFormatError("maze must have at least one cell")
        object.__setattr__(self, "walls", frozenset(self.walls))
        for name, cell in (("start", self.start), ("goal", self.goal)):
            if not self.in_bounds(cell):
                raise MazeFormatError(f"{name} {cell} outside the grid")
            if cell in self.walls:
                raise MazeFormatError(f"{name} {cell} is a wall")
        if self.start == self.goal:
            raise MazeFormatError("start and goal must differ")
        if any(not self.in_bounds(c) for c in self.walls):
            raise MazeFormatError("wall outside the grid")
        if self.goal not in bfs_distances(self, self.start):
            raise MazeFormatError("goal is unreachable from start")

    def in_bounds(self, cell: Cell) -> bool:
        r, c = cell
        return 0 <= r < self.height and 0 <= c < self.width

    def is_free(self, cell: Cell) -> bool:
        return self.in_bounds(cell) and cell not in self.walls

    def free_cells(self) -> list[Cell]:
        """Free cells in row-major order; this order defines MDP state ids."""
        return [(r, c) for r in range(self.height) for c in range(self.width)
                if (r, c) not in self.walls]

    def move(self, cell: Cell, action: int) -> Cell:
        dr, dc = MOVES[action]
        nxt = (cell[0] + dr, cell[1] + dc)
        return nxt if self.is_free(nxt) else cell


def bfs_distances(maze: Maze, source: Cell) -> dict[Cell, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        cell = queue.popleft()
        for a in range(4):
            nxt = maze.move(cell, a)
            if nxt not in dist:
                dist[nxt] = dist[cell] + 1
                queue.append(nxt)
    return dist


def _room_positions(n: int, rng: np.random.Generator) -> list[int]:
    # Rooms sit two cells apart. For even n one randomly chosen gap is
    # widened so that rooms land on both edges.
    if n == 2:
        return [0, 1]
    gaps = [2] * ((n - 1) // 2)
    if n % 2 == 0:
        gaps[rng.integers(len(gaps))] += 1
    return [0, *np.cumsum(gaps).tolist()]


def generate_maze(width: int, height: int, seed: int) -> Maze:
    """Random perfect maze via a depth-first backtracker over a room lattice.

    Start is the top-left cell and goal the bottom-right one. Free cells form
    a tree, so there is exactly one path between any two cells (the 2-cell
    dimension case is the only exception, where rooms touch directly).
    """
    if width < 2 or height < 2:
        raise ValueError("maze dimensions must be at least 2x2")
    rng = np.random.default_rng(seed)
    rows, cols = _room_positions(height, rng), _room_positions(width, rng)
    n_r, n_c = len(rows), len(cols)

    free: set[Cell] = {(r, c) for r in rows for c in cols}
    visited = np.zeros((n_r, n_c), dtype=bool)
    visited[0, 0] = True
    stack = [(0, 0)]
    while stack:
        i, j = stack[-1]
        options = [(i + di, j + dj) for di, dj in MOVES
                   if 0 <= i + di < n_r and 0 <= j + dj < n_c and not visited[i + di, j + dj]]
        if not options:
            stack.pop()
            continue
        ni, nj = options[rng.integers(len(options))]
        visited[ni, nj] = True
        r0, r1 = sorted((rows[i], rows[ni]))
        c0, c1 = sorted((cols[j], cols[nj]))
        free.update((r, c) for r in range(r0, r1 + 1) for c in range(c0, c1 + 1))
        stack.append((ni, nj))

    walls = frozenset((r, c) for r in range(height) for c in range(width)) - free
    return Maze(width, height, walls, (0, 0), (height - 1, width - 1))


def maze_to_mdp(maze: Maze, step_reward: float = STEP_REWARD,
                goal_reward: float = GOAL_REWARD) -> TabularMdp:
    """Compile a maze into a deterministic MDP with 4 actions.

    Bumping into a wall or the boundary leaves the state unchanged. Entering
    the goal pays ``step_reward + goal_reward``; the goal is the only
    terminal state (its row is a zero-reward self loop).
    """
    cells = maze.free_cells()
    index = {cell: i for i, cell in enumerate(cells)}
    n = len(cells)
    next_state = np.empty((n, 4), dtype=np.int64)
    reward = np.full((n, 4), float(step_reward))
    goal = index[maze.goal]
    for cell, s in index.items():
        for a in range(4):
            s2 = index[maze.move(cell, a)]
            next_state[s, a] = s2
            if s2 == goal and s != goal:
                reward[s, a] += goal_reward
    next_state[goal] = goal
    reward[goal] = 0.0
    return TabularMdp(reward=reward, terminals=frozenset({goal}),
                      next_state=next_state, start=index[maze.start])


def state_index(maze: Maze) -> dict[Cell, int]:
    return {cell: i for i, cell in enumerate(maze.free_cells())}


def serialize_maze(maze: Maze) -> str:
    lines = []
    for r in range(maze.height):
        row = []
        for c in range(maze.width):
            cell = (r, c)
            if cell == maze.start:
                row.append("S")
            elif cell == maze.goal:
                row.append("G")
            elif cell in maze.walls:
                row.append("#")
            else:
                row.append(".")
        lines.append("".join(row))
    return "\n".join(lines)


def parse_maze(text: str) -> Maze:
    lines = text.strip("\n").split("\n")
    if not lines or not lines[0]:
        raise MazeFormatError("empty maze")
    width = len(lines[0])
    walls, starts, goals = set(), [], []
    for r, line in enumerate(lines):
        if len(line) != width:
            raise MazeFormatError(f"ragged row {r}: expected {width} columns, got {len(line)}")
        for c, ch in enumerate(line):
            if ch == "#":
                walls.add((r, c))
            elif ch == "S":
                starts.append((r, c))
            elif ch == "G":
                goals.append((r, c))
            elif ch != ".":
                raise MazeFormatError(f"unknown symbol {ch!r} at ({r}, {c})")
    if len(starts) != 1:
        raise MazeFormatError(f"expected exactly one 'S', found {len(starts)}")
    if len(goals) != 1:
        raise MazeFormatError(f"expected exactly one 'G', found {len(goals)}")
    return Maze(width, len(lines), frozenset(walls), starts[0], goals[0])
