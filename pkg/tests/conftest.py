import math

import numpy as np
import pytest

from bayestrl import TabularMdp, generate_maze, maze_to_mdp

ACCEPTANCE_RESULTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture
def report():
    def _report(name: str, ok: bool, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        ACCEPTANCE_RESULTS.append(line)
        print(line)
    return _report


def two_state(beta_reward: float = 1.0) -> TabularMdp:
    """s0 --a0 (r=1)--> goal; s0 --a1 (r=-0.001)--> s0."""
    return TabularMdp(reward=np.array([[beta_reward, -0.001], [0.0, 0.0]]),
                      terminals=frozenset({1}),
                      next_state=np.array([[1, 0], [1, 1]]))


def two_state_log_B(beta: float) -> tuple[float, float]:
    """Closed-form solution of the two linear equations for the 2-state MDP."""
    b0 = 0.5 * math.exp(beta)
    c = 0.5 * math.exp(-0.001 * beta)
    b1 = c * b0 / (1.0 - c)
    return math.log(b0), math.log(b1)


def random_dag_mdp(rng, n_states, n_actions):
    """Stochastic MDP whose transitions only move to higher-indexed states."""
    trans = np.zeros((n_states, n_actions, n_states))
    terminals = {n_states - 1} | {s for s in range(1, n_states - 1) if rng.random() < 0.3}
    for s in range(n_states):
        for a in range(n_actions):
            if s in terminals:
                trans[s, a, s] = 1.0
                continue
            support = rng.choice(np.arange(s + 1, n_states),
                                 size=rng.integers(1, n_states - s), replace=False)
            trans[s, a, support] = rng.dirichlet(np.ones(len(support)))
            trans[s, a] /= trans[s, a].sum()
    pi0 = rng.dirichlet(np.ones(n_actions), size=n_states)
    return TabularMdp(reward=rng.uniform(-1, 1, (n_states, n_actions)), terminals=terminals,
                      transition=trans, log_pi0=np.log(pi0))


@pytest.fixture
def two_state_mdp() -> TabularMdp:
    return two_state()


@pytest.fixture(scope="session")
def maze4():
    return generate_maze(4, 4, seed=0)


@pytest.fixture(scope="session")
def maze4_mdp(maze4):
    return maze_to_mdp(maze4)
