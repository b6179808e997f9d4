"""Bayesian behaviour policies with rule-based priors for tabular episodic RL."""

from .learner import LearnerConfig, LearnerState, Schedule, init_learner, run_episode, td_update
from .maze import Maze, generate_maze, maze_to_mdp, parse_maze, serialize_maze
from .mdp import EpisodeRecord, TabularMdp, is_terminal, step
from .oracle import (BTable, QTable, brute_force_B, brute_force_log_B, optimal_policy_from_B,
                     prop2_deviation, solve_exact_B, value_iteration_Q)
from .policy import bayes_policy_from_B, sample_action, softmax_q_policy
from .prior import PriorMemory, observe_transition, prior_f, transfer

__version__ = "0.1.0"
