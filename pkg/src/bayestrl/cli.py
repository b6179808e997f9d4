"""Command-line entry point.

    bayestrl run --method all --mazes 100 --size 10x10 --out curves.csv
    bayestrl maze generate --size 10x10 --seed 3 --out maze.txt
    bayestrl maze inspect maze.txt
"""

from __future__ import annotations

import argparse
import logging
import sys
import time

from .experiment import METHODS, ExperimentConfig, aggregate_curves, emit_csv, run_method
from .learner import Schedule
from .maze import (GOAL_REWARD, STEP_REWARD, MazeFormatError, bfs_distances, generate_maze,
                   maze_to_mdp, parse_maze, serialize_maze)
from .prior import load_undo_matrix, save_undo_matrix

log = logging.getLogger("bayestrl")


def parse_size(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like WxH, got {text!r}") from None
    return w, h


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bayestrl", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the maze transfer experiment and write learning curves")
    run.add_argument("--method", default="all", choices=(*METHODS, "all"))
    run.add_argument("--mazes", type=int, default=100)
    run.add_argument("--size", type=parse_size, default=(10, 10), metavar="WxH")
    run.add_argument("--beta", type=float, default=1000.0)
    run.add_argument("--episodes", type=int, default=50)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--step-reward", type=float, default=STEP_REWARD)
    run.add_argument("--goal-reward", type=float, default=GOAL_REWARD)
    run.add_argument("--out", required=True, help="CSV output path")
    run.add_argument("--max-steps", type=int, default=10_000, help="step cap per episode")
    run.add_argument("--rho0", type=float, default=1.0)
    run.add_argument("--tau", type=float, default=100.0)
    run.add_argument("--jobs", type=int, default=1, help="worker processes for independent mazes")
    run.add_argument("--undo-in", help="initial undoing-pair matrix for 1-2-prior")
    run.add_argument("--undo-out", help="write the final undoing-pair matrix of 1-2-prior")
    run.add_argument("--no-refresh-blocked", action="store_true",
                     help="do not update blocked pairs from their known self-loop outcome")

    maze = sub.add_parser("maze", help="write or inspect maze text files")
    maze_sub = maze.add_subparsers(dest="maze_command", required=True)
    gen = maze_sub.add_parser("generate")
    gen.add_argument("--size", type=parse_size, default=(10, 10), metavar="WxH")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", help="file to write (stdout if omitted)")
    ins = maze_sub.add_parser("inspect")
    ins.add_argument("path")
    return parser


def cmd_run(args: argparse.Namespace) -> int:
    width, height = args.size
    methods = METHODS if args.method == "all" else (args.method,)
    configs = [ExperimentConfig(
        method=m, num_mazes=args.mazes, width=width, height=height, beta=args.beta,
        episodes_per_maze=args.episodes, master_seed=args.seed,
        step_reward=args.step_reward, goal_reward=args.goal_reward, output_path=args.out,
        schedule=Schedule(args.rho0, args.tau), max_steps_per_episode=args.max_steps,
        refresh_blocked=not args.no_refresh_blocked) for m in methods]
    undo = load_undo_matrix(args.undo_in) if args.undo_in else None

    records = []
    for config in configs:
        t0 = time.perf_counter()
        lengths, mem = run_method(config, jobs=args.jobs,
                                  undo_allowed=undo if config.method == "1-2-prior" else None)
        log.info("%s: %d mazes in %.1fs, mean length %.1f", config.method,
                 config.num_mazes, time.perf_counter() - t0, lengths.mean())
        records.extend(aggregate_curves(lengths, config.method))
        if mem is not None and args.undo_out:
            save_undo_matrix(mem.undo_allowed, args.undo_out)
    emit_csv(records, args.out)
    return 0


def cmd_maze(args: argparse.Namespace) -> int:
    if args.maze_command == "generate":
        text = serialize_maze(generate_maze(*args.size, seed=args.seed)) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    with open(args.path) as fh:
        maze = parse_maze(fh.read())
    mdp = maze_to_mdp(maze)
    dist = bfs_distances(maze, maze.start)
    print(f"size: {maze.width}x{maze.height}")
    print(f"free cells: {mdp.num_states}")
    print(f"start: {maze.start} goal: {maze.goal}")
    print(f"shortest path: {dist[maze.goal]} steps")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "run":
            return cmd_run(args)
        return cmd_maze(args)
    except (ValueError, MazeFormatError, OSError) as exc:
        print(f"bayestrl: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
