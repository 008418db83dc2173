"""
Command-line interface: ``tap gen | solve | train | eval | render``.

Exit codes::

    0  success
    2  usage error or bad argument value
    3  invalid instance or solution
    4  instance larger than the network capacity
    5  file could not be read or written
    6  infeasible packing, generation failure or training failure
"""

import argparse
import logging
import sys
from typing import Optional, Sequence

import torch

from .core.instance import ProblemInstance, Solution
from .datasets.generators import MODES, GenConfig, config_echo, generate_dataset
from .exceptions import (
    TapCapacityError,
    TapError,
    TapFeasibilityError,
    TapGenerationError,
    TapIOError,
    TapTrainingError,
    TapValidationError,
    TapValueError,
)
from .io.readers import (
    read_instance,
    read_instances,
    read_solution,
    to_csv,
    write_dataset,
    write_solution,
)
from .io.render import render_instance, render_solution
from .packing.placement import STRATEGIES
from .packing.state import replay_solution
from .policy.rollout import ROLLOUT_MODES
from .training.config import TrainConfig
from .training.evaluation import METHODS, evaluate, resolve_policy, solve_instance, summarize
from .training.trainer import train
from .utils.helpers import configure_logging, default_threads

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_CAPACITY = 4
EXIT_IO = 5
EXIT_FAILURE = 6


def exit_code(error: TapError) -> int:
    """Process exit status for a tapkit error."""
    if isinstance(error, TapValidationError):
        return EXIT_VALIDATION
    if isinstance(error, TapCapacityError):
        return EXIT_CAPACITY
    if isinstance(error, TapIOError):
        return EXIT_IO
    if isinstance(error, (TapFeasibilityError, TapGenerationError, TapTrainingError)):
        return EXIT_FAILURE
    if isinstance(error, TapValueError):
        return EXIT_USAGE
    return 1


# ============================================================================
# Commands
# ============================================================================


def cmd_generate(args: argparse.Namespace) -> int:
    cfg = GenConfig(
        seed=args.seed,
        n=args.n,
        count=args.count,
        mode=args.mode,
        dims_mode=args.dims,
        init_width=args.init_width,
        target_width=args.target_width,
        init_depth=args.init_depth,
        target_depth=args.target_depth,
        mean=args.mean,
        sd=args.sd,
        min_size=args.min_size,
        max_size=args.max_size,
        classical=args.classical,
        container_count=args.containers,
        max_retries=args.max_retries,
    )
    instances = generate_dataset(cfg, workers=args.threads)
    manifest = write_dataset(instances, args.out, config_echo(cfg))
    print(f"{manifest['count']} instances written to {args.out} ({manifest['checksum']})")
    return EXIT_OK


def _check_replay(inst: ProblemInstance, solution: Solution) -> None:
    violations = replay_solution(inst, solution)
    if violations:
        raise TapValidationError(violations, "solution replay")


def cmd_solve(args: argparse.Namespace) -> int:
    inst = read_instance(args.instance)
    policy = resolve_policy(args.model) if args.method == "net" else None
    solution = solve_instance(
        inst,
        method=args.method,
        policy=policy,
        strategy=args.placement,
        mode=args.mode,
        seed=args.seed,
        rolling=True,
    )
    _check_replay(inst, solution)
    if args.out:
        write_solution(solution, args.out)
    r = solution.reward
    print(f"C={r.C:.4f} P={r.P:.4f} S={r.S:.4f} R={r.R:.4f} order={list(solution.order)}")
    if args.render:
        render_solution(inst, solution, args.render)
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    cfg = TrainConfig.from_json(args.config) if args.config else TrainConfig()
    overrides = {
        key: value
        for key, value in (
            ("train_path", args.train),
            ("test_path", args.test),
            ("out_dir", args.out),
            ("epochs", args.epochs),
            ("seed", args.seed),
        )
        if value is not None
    }
    if overrides:
        cfg = TrainConfig.from_dict({**cfg.to_dict(), **overrides})
    if not cfg.train_path:
        raise TapValueError("No training data: set train_path in the config or pass --train")
    dataset = read_instances(cfg.train_path)
    test = read_instances(cfg.test_path) if cfg.test_path else None
    result = train(cfg, dataset, test, out_dir=cfg.out_dir)
    print(
        f"best held-out R={result.best_reward:.4f} at epoch {result.best_epoch}; "
        f"outputs in {result.out_dir}"
    )
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    instances = read_instances(args.dataset)
    if args.method == "net" and not args.model:
        raise TapValueError("--method net needs --model")
    df = evaluate(
        instances,
        method=args.method,
        model=args.model,
        strategy=args.placement,
        mode=args.mode,
        seed=args.seed,
        rolling=args.rolling,
        workers=args.threads,
    )
    if not args.timing:
        df = df.drop(columns=["t_ms"])
    summary = summarize(df, args.method, args.placement, timing=args.timing)
    if args.out:
        to_csv(df, args.out)
    if args.summary:
        to_csv(summary, args.summary)
    print(summary.to_string(index=False))
    return EXIT_OK


def cmd_render(args: argparse.Namespace) -> int:
    inst = read_instance(args.instance)
    if args.solution:
        solution = read_solution(args.solution)
        _check_replay(inst, solution)
        frames = render_solution(inst, solution, args.out)
        print(f"{len(frames)} frames written to {args.out}")
    else:
        render_instance(inst, args.out)
        print(f"pile written to {args.out}")
    return EXIT_OK


# ============================================================================
# Parser
# ============================================================================


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging")
    parser.add_argument("-q", "--quiet", action="count", default=0, help="less logging")
    parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker processes and torch threads (default: $TAP_NUM_THREADS or 1)",
    )


def _solver_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--method", choices=METHODS, default="greedy")
    parser.add_argument("--model", help="checkpoint for --method net")
    parser.add_argument("--placement", choices=STRATEGIES, default="lb")
    parser.add_argument("--mode", choices=ROLLOUT_MODES, default="argmax")
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tap", description="Transport-and-pack: generate, solve, train, evaluate, render."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a dataset")
    _common(gen)
    gen.add_argument("--mode", choices=MODES, default="rand")
    gen.add_argument("--n", type=int, default=10, help="boxes per instance")
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--dims", type=int, choices=(2, 3), default=2)
    gen.add_argument("--init-width", type=int, default=7)
    gen.add_argument("--target-width", type=int, default=5)
    gen.add_argument("--init-depth", type=int, default=7)
    gen.add_argument("--target-depth", type=int, default=5)
    gen.add_argument("--mean", type=float, default=3.0)
    gen.add_argument("--sd", type=float, default=1.5)
    gen.add_argument("--min-size", type=int, default=1)
    gen.add_argument("--max-size", type=int, default=5)
    gen.add_argument("--containers", type=int, default=1)
    gen.add_argument("--classical", action="store_true", help="no precedence constraints")
    gen.add_argument("--max-retries", type=int, default=100)
    gen.add_argument("--out", required=True, help="dataset directory")
    gen.set_defaults(func=cmd_generate)

    solve = sub.add_parser("solve", help="solve one instance")
    _common(solve)
    _solver_options(solve)
    solve.add_argument("--instance", required=True)
    solve.add_argument("--out", help="solution JSON")
    solve.add_argument("--render", metavar="DIR", help="also write SVG frames")
    solve.set_defaults(func=cmd_solve)

    trn = sub.add_parser("train", help="train a policy")
    _common(trn)
    trn.add_argument("--config", help="TrainConfig JSON")
    trn.add_argument("--train", help="training dataset (overrides the config)")
    trn.add_argument("--test", help="held-out dataset (overrides the config)")
    trn.add_argument("--out", help="output directory (overrides the config)")
    trn.add_argument("--epochs", type=int)
    trn.add_argument("--seed", type=int)
    trn.set_defaults(func=cmd_train)

    ev = sub.add_parser("eval", help="evaluate a method on a dataset")
    _common(ev)
    _solver_options(ev)
    ev.add_argument("--dataset", required=True)
    ev.add_argument("--rolling", action="store_true", help="allow instances above capacity")
    ev.add_argument("--timing", action="store_true", help="include t_ms (not reproducible)")
    ev.add_argument("--out", help="per-instance metrics CSV")
    ev.add_argument("--summary", help="summary CSV")
    ev.set_defaults(func=cmd_eval)

    ren = sub.add_parser("render", help="render a pile or a packing sequence as SVG")
    _common(ren)
    ren.add_argument("--instance", required=True)
    ren.add_argument("--solution", help="solution JSON; frames go to --out as a directory")
    ren.add_argument("--out", required=True)
    ren.set_defaults(func=cmd_render)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of the ``tap`` console script."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose - args.quiet)
    try:
        if args.threads is None:
            args.threads = default_threads()
        if args.threads < 1:
            raise TapValueError(f"--threads must be >= 1, got {args.threads}")
        torch.set_num_threads(args.threads)
        logger.debug("tap %s with %d threads", args.command, args.threads)
        return args.func(args)
    except TapError as e:
        print(f"tap {args.command}: {e}", file=sys.stderr)
        return exit_code(e)


if __name__ == "__main__":
    sys.exit(main())
