import argparse
import functools
import json
import logging
import os
import sys
from typing import List, Optional

import anyio
import numpy as np

from ._agent.agent import evaluate_policy, random_policy_returns
from ._env.registry import ENVIRONMENTS, make_env
from ._errors import AbqError
from ._harness.checkpoint import load_checkpoint
from ._harness.compare import compare_runs, format_table
from ._harness.config import ExperimentConfig, apply_overrides, load_config
from ._harness.curves import plot_runs
from ._harness.runner import run_experiment, run_sweep

logger = logging.getLogger('abq')


def _seeds(text: str) -> List[int]:
    try:
        return [int(s) for s in text.replace(',', ' ').split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f'invalid seed list: {text!r}')


def _experiment(args) -> ExperimentConfig:
    if args.config:
        config = load_config(args.config)
    elif args.env:
        config = ExperimentConfig(env_name=args.env)
    else:
        raise AbqError('train needs --config or --env')

    overrides = {
        'env.name': args.env,
        'agent.episodes': args.episodes,
        'agent.baseline_mode': args.mode,
        'experiment.output_dir': args.output_dir,
        'experiment.label': args.label,
    }
    if getattr(args, 'seed', None) is not None:
        overrides['experiment.seeds'] = (args.seed,)
    if getattr(args, 'seeds', None):
        overrides['experiment.seeds'] = tuple(args.seeds)
    return apply_overrides(config, overrides)


def cmd_train(args) -> int:
    run_dir = run_experiment(_experiment(args))
    print(run_dir)
    return 0


def cmd_sweep(args) -> int:
    config = _experiment(args)
    runner = anyio.run(functools.partial(run_sweep, config, workers=args.workers))
    print(runner.config.run_dir)
    for seed, reason in sorted(runner.failed.items()):
        print(f'seed {seed} failed: {reason}', file=sys.stderr)
    return 1 if runner.failed else 0


def cmd_eval(args) -> int:
    net, meta = load_checkpoint(args.checkpoint)
    env = make_env(meta.env_name, **dict(meta.env_params))
    rng = np.random.default_rng(args.seed)
    summary = evaluate_policy(net, env, args.episodes, rng, meta.baseline_mode)
    report = {'greedy': summary.to_dict()}
    if args.random:
        report['random'] = random_policy_returns(env, args.episodes, rng).to_dict()
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def cmd_plot(args) -> int:
    for path in plot_runs(args.runs, args.window, args.out):
        print(path)
    return 0


def cmd_compare(args) -> int:
    out_path = args.out
    if out_path is None and args.runs:
        out_path = os.path.join(os.path.dirname(os.path.abspath(args.runs[0])), 'compare.json')
    print(format_table(compare_runs(args.runs, out_path=out_path)))
    return 0


def _add_run_options(parser: argparse.ArgumentParser):
    parser.add_argument('--config', help='experiment file (key = value)')
    parser.add_argument('--env', choices=sorted(ENVIRONMENTS), help='environment name')
    parser.add_argument('--episodes', type=int, help='training episodes')
    parser.add_argument('--mode', help='baseline mode: abq, bdq, none, gmax, gmean')
    parser.add_argument('--output-dir', dest='output_dir')
    parser.add_argument('--label')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='abq', description='Branching dueling Q-learning runs')
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument('-v', '--verbose', action='store_true', help='debug logging')
    verbosity.add_argument('-q', '--quiet', action='store_true', help='warnings only')
    commands = parser.add_subparsers(dest='command', required=True)

    train = commands.add_parser('train', help='train and evaluate every seed in turn')
    _add_run_options(train)
    train.add_argument('--seed', type=int)
    train.set_defaults(handler=cmd_train)

    sweep = commands.add_parser('sweep', help='run seeds in parallel worker processes')
    _add_run_options(sweep)
    sweep.add_argument('--seeds', type=_seeds)
    sweep.add_argument('--workers', type=int, default=os.cpu_count() or 1)
    sweep.set_defaults(handler=cmd_sweep)

    evaluate = commands.add_parser('eval', help='greedy rollouts of a checkpoint')
    evaluate.add_argument('--checkpoint', required=True)
    evaluate.add_argument('--episodes', type=int, default=100)
    evaluate.add_argument('--seed', type=int, default=0)
    evaluate.add_argument('--random', action='store_true', help='also report random play')
    evaluate.set_defaults(handler=cmd_eval)

    plot = commands.add_parser('plot', help='learning curves as SVG')
    plot.add_argument('--runs', nargs='+', required=True)
    plot.add_argument('--window', type=int, default=100)
    plot.add_argument('--out', default='.')
    plot.set_defaults(handler=cmd_plot)

    compare = commands.add_parser('compare', help='greedy test returns side by side')
    compare.add_argument('--runs', nargs='+', required=True)
    compare.add_argument('--out', help='compare.json path')
    compare.set_defaults(handler=cmd_compare)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)

    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(level=level, format='%(asctime)s %(levelname)s %(name)s: %(message)s')

    try:
        return args.handler(args)
    except AbqError as e:
        logger.error(e)
        logger.debug(e, exc_info=True)
        return 1
    except OSError as e:
        logger.error(e)
        return 1
