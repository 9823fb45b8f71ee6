import logging
import os
import tempfile
from typing import Dict, List, NamedTuple, Optional, Sequence

import anyio
import anyio.to_process
import numpy as np

from .._agent.agent import Trainer, evaluate_policy
from .._env.registry import make_env
from .._errors import AbqError, ConfigError, TrainingAborted
from .checkpoint import CheckpointMeta, save_checkpoint
from .config import ExperimentConfig, dump_config
from .curves import moving_average
from .records import write_json, write_records, write_summary as write_eval

logger = logging.getLogger(__name__)

TRAIN_FILE = 'train.csv'
EVAL_FILE = 'eval.json'
CHECKPOINT_FILE = 'checkpoint.abq'
CONFIG_FILE = 'config.txt'
SUMMARY_FILE = 'summary.json'


class SeedResult(NamedTuple):
    seed: int
    seed_dir: str
    returns: List[float]
    greedy_mean: float
    wall_clock: float


def seed_config(config: ExperimentConfig, seed: int) -> ExperimentConfig:
    """The single-seed config a seed directory snapshots; rerunning it reproduces the seed."""
    return config._replace(
        seeds=(int(seed),),
        label=config.run_label,
        agent=config.agent.replace(seed=int(seed)),
    )


def check_writable(path: str) -> None:
    os.makedirs(path, exist_ok=True)
    with tempfile.TemporaryFile(dir=path):
        pass


def run_seed(config: ExperimentConfig, seed: int) -> SeedResult:
    config = seed_config(config, seed)
    seed_dir = config.seed_dir(seed)
    os.makedirs(seed_dir, exist_ok=True)
    with open(os.path.join(seed_dir, CONFIG_FILE), mode='w', encoding='utf8') as f:
        f.write(dump_config(config))

    env = make_env(config.env_name, **config.env_kwargs())
    train_seq, eval_seq = np.random.SeedSequence(int(seed)).spawn(2)
    train_rng = np.random.default_rng(train_seq)
    eval_rng = np.random.default_rng(eval_seq)

    logger.info('[%s] seed %d: training in %s', config.run_label, seed, seed_dir)
    trainer = Trainer(config.agent, env, train_rng)
    try:
        result = trainer.run()
    except TrainingAborted as e:
        write_records(os.path.join(seed_dir, TRAIN_FILE), e.records)
        raise
    write_records(os.path.join(seed_dir, TRAIN_FILE), result.records)

    meta = CheckpointMeta(
        env_name=config.env_name,
        env_params=config.env_params,
        baseline_mode=config.agent.baseline_mode,
        seed=seed,
        episode=len(result.records),
    )
    save_checkpoint(result.net, meta, os.path.join(seed_dir, CHECKPOINT_FILE))

    summary = evaluate_policy(
        result.net, env, config.eval_episodes, eval_rng, config.agent.baseline_mode
    )
    write_eval(os.path.join(seed_dir, EVAL_FILE), summary)
    logger.info(
        '[%s] seed %d: greedy mean %.3f over %d episodes',
        config.run_label,
        seed,
        summary.mean,
        summary.episodes,
    )

    return SeedResult(
        seed=int(seed),
        seed_dir=seed_dir,
        returns=[r.cumulative_reward for r in result.records],
        greedy_mean=summary.mean,
        wall_clock=result.wall_clock,
    )


def write_summary(config: ExperimentConfig, results: Sequence[SeedResult]) -> str:
    """Per-seed greedy means, the median final smoothed return and the median smoothed curve."""
    results = sorted(results, key=lambda r: r.seed)
    curves = [moving_average(r.returns, config.window) for r in results]
    summary = {
        'label': config.run_label,
        'env_name': config.env_name,
        'baseline_mode': config.agent.baseline_mode.value,
        'window': config.window,
        'seeds': [r.seed for r in results],
        'greedy_means': {str(r.seed): r.greedy_mean for r in results},
        'final_smoothed': {
            str(r.seed): (float(c[-1]) if c.size else None) for r, c in zip(results, curves)
        },
        'median_final_smoothed': None,
        'median_curve': [],
    }
    if curves and all(c.size for c in curves):
        length = min(c.size for c in curves)
        stacked = np.stack([c[:length] for c in curves])
        summary['median_final_smoothed'] = float(np.median(stacked[:, -1]))
        summary['median_curve'] = [float(v) for v in np.median(stacked, axis=0)]

    path = os.path.join(config.run_dir, SUMMARY_FILE)
    write_json(path, summary)
    return path


class ExperimentRunner:
    def __init__(self, config: ExperimentConfig):
        self.config = config.validate()
        self.logger = logging.getLogger(__name__)
        self.results: Dict[int, SeedResult] = {}
        self.failed: Dict[int, str] = {}

    def prepare(self) -> None:
        check_writable(self.config.run_dir)
        make_env(self.config.env_name, **self.config.env_kwargs())

    def run(self) -> str:
        self.prepare()
        for seed in self.config.seeds:
            self.results[seed] = run_seed(self.config, seed)
        return self.finish()

    async def run_concurrently(self, workers: int) -> str:
        if int(workers) < 1:
            raise ConfigError(f'workers must be positive, got {workers}')
        self.prepare()
        limiter = anyio.CapacityLimiter(int(workers))

        async with anyio.create_task_group() as tg:
            for seed in self.config.seeds:
                tg.start_soon(self._run_job, seed, limiter)

        return self.finish()

    async def _run_job(self, seed: int, limiter: anyio.CapacityLimiter):
        try:
            result = await anyio.to_process.run_sync(
                run_seed, self.config, seed, limiter=limiter
            )
        except anyio.get_cancelled_exc_class():  # noqa
            raise
        except Exception as e:
            self.failed[seed] = str(e)
            self.logger.error('[%s] seed %d failed: %s', self.config.run_label, seed, e)
            self.logger.debug(e, exc_info=True)
        else:
            self.results[seed] = result

    def finish(self) -> str:
        if not self.results:
            raise AbqError(f'Every seed of {self.config.run_label} failed')
        write_summary(self.config, list(self.results.values()))
        self.logger.info(
            '[%s] finished %d seed(s) in %s',
            self.config.run_label,
            len(self.results),
            self.config.run_dir,
        )
        return self.config.run_dir


def run_experiment(config: ExperimentConfig) -> str:
    """Run every seed in turn; returns the run directory."""
    return ExperimentRunner(config).run()


async def run_sweep(
    config: ExperimentConfig,
    seeds: Optional[Sequence[int]] = None,
    workers: int = 2,
) -> ExperimentRunner:
    """Run seeds in worker processes, at most ``workers`` at a time."""
    if seeds is not None:
        config = config._replace(seeds=tuple(int(s) for s in seeds))
    runner = ExperimentRunner(config)
    await runner.run_concurrently(workers)
    return runner
