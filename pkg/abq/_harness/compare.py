import logging
import os
from collections import OrderedDict
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from .._errors import AbqError, ConfigError
from .._net.baseline import BaselineMode
from .config import load_config
from .curves import find_seed_dirs
from .records import read_summary, write_json

logger = logging.getLogger(__name__)


class CompareRow(NamedTuple):
    env_name: str
    label: str
    mode: BaselineMode
    seeds: int
    mean: float
    median: float
    best: bool = False
    second: bool = False


class CompareTable(NamedTuple):
    rows: List[CompareRow]
    improvements: Dict[str, float]
    absent: List[str]

    def to_dict(self):
        return {
            'rows': [dict(r._asdict(), mode=r.mode.value) for r in self.rows],
            'improvements': dict(self.improvements),
            'absent': list(self.absent),
        }


def improvement(abq: float, bdq: float) -> float:
    """Percentage gain of ``abq`` over ``bdq``, relative to ``|bdq|``."""
    if bdq == 0:
        raise ConfigError('Improvement over a zero return is undefined')
    return (abq - bdq) / abs(bdq) * 100.0


def rank_rows(rows: Sequence[CompareRow]) -> CompareTable:
    by_env: Dict[str, List[CompareRow]] = OrderedDict()
    for row in rows:
        by_env.setdefault(row.env_name, []).append(row._replace(best=False, second=False))

    ranked, improvements = [], {}
    for env_name, env_rows in by_env.items():
        order = sorted(range(len(env_rows)), key=lambda k: -env_rows[k].mean)
        env_rows[order[0]] = env_rows[order[0]]._replace(best=True)
        if len(order) > 1:
            env_rows[order[1]] = env_rows[order[1]]._replace(second=True)
        ranked.extend(env_rows)

        means = {}
        for row in env_rows:
            means.setdefault(row.mode, row.mean)
        abq = means.get(BaselineMode.ABQ_MAX_MEAN)
        bdq = means.get(BaselineMode.BDQ_BRANCH_MEAN)
        if abq is not None and bdq is not None and bdq != 0:
            improvements[env_name] = improvement(abq, bdq)

    return CompareTable(ranked, improvements, [])


def _collect(run_dir: str, absent: List[str]) -> Optional[CompareRow]:
    returns, means, config = [], [], None
    for seed_dir in find_seed_dirs(run_dir):
        eval_path = os.path.join(seed_dir, 'eval.json')
        if not os.path.isfile(eval_path):
            absent.append(eval_path)
            continue
        summary = read_summary(eval_path)
        config = load_config(os.path.join(seed_dir, 'config.txt'))
        returns.extend(summary.per_episode)
        means.append(summary.mean)

    if config is None:
        return None
    return CompareRow(
        env_name=config.env_name,
        label=config.run_label,
        mode=config.agent.baseline_mode,
        seeds=len(means),
        mean=float(np.mean(returns)),
        median=float(np.median(returns)),
    )


def compare_runs(run_dirs: Sequence[str], out_path: Optional[str] = None) -> CompareTable:
    """
    Mean and median greedy test returns per run, pooled over seeds.

    Runs without ``eval.json`` are listed in ``absent`` instead of failing the comparison.
    """
    rows, absent = [], []
    for run_dir in run_dirs:
        try:
            row = _collect(run_dir, absent)
        except (AbqError, OSError) as e:
            logger.warning('Skipping %s: %s', run_dir, e)
            absent.append(run_dir)
            continue
        if row is None:
            if not any(a.startswith(run_dir) for a in absent):
                absent.append(run_dir)
            continue
        rows.append(row)

    table = rank_rows(rows)._replace(absent=absent)
    if out_path is not None:
        write_json(out_path, table.to_dict())
    return table


def format_table(table: CompareTable) -> str:
    lines = [f'{"env":<12} {"label":<28} {"mode":<16} {"seeds":>5} {"mean":>12} {"median":>12}']
    for row in table.rows:
        mark = ' *' if row.best else (' +' if row.second else '')
        lines.append(
            f'{row.env_name:<12} {row.label:<28} {row.mode.value:<16} {row.seeds:>5} '
            f'{row.mean:>12.3f} {row.median:>12.3f}{mark}'
        )
    for env_name, value in table.improvements.items():
        lines.append(f'{env_name}: abq over bdq {value:+.2f}%')
    for path in table.absent:
        lines.append(f'absent: {path}')
    return '\n'.join(lines)
