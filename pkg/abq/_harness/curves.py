import logging
import os
from collections import OrderedDict
from typing import Dict, List, Optional, Sequence

import matplotlib
import numpy as np
from matplotlib.backends.backend_svg import FigureCanvasSVG
from matplotlib.figure import Figure

from .._errors import ConfigError, ParseError
from .config import load_config
from .records import read_records

logger = logging.getLogger(__name__)

# tab20 stores each hue as a (dark, light) pair
PALETTE = 'tab20'
FAMILIES = 10

SVG_RC = {
    'svg.hashsalt': 'abq',
    'svg.fonttype': 'none',
}


def moving_average(series: Sequence[float], window: int) -> np.ndarray:
    """``out[k]`` is the mean of the last ``min(k + 1, window)`` values."""
    if int(window) < 1:
        raise ConfigError(f'window must be at least 1, got {window}')
    values = np.asarray(series, dtype=np.float64)
    if values.size == 0:
        return values
    window = int(window)
    sums = np.concatenate(([0.0], np.cumsum(values)))
    ends = np.arange(1, values.size + 1)
    starts = np.maximum(ends - window, 0)
    return (sums[ends] - sums[starts]) / (ends - starts)


def _family(index: int):
    cmap = matplotlib.colormaps[PALETTE]
    k = index % FAMILIES
    return cmap(2 * k), cmap(2 * k + 1)


def _label_of(path: str) -> str:
    seed_dir = os.path.dirname(os.path.abspath(path))
    return os.path.basename(os.path.dirname(seed_dir)) or os.path.basename(seed_dir)


def render_curves(
    csv_paths: Sequence[str],
    window: int,
    out_path: str,
    labels: Optional[Sequence[str]] = None,
    title: Optional[str] = None,
) -> str:
    """
    Raw per-episode returns in a light stroke, smoothed returns in a dark stroke,
    one color family per label. Identical inputs give a byte-identical SVG.
    """
    if not csv_paths:
        raise ConfigError('Nothing to plot')
    if labels is None:
        labels = [_label_of(p) for p in csv_paths]
    if len(labels) != len(csv_paths):
        raise ConfigError(f'Got {len(labels)} labels for {len(csv_paths)} files')

    families: Dict[str, int] = OrderedDict()
    for label in labels:
        families.setdefault(label, len(families))

    with matplotlib.rc_context(SVG_RC):
        fig = Figure(figsize=(8, 5))
        FigureCanvasSVG(fig)
        ax = fig.add_subplot(1, 1, 1)

        legend_done = set()
        for k, (path, label) in enumerate(zip(csv_paths, labels)):
            records = read_records(path)
            episodes = np.array([r.episode for r in records])
            returns = np.array([r.cumulative_reward for r in records])
            dark, light = _family(families[label])

            (raw,) = ax.plot(episodes, returns, color=light, linewidth=0.8)
            raw.set_gid(f'curve-raw-{k}')
            (smooth,) = ax.plot(
                episodes,
                moving_average(returns, window),
                color=dark,
                linewidth=1.6,
                label=None if label in legend_done else label,
            )
            smooth.set_gid(f'curve-smooth-{k}')
            legend_done.add(label)

        ax.set_xlabel('episode')
        ax.set_ylabel('cumulative reward')
        if title:
            ax.set_title(title)
        ax.legend(loc='lower right')
        ax.grid(True, alpha=0.3)

        fig.savefig(out_path, format='svg', metadata={'Date': None})

    logger.info('Wrote %s (%d curves)', out_path, len(csv_paths))
    return out_path


def find_seed_dirs(run_dir: str) -> List[str]:
    """A run directory is either one seed directory or a label directory holding ``seed-*``."""
    if os.path.isfile(os.path.join(run_dir, 'train.csv')):
        return [run_dir]
    if not os.path.isdir(run_dir):
        raise ConfigError(f'No such run directory: {run_dir}')
    return [
        os.path.join(run_dir, name)
        for name in sorted(os.listdir(run_dir))
        if name.startswith('seed-') and os.path.isfile(os.path.join(run_dir, name, 'train.csv'))
    ]


def env_of(seed_dir: str) -> str:
    path = os.path.join(seed_dir, 'config.txt')
    try:
        return load_config(path).env_name
    except FileNotFoundError:
        raise ParseError('Missing resolved config snapshot', path)


def plot_runs(run_dirs: Sequence[str], window: int, out_dir: str) -> List[str]:
    """One ``curves-<env>.svg`` per environment found among the runs."""
    by_env: Dict[str, List[str]] = OrderedDict()
    for run_dir in run_dirs:
        for seed_dir in find_seed_dirs(run_dir):
            by_env.setdefault(env_of(seed_dir), []).append(seed_dir)

    os.makedirs(out_dir, exist_ok=True)
    written = []
    for env_name, seed_dirs in by_env.items():
        out_path = os.path.join(out_dir, f'curves-{env_name}.svg')
        render_curves(
            [os.path.join(d, 'train.csv') for d in seed_dirs],
            window,
            out_path,
            title=env_name,
        )
        written.append(out_path)
    return written
