from collections import namedtuple
from typing import Any, Dict

from .._errors import ConfigError
from .._net.baseline import BaselineMode
from .._net.qnet import DEFAULT_WIDTHS

# share of the training episodes spent decaying epsilon when no explicit length is set
EPSILON_DECAY_SHARE = 0.2

AGENT_FIELDS = [
    'gamma',
    'lr',
    'epsilon_start',
    'epsilon_end',
    'epsilon_decay_episodes',
    'batch_size',
    'buffer_capacity',
    'train_threshold',
    'target_period',
    'episodes',
    'baseline_mode',
    'seed',
    'widths',
]


class AgentConfig(namedtuple('AgentConfig', AGENT_FIELDS)):
    """Every hyperparameter of the training loop."""

    def __new__(
        cls,
        gamma: float = 0.99,
        lr: float = 1e-4,
        epsilon_start: float = 1.0,
        epsilon_end: float = 0.05,
        epsilon_decay_episodes: int = None,
        batch_size: int = 64,
        buffer_capacity: int = 100_000,
        train_threshold: int = 1_000,
        target_period: int = 10,
        episodes: int = 2000,
        baseline_mode: BaselineMode = BaselineMode.ABQ_MAX_MEAN,
        seed: int = 0,
        widths=DEFAULT_WIDTHS,
    ) -> 'AgentConfig':
        if not 0.0 <= gamma < 1.0:
            raise ConfigError(f'gamma must be in [0, 1), got {gamma}')
        if not lr > 0.0:
            raise ConfigError(f'Learning rate must be positive, got {lr}')
        if not 0.0 <= epsilon_end <= epsilon_start <= 1.0:
            raise ConfigError(
                f'Need 0 <= epsilon_end <= epsilon_start <= 1, '
                f'got {epsilon_end} and {epsilon_start}'
            )
        if epsilon_decay_episodes is not None and int(epsilon_decay_episodes) < 1:
            raise ConfigError(
                f'epsilon_decay_episodes must be positive, got {epsilon_decay_episodes}'
            )
        if int(batch_size) < 1 or int(buffer_capacity) < 1:
            raise ConfigError('batch_size and buffer_capacity must be positive')
        if int(train_threshold) < 0:
            raise ConfigError(f'train_threshold must not be negative, got {train_threshold}')
        if int(train_threshold) + 1 < int(batch_size):
            raise ConfigError(
                f'train_threshold {train_threshold} is too small for batches of {batch_size}'
            )
        if int(target_period) < 1:
            raise ConfigError(f'target_period must be at least 1, got {target_period}')
        if int(episodes) < 0:
            raise ConfigError(f'episodes must not be negative, got {episodes}')

        # noinspection PyArgumentList
        return super().__new__(
            cls,
            float(gamma),
            float(lr),
            float(epsilon_start),
            float(epsilon_end),
            None if epsilon_decay_episodes is None else int(epsilon_decay_episodes),
            int(batch_size),
            int(buffer_capacity),
            int(train_threshold),
            int(target_period),
            int(episodes),
            BaselineMode.parse(baseline_mode),
            int(seed),
            tuple(int(w) for w in widths),
        )

    @property
    def decay_episodes(self) -> int:
        if self.epsilon_decay_episodes is not None:
            return self.epsilon_decay_episodes
        return max(1, int(EPSILON_DECAY_SHARE * self.episodes))

    def replace(self, **changes) -> 'AgentConfig':
        """Like ``_replace`` but re-validated."""
        values = self._asdict()
        unknown = set(changes) - set(values)
        if unknown:
            raise ConfigError(f'Unknown agent settings: {sorted(unknown)}')
        values.update(changes)
        return AgentConfig(**values)

    def to_dict(self) -> Dict[str, Any]:
        d = self._asdict()
        d['baseline_mode'] = self.baseline_mode.value
        d['widths'] = list(self.widths)
        return dict(d)


def epsilon_at(config: AgentConfig, episode: int) -> float:
    """Linear decay over ``decay_episodes`` (0-based episode index), constant afterwards."""
    fraction = episode / config.decay_episodes
    if fraction >= 1.0:
        return config.epsilon_end
    return config.epsilon_start + fraction * (config.epsilon_end - config.epsilon_start)
