import os

import numpy as np

from abq import ActionGrid, Batch, PolicySummary
from abq._env.base import EpisodicEnvironment
from abq._harness.config import ExperimentConfig, dump_config
from abq._harness.records import write_summary


def random_batch(
    rng: np.random.Generator,
    size: int,
    state_dim: int,
    n: int,
    N: int,
    done_share: float = 0.25,
) -> Batch:
    return Batch(
        states=rng.normal(size=(size, state_dim)),
        actions=rng.integers(0, N, size=(size, n)),
        rewards=rng.normal(size=size),
        next_states=rng.normal(size=(size, state_dim)),
        dones=rng.random(size) < done_share,
    )


def fake_seed_dir(config: ExperimentConfig, seed: int, returns) -> str:
    """A seed directory holding only a config snapshot and an eval.json."""
    seed_dir = config.seed_dir(seed)
    os.makedirs(seed_dir, exist_ok=True)
    with open(os.path.join(seed_dir, 'config.txt'), mode='w', encoding='utf8') as f:
        f.write(dump_config(config._replace(seeds=(seed,))))
    with open(os.path.join(seed_dir, 'train.csv'), mode='w', encoding='utf8') as f:
        f.write('episode,steps,cumulative_reward,epsilon,mean_loss\n')
    write_summary(os.path.join(seed_dir, 'eval.json'), PolicySummary.from_returns(returns))
    return seed_dir


class CountingEnv(EpisodicEnvironment):
    """Deterministic toy task: the reward is the mean sub-action index, scaled to [0, 1]."""

    name = 'counting'

    def __init__(self, dims=2, bins=3, max_steps=5, fail_at_episode=None):
        super().__init__(ActionGrid.uniform(dims, -1.0, 1.0, bins), max_steps)
        self.episodes = 0
        self.fail_at_episode = fail_at_episode

    @property
    def state_dim(self) -> int:
        return 2

    def reset_state(self, rng):
        self.episodes += 1

    def state(self):
        return np.array([self.steps / self.max_steps, 1.0])

    def transition(self, action):
        if self.fail_at_episode is not None and self.episodes >= self.fail_at_episode:
            raise RuntimeError('actuator fault')
        return float(np.mean(action) / (self.grid.sub_actions - 1))

    def params(self):
        return {'max_steps': self.max_steps}
