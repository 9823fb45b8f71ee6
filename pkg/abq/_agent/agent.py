import logging
import time
from typing import Callable, List, NamedTuple, Optional, Tuple

import numpy as np

from .._env.abc import AbstractEnvironment
from .._errors import (
    ConfigError,
    DimensionError,
    EvaluationAborted,
    NumericError,
    TrainingAborted,
    ValidationError,
)
from .._net.baseline import BaselineMode, baseline, baseline_grad, compose_q, greedy_action
from .._net.qnet import (
    BranchingNetParams,
    evaluate,
    init_network,
    network_backward,
    params_digest,
)
from .._numeric.adam import AdamState, adam_step
from .._replay import Batch, ReplayBuffer, Transition
from .config import AgentConfig, epsilon_at


class RunRecord(NamedTuple):
    episode: int
    steps: int
    cumulative_reward: float
    epsilon: float
    mean_loss: float


class TrainResult(NamedTuple):
    net: BranchingNetParams
    target_net: BranchingNetParams
    records: List[RunRecord]
    wall_clock: float


class PolicySummary(NamedTuple):
    episodes: int
    mean: float
    median: float
    min: float
    max: float
    per_episode: Tuple[float, ...]

    @classmethod
    def from_returns(cls, returns) -> 'PolicySummary':
        returns = np.asarray(returns, dtype=np.float64)
        return cls(
            episodes=int(returns.size),
            mean=float(np.mean(returns)),
            median=float(np.median(returns)),
            min=float(np.min(returns)),
            max=float(np.max(returns)),
            per_episode=tuple(float(r) for r in returns),
        )

    def to_dict(self):
        d = self._asdict()
        d['per_episode'] = list(self.per_episode)
        return dict(d)


def tuned_q(net: BranchingNetParams, states: np.ndarray, mode: BaselineMode) -> np.ndarray:
    out = evaluate(net, states)
    return compose_q(out.values, out.advantages, baseline(out.advantages, mode), mode)


def greedy_actions(net: BranchingNetParams, states: np.ndarray, mode: BaselineMode):
    return greedy_action(tuned_q(net, states, mode))


def select_action(
    net: BranchingNetParams,
    state: np.ndarray,
    epsilon: float,
    rng: np.random.Generator,
    mode: BaselineMode = BaselineMode.ABQ_MAX_MEAN,
) -> np.ndarray:
    if not 0.0 <= epsilon <= 1.0:
        raise ConfigError(f'epsilon must be in [0, 1], got {epsilon}')
    if rng.random() < epsilon:
        return rng.integers(0, net.N, size=net.n)
    return greedy_actions(net, np.asarray(state, dtype=np.float64)[None, :], mode)[0]


def td_targets(
    target_net: BranchingNetParams,
    batch: Batch,
    gamma: float,
    mode: BaselineMode,
) -> np.ndarray:
    """Per-branch targets ``r + gamma * max_j Q_i(s', j)`` from the target net, shape (b, n)."""
    if batch.size == 0:
        raise ValidationError('Cannot build targets for an empty batch')
    bootstrap = tuned_q(target_net, batch.next_states, mode).max(axis=-1)
    continuing = ~np.asarray(batch.dones, dtype=bool)
    return batch.rewards[:, None] + np.where(continuing[:, None], gamma * bootstrap, 0.0)


def loss_and_grads(
    net: BranchingNetParams,
    batch: Batch,
    targets: np.ndarray,
    mode: BaselineMode,
) -> Tuple[float, BranchingNetParams]:
    """Mean over the batch and the branches of the squared per-branch TD error."""
    out = evaluate(net, batch.states)
    baselines = baseline(out.advantages, mode)
    q = compose_q(out.values, out.advantages, baselines, mode)

    size, branches = batch.actions.shape
    targets = np.asarray(targets, dtype=np.float64)
    if targets.shape != (size, branches):
        raise DimensionError(f'Targets shape {targets.shape} does not match {(size, branches)}')

    rows = np.arange(size)[:, None]
    columns = np.arange(branches)[None, :]
    delta = targets - q[rows, columns, batch.actions]

    finite = np.isfinite(delta).all(axis=1)
    if not finite.all():
        index = int(np.flatnonzero(~finite)[0])
        raise NumericError(f'Non-finite TD error for transition {index}', index=index)

    loss = float(np.mean(delta**2))

    grad_taken = -2.0 * delta / delta.size
    grad_advantages = np.zeros_like(out.advantages)
    grad_advantages[rows, columns, batch.actions] = grad_taken
    grad_baselines = -grad_taken if mode.per_branch else -grad_taken.sum(axis=1)
    grad_advantages += baseline_grad(out.advantages, grad_baselines, mode)

    grads = network_backward(net, out.cache, grad_taken.sum(axis=1), grad_advantages)
    return loss, grads


EpisodeCallback = Callable[[RunRecord, 'Trainer'], None]


class Trainer:
    def __init__(
        self,
        config: AgentConfig,
        env: AbstractEnvironment,
        rng: np.random.Generator,
        callback: Optional[EpisodeCallback] = None,
    ):
        self.config = config
        self.env = env
        self.rng = rng
        self.callback = callback
        self.logger = logging.getLogger(__name__)

        n, N = env.grid.shape
        self.net = init_network(env.state_dim, n, N, config.widths, seed=config.seed)
        self.target_net = self.net
        self.optimizer = AdamState.create(self.net)
        self.buffer = ReplayBuffer(config.buffer_capacity, sub_actions=N)
        self.records: List[RunRecord] = []
        self.gradient_steps = 0
        self.synced_digest = params_digest(self.net)

    def run(self) -> TrainResult:
        started = time.perf_counter()
        self.logger.info(
            'Training %s on %s for %d episodes (n=%d, N=%d)',
            self.config.baseline_mode.value,
            self.env.name,
            self.config.episodes,
            self.net.n,
            self.net.N,
        )
        for episode in range(self.config.episodes):
            record = self.run_episode(episode)
            self.records.append(record)

            if (episode + 1) % self.config.target_period == 0:
                self.sync_target()

            self.logger.debug(
                'episode %d/%d steps=%d return=%.3f epsilon=%.3f loss=%.6f',
                record.episode,
                self.config.episodes,
                record.steps,
                record.cumulative_reward,
                record.epsilon,
                record.mean_loss,
            )
            if self.callback is not None:
                self.callback(record, self)

        return TrainResult(
            self.net, self.target_net, list(self.records), time.perf_counter() - started
        )

    def run_episode(self, episode: int) -> RunRecord:
        epsilon = epsilon_at(self.config, episode)
        total, steps, losses = 0.0, 0, []

        try:
            self.env.initialize(self.rng)
            state = self.env.state()
        except Exception as e:
            raise TrainingAborted(
                f'{self.env.name} failed to initialize episode {episode + 1}: {e}', self.records
            ) from e

        while not self.env.is_terminated():
            action = select_action(
                self.net, state, epsilon, self.rng, self.config.baseline_mode
            )
            try:
                reward = self.env.execute(action)
                next_state = self.env.state()
            except Exception as e:
                raise TrainingAborted(
                    f'{self.env.name} failed at step {steps} of episode {episode + 1}: {e}',
                    self.records,
                ) from e

            self.buffer.store(
                Transition(state, action, reward, next_state, self.env.is_terminal())
            )
            if len(self.buffer) > self.config.train_threshold:
                losses.append(self.learn())

            state = next_state
            total += reward
            steps += 1

        return RunRecord(
            episode=episode + 1,
            steps=steps,
            cumulative_reward=float(total),
            epsilon=float(epsilon),
            mean_loss=float(np.mean(losses)) if losses else 0.0,
        )

    def learn(self) -> float:
        config = self.config
        batch = self.buffer.sample_batch(config.batch_size, self.rng)
        targets = td_targets(self.target_net, batch, config.gamma, config.baseline_mode)
        loss, grads = loss_and_grads(self.net, batch, targets, config.baseline_mode)
        self.net, self.optimizer = adam_step(self.net, grads, self.optimizer, config.lr)
        self.gradient_steps += 1
        return loss

    def sync_target(self) -> None:
        # parameters are never mutated in place, so sharing the arrays is a hard copy
        self.target_net = self.net
        self.synced_digest = params_digest(self.net)
        self.logger.debug('target network synchronized after %d updates', self.gradient_steps)


def train(
    config: AgentConfig,
    env: AbstractEnvironment,
    rng: np.random.Generator,
    callback: Optional[EpisodeCallback] = None,
) -> TrainResult:
    return Trainer(config, env, rng, callback=callback).run()


def _rollout(env: AbstractEnvironment, rng: np.random.Generator, choose) -> float:
    env.initialize(rng)
    total = 0.0
    while not env.is_terminated():
        total += env.execute(choose(env.state()))
    return total


def evaluate_policy(
    net: BranchingNetParams,
    env: AbstractEnvironment,
    episodes: int,
    rng: np.random.Generator,
    mode: BaselineMode = BaselineMode.ABQ_MAX_MEAN,
) -> PolicySummary:
    """Greedy rollouts without exploration or learning; ``rng`` only drives initial states."""
    if int(episodes) < 1:
        raise ConfigError(f'Need at least one evaluation episode, got {episodes}')

    def choose(state):
        return greedy_actions(net, state[None, :], mode)[0]

    returns = []
    for episode in range(int(episodes)):
        try:
            returns.append(_rollout(env, rng, choose))
        except Exception as e:
            summary = PolicySummary.from_returns(returns) if returns else None
            raise EvaluationAborted(
                f'{env.name} failed in evaluation episode {episode + 1}: {e}', summary
            ) from e

    return PolicySummary.from_returns(returns)


def random_policy_returns(
    env: AbstractEnvironment,
    episodes: int,
    rng: np.random.Generator,
) -> PolicySummary:
    n, N = env.grid.shape

    def choose(_):
        return rng.integers(0, N, size=n)

    return PolicySummary.from_returns([_rollout(env, rng, choose) for _ in range(int(episodes))])
