"""
A factored grid MDP small enough to solve exactly.

Each of ``dims`` coordinates sits on a line of ``positions`` cells and is
moved left, kept, or moved right by its own sub-action. The reward is a sum
of per-coordinate tables plus an optional coupling bonus paid when every
coordinate is at its best cell at once.
"""
import itertools
import logging
from typing import Any, Dict, FrozenSet, List, NamedTuple, Sequence, Tuple

import numpy as np

from .._errors import ConfigError, NumericError, ResourceError, ValidationError
from .base import EpisodicEnvironment
from .grid import ActionGrid

MOVES = (-1, 0, 1)  # left, stay, right
VALUE_ITERATION_BUDGET = 100_000


class FactoredMdp(NamedTuple):
    dims: int
    positions: int
    rewards: np.ndarray  # (dims, positions)
    coupling: float = 0.0
    gamma: float = 0.9

    @classmethod
    def create(
        cls,
        dims: int = 2,
        positions: int = 5,
        coupling: float = 0.0,
        gamma: float = 0.9,
        seed: int = 0,
    ) -> 'FactoredMdp':
        """Distance-to-goal reward tables with one random goal cell per coordinate."""
        if int(dims) < 1 or int(positions) < 1:
            raise ConfigError(f'dims and positions must be positive, got {dims}, {positions}')
        rng = np.random.default_rng(seed)
        goals = rng.integers(0, positions, size=dims)
        cells = np.arange(positions)
        rewards = -np.abs(cells[None, :] - goals[:, None]) / max(positions - 1, 1)
        return cls(int(dims), int(positions), rewards.astype(np.float64), float(coupling), gamma)

    @property
    def state_count(self) -> int:
        return self.positions**self.dims

    @property
    def action_count(self) -> int:
        return len(MOVES) ** self.dims

    @property
    def goals(self) -> np.ndarray:
        return np.argmax(self.rewards, axis=1)

    def marginal(self, i: int) -> 'FactoredMdp':
        """The single-coordinate problem seen by branch ``i`` (coupling dropped)."""
        return FactoredMdp(1, self.positions, self.rewards[i : i + 1].copy(), 0.0, self.gamma)

    def state_index(self, state: Sequence[int]) -> int:
        index = 0
        for position in state:
            index = index * self.positions + int(position)
        return index

    def state_of(self, index: int) -> Tuple[int, ...]:
        state = []
        for _ in range(self.dims):
            index, position = divmod(index, self.positions)
            state.append(position)
        return tuple(reversed(state))

    def action_index(self, action: Sequence[int]) -> int:
        index = 0
        for sub_action in action:
            index = index * len(MOVES) + int(sub_action)
        return index

    def action_of(self, index: int) -> Tuple[int, ...]:
        action = []
        for _ in range(self.dims):
            index, sub_action = divmod(index, len(MOVES))
            action.append(sub_action)
        return tuple(reversed(action))


def factored_mdp_step(
    mdp: FactoredMdp,
    state: Sequence[int],
    action: Sequence[int],
) -> Tuple[Tuple[int, ...], float]:
    if len(state) != mdp.dims or len(action) != mdp.dims:
        raise ValidationError(
            f'Expected {mdp.dims} positions and sub-actions, got {len(state)} and {len(action)}'
        )
    next_state = []
    for position, sub_action in zip(state, action):
        if not 0 <= int(position) < mdp.positions:
            raise ValidationError(f'Position {position} outside [0, {mdp.positions})')
        if not 0 <= int(sub_action) < len(MOVES):
            raise ValidationError(f'Sub-action {sub_action} is not left/stay/right')
        moved = int(position) + MOVES[int(sub_action)]
        next_state.append(min(max(moved, 0), mdp.positions - 1))

    reward = float(sum(mdp.rewards[i, p] for i, p in enumerate(next_state)))
    if mdp.coupling and all(p == g for p, g in zip(next_state, mdp.goals)):
        reward += mdp.coupling
    return tuple(next_state), reward


class QStar(NamedTuple):
    q: np.ndarray  # (state_count, action_count)
    residuals: Tuple[float, ...]
    sweeps: int


def value_iteration(
    mdp: FactoredMdp,
    gamma: float = None,
    tol: float = 1e-10,
    max_sweeps: int = 100_000,
) -> QStar:
    gamma = mdp.gamma if gamma is None else gamma
    if not 0.0 <= gamma < 1.0:
        raise ConfigError(f'gamma must be in [0, 1), got {gamma}')
    states, actions = mdp.state_count, mdp.action_count
    if states * actions > VALUE_ITERATION_BUDGET:
        raise ResourceError(
            f'{states} states x {actions} actions exceeds the budget of {VALUE_ITERATION_BUDGET}'
        )

    next_index = np.empty((states, actions), dtype=np.int64)
    rewards = np.empty((states, actions), dtype=np.float64)
    for s in range(states):
        state = mdp.state_of(s)
        for a in range(actions):
            next_state, reward = factored_mdp_step(mdp, state, mdp.action_of(a))
            next_index[s, a] = mdp.state_index(next_state)
            rewards[s, a] = reward

    q = np.zeros((states, actions))
    residuals = []
    for _ in range(max_sweeps):
        updated = rewards + gamma * q.max(axis=1)[next_index]
        residuals.append(float(np.max(np.abs(updated - q))))
        q = updated
        if residuals[-1] < tol:
            return QStar(q, tuple(residuals), len(residuals))

    raise NumericError(f'Value iteration did not reach {tol} in {max_sweeps} sweeps')


def greedy_policy(q: np.ndarray, tol: float = 1e-9) -> List[FrozenSet[int]]:
    """Optimal action set per state; more than one action when values tie within ``tol``."""
    q = np.asarray(q)
    best = q.max(axis=1, keepdims=True)
    return [frozenset(np.flatnonzero(row >= top - tol).tolist()) for row, top in zip(q, best)]


def branch_greedy_actions(mdp: FactoredMdp, tol: float = 1e-9) -> List[FrozenSet[int]]:
    """Joint actions assembled from every per-coordinate optimal policy, per joint state."""
    marginals = [greedy_policy(value_iteration(mdp.marginal(i)).q, tol) for i in range(mdp.dims)]
    policy = []
    for s in range(mdp.state_count):
        state = mdp.state_of(s)
        choices = [marginals[i][position] for i, position in enumerate(state)]
        policy.append(
            frozenset(mdp.action_index(combo) for combo in itertools.product(*choices))
        )
    return policy


class FactoredEnv(EpisodicEnvironment):
    name = 'factored'

    def __init__(
        self,
        dims: int = 2,
        positions: int = 5,
        coupling: float = 0.0,
        gamma: float = 0.9,
        reward_seed: int = 0,
        max_steps: int = 50,
    ):
        self.mdp = FactoredMdp.create(dims, positions, coupling, gamma, seed=reward_seed)
        super().__init__(ActionGrid.uniform(self.mdp.dims, -1.0, 1.0, len(MOVES)), max_steps)
        self.reward_seed = int(reward_seed)
        self.logger = logging.getLogger(__name__)
        self.current = (0,) * self.mdp.dims

    @property
    def state_dim(self) -> int:
        return self.mdp.dims * self.mdp.positions

    def observation(self, state: Sequence[int]) -> np.ndarray:
        encoded = np.zeros((self.mdp.dims, self.mdp.positions))
        encoded[np.arange(self.mdp.dims), np.asarray(state, dtype=np.int64)] = 1.0
        return encoded.reshape(-1)

    def all_observations(self) -> np.ndarray:
        return np.array(
            [self.observation(self.mdp.state_of(s)) for s in range(self.mdp.state_count)]
        )

    def reset_state(self, rng: np.random.Generator) -> None:
        self.current = tuple(int(p) for p in rng.integers(0, self.mdp.positions, self.mdp.dims))

    def state(self) -> np.ndarray:
        return self.observation(self.current)

    def transition(self, action: np.ndarray) -> float:
        self.grid.decode(action)
        self.current, reward = factored_mdp_step(self.mdp, self.current, action.tolist())
        return reward

    def params(self) -> Dict[str, Any]:
        return {
            'dims': self.mdp.dims,
            'positions': self.mdp.positions,
            'coupling': self.mdp.coupling,
            'gamma': self.mdp.gamma,
            'reward_seed': self.reward_seed,
            'max_steps': self.max_steps,
        }
