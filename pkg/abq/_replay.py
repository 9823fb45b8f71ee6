import logging
from typing import Iterator, List, NamedTuple, Optional

import numpy as np

from ._errors import ConfigError, InsufficientDataError, ValidationError

DEFAULT_CAPACITY = 100_000


class Transition(NamedTuple):
    state: np.ndarray
    action: np.ndarray
    reward: float
    next_state: np.ndarray
    done: bool


class Batch(NamedTuple):
    states: np.ndarray  # (b, state_dim)
    actions: np.ndarray  # (b, n) int
    rewards: np.ndarray  # (b,)
    next_states: np.ndarray  # (b, state_dim)
    dones: np.ndarray  # (b,) bool

    @property
    def size(self) -> int:
        return self.rewards.shape[0]

    def transitions(self) -> List[Transition]:
        return [
            Transition(
                state=self.states[k],
                action=self.actions[k],
                reward=float(self.rewards[k]),
                next_state=self.next_states[k],
                done=bool(self.dones[k]),
            )
            for k in range(self.size)
        ]


class ReplayBuffer:
    """Fixed-capacity FIFO ring of transitions with uniform sampling (with replacement)."""

    def __init__(self, capacity: int = DEFAULT_CAPACITY, sub_actions: Optional[int] = None):
        if int(capacity) < 1:
            raise ConfigError(f'Capacity must be positive, got {capacity}')
        self.capacity = int(capacity)
        self.sub_actions = sub_actions
        self.logger = logging.getLogger(__name__)

        self._states = None
        self._actions = None
        self._rewards = None
        self._next_states = None
        self._dones = None
        self._cursor = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    @property
    def size(self) -> int:
        return self._size

    def _allocate(self, state_dim: int, branches: int):
        self._states = np.empty((self.capacity, state_dim), dtype=np.float64)
        self._next_states = np.empty((self.capacity, state_dim), dtype=np.float64)
        self._actions = np.empty((self.capacity, branches), dtype=np.int64)
        self._rewards = np.empty(self.capacity, dtype=np.float64)
        self._dones = np.empty(self.capacity, dtype=bool)

    def _validate(self, t: Transition):
        state = np.asarray(t.state, dtype=np.float64)
        next_state = np.asarray(t.next_state, dtype=np.float64)
        action = np.asarray(t.action)

        if state.ndim != 1 or state.shape != next_state.shape:
            raise ValidationError(
                f'State shapes differ: {state.shape} vs next state {next_state.shape}'
            )
        if action.ndim != 1 or action.size == 0 or not np.issubdtype(action.dtype, np.integer):
            raise ValidationError(f'Action must be a vector of integer indices, got {t.action!r}')
        too_large = self.sub_actions is not None and np.any(action >= self.sub_actions)
        if np.any(action < 0) or too_large:
            raise ValidationError(f'Action indices out of range: {action.tolist()}')
        if not np.isfinite(t.reward):
            raise ValidationError(f'Reward is not finite: {t.reward}')

        if self._states is not None:
            if state.shape[0] != self._states.shape[1]:
                raise ValidationError(
                    f'State has {state.shape[0]} entries, buffer holds {self._states.shape[1]}'
                )
            if action.shape[0] != self._actions.shape[1]:
                raise ValidationError(
                    f'Action has {action.shape[0]} branches, buffer holds {self._actions.shape[1]}'
                )
        return state, action, next_state

    def store(self, transition: Transition) -> None:
        state, action, next_state = self._validate(transition)
        if self._states is None:
            self._allocate(state.shape[0], action.shape[0])

        k = self._cursor
        self._states[k] = state
        self._actions[k] = action
        self._rewards[k] = float(transition.reward)
        self._next_states[k] = next_state
        self._dones[k] = bool(transition.done)

        self._cursor = (k + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def _ordered_indices(self) -> np.ndarray:
        if self._size < self.capacity:
            return np.arange(self._size)
        return (np.arange(self.capacity) + self._cursor) % self.capacity

    def _gather(self, indices: np.ndarray) -> Batch:
        return Batch(
            states=self._states[indices],
            actions=self._actions[indices],
            rewards=self._rewards[indices],
            next_states=self._next_states[indices],
            dones=self._dones[indices],
        )

    def __iter__(self) -> Iterator[Transition]:
        if not self._size:
            return iter(())
        return iter(self._gather(self._ordered_indices()).transitions())

    def sample_batch(
        self,
        batch_size: int,
        rng: np.random.Generator,
        strict: bool = True,
    ) -> Batch:
        """
        Draw ``batch_size`` transitions uniformly with replacement.

        With ``strict`` the buffer must hold at least ``batch_size`` transitions;
        otherwise any non-empty buffer can be sampled.
        """
        if int(batch_size) < 1:
            raise ConfigError(f'Batch size must be positive, got {batch_size}')
        if self._size == 0 or (strict and self._size < batch_size):
            raise InsufficientDataError(
                f'Buffer holds {self._size} transitions, {batch_size} requested'
            )
        indices = rng.integers(0, self._size, size=int(batch_size))
        return self._gather(indices)

    def sample(self, batch_size: int, rng: np.random.Generator, strict: bool = True):
        return self.sample_batch(batch_size, rng, strict=strict).transitions()
