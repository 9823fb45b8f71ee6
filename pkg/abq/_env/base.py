import logging

import numpy as np

from .._errors import ConfigError, ProtocolError
from .abc import AbstractEnvironment
from .grid import ActionGrid


class EpisodicEnvironment(AbstractEnvironment):
    """Time-limited environment without absorbing states."""

    logger: logging.Logger

    def __init__(self, grid: ActionGrid, max_steps: int):
        if int(max_steps) < 1:
            raise ConfigError(f'max_steps must be positive, got {max_steps}')
        self._grid = grid
        self.max_steps = int(max_steps)
        self.steps = 0
        self._initialized = False

    @property
    def grid(self) -> ActionGrid:
        return self._grid

    def initialize(self, rng: np.random.Generator) -> None:
        self.reset_state(rng)
        self.steps = 0
        self._initialized = True

    def execute(self, action: np.ndarray) -> float:
        if not self._initialized:
            raise ProtocolError(f'{self.name}: execute() called before initialize()')
        if self.is_terminated():
            raise ProtocolError(f'{self.name}: execute() called on a finished episode')
        reward = self.transition(np.asarray(action))
        self.steps += 1
        return reward

    def is_terminated(self) -> bool:
        return self.steps >= self.max_steps

    def is_terminal(self) -> bool:
        return False

    def reset_state(self, rng: np.random.Generator) -> None:
        raise NotImplementedError()

    def transition(self, action: np.ndarray) -> float:
        raise NotImplementedError()
