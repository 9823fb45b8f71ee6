from typing import Any, Dict

import numpy as np

from .grid import ActionGrid


class AbstractEnvironment:
    name: str

    def initialize(self, rng: np.random.Generator) -> None:
        raise NotImplementedError()

    def state(self) -> np.ndarray:
        raise NotImplementedError()

    def execute(self, action: np.ndarray) -> float:
        raise NotImplementedError()

    def is_terminated(self) -> bool:
        """The episode is over (absorbing state or time limit)."""
        raise NotImplementedError()

    def is_terminal(self) -> bool:
        """The last transition entered an absorbing state, so its target must not bootstrap."""
        raise NotImplementedError()

    @property
    def state_dim(self) -> int:
        raise NotImplementedError()

    @property
    def grid(self) -> ActionGrid:
        raise NotImplementedError()

    def params(self) -> Dict[str, Any]:
        raise NotImplementedError()
