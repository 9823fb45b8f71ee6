import logging
from typing import Any, Dict, NamedTuple, Tuple

import numpy as np

from .._errors import DimensionError
from .base import EpisodicEnvironment
from .grid import DEFAULT_BINS, ActionGrid


class ReacherParams(NamedTuple):
    friction: float = 0.95
    gain: float = 0.2
    dt: float = 0.05
    max_speed: float = 2.0
    force_cost: float = 0.001
    max_steps: int = 300


class ReacherState(NamedTuple):
    positions: np.ndarray
    velocities: np.ndarray
    target: np.ndarray


def reacher_step(
    state: ReacherState,
    forces: np.ndarray,
    params: ReacherParams = ReacherParams(),
) -> Tuple[ReacherState, float]:
    """Independent damped point masses; they only interact through the distance reward."""
    positions = np.asarray(state.positions, dtype=np.float64)
    forces = np.asarray(forces, dtype=np.float64)
    if forces.shape != positions.shape:
        raise DimensionError(f'Expected {positions.shape[0]} forces, got shape {forces.shape}')

    forces = np.clip(forces, -1.0, 1.0)
    velocities = np.clip(
        params.friction * np.asarray(state.velocities) + params.gain * forces,
        -params.max_speed,
        params.max_speed,
    )
    positions = positions + params.dt * velocities
    target = np.asarray(state.target, dtype=np.float64)

    reward = -np.linalg.norm(positions - target) - params.force_cost * float(forces @ forces)
    return ReacherState(positions, velocities, target), float(reward)


class ReacherEnv(EpisodicEnvironment):
    name = 'reacher'

    def __init__(
        self,
        dims: int = 6,
        bins: int = DEFAULT_BINS,
        max_steps: int = None,
        target_range: float = 1.0,
        **dynamics,
    ):
        self.dynamics = ReacherParams(**dynamics)
        if max_steps is None:
            max_steps = self.dynamics.max_steps
        self.dynamics = self.dynamics._replace(max_steps=int(max_steps))
        super().__init__(ActionGrid.uniform(dims, -1.0, 1.0, bins), max_steps)
        self.dims = int(dims)
        self.bins = int(bins)
        self.target_range = float(target_range)
        self.logger = logging.getLogger(__name__)
        zeros = np.zeros(self.dims)
        self.current = ReacherState(zeros, zeros, zeros)

    @property
    def state_dim(self) -> int:
        return 3 * self.dims

    def reset_state(self, rng: np.random.Generator) -> None:
        zeros = np.zeros(self.dims)
        target = rng.uniform(-self.target_range, self.target_range, size=self.dims)
        self.current = ReacherState(zeros, zeros.copy(), target)

    def state(self) -> np.ndarray:
        positions, velocities, target = self.current
        return np.concatenate([positions, velocities, target - positions])

    def transition(self, action: np.ndarray) -> float:
        self.current, reward = reacher_step(
            self.current, self.grid.decode(action), self.dynamics
        )
        return reward

    def params(self) -> Dict[str, Any]:
        defaults = ReacherParams()
        params = {
            'dims': self.dims,
            'bins': self.bins,
            'max_steps': self.max_steps,
            'target_range': self.target_range,
        }
        for key, value in self.dynamics._asdict().items():
            if key != 'max_steps' and value != getattr(defaults, key):
                params[key] = value
        return params
