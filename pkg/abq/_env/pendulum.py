import logging
from typing import Any, Dict, NamedTuple, Tuple

import numpy as np

from .._errors import NumericError
from .base import EpisodicEnvironment
from .grid import DEFAULT_BINS, ActionGrid


class PendulumParams(NamedTuple):
    dt: float = 0.05
    g: float = 10.0
    m: float = 1.0
    l: float = 1.0  # noqa: E741
    max_torque: float = 2.0
    max_speed: float = 8.0
    max_steps: int = 200


class PendulumState(NamedTuple):
    theta: float  # radians, 0 is upright
    theta_dot: float


def wrap_angle(theta: float) -> float:
    """Map an angle to (-pi, pi]."""
    return -((-theta + np.pi) % (2 * np.pi) - np.pi)


def reward_bounds(params: PendulumParams = PendulumParams()) -> Tuple[float, float]:
    worst = np.pi**2 + 0.1 * params.max_speed**2 + 0.001 * params.max_torque**2
    return -worst, 0.0


def pendulum_step(
    state: PendulumState,
    torque: float,
    params: PendulumParams = PendulumParams(),
) -> Tuple[PendulumState, float]:
    """Semi-implicit Euler step; the reward is charged on the pre-step state and torque."""
    theta, theta_dot = float(state.theta), float(state.theta_dot)
    torque = float(torque)
    if not (np.isfinite(theta) and np.isfinite(theta_dot) and np.isfinite(torque)):
        raise NumericError(f'Non-finite pendulum input: {state}, torque={torque}')

    u = min(max(torque, -params.max_torque), params.max_torque)
    angle = wrap_angle(theta)
    reward = -(angle**2 + 0.1 * theta_dot**2 + 0.001 * u**2)

    acceleration = 3 * params.g / (2 * params.l) * np.sin(theta) + 3.0 / (
        params.m * params.l**2
    ) * u
    new_theta_dot = theta_dot + params.dt * acceleration
    new_theta_dot = min(max(new_theta_dot, -params.max_speed), params.max_speed)
    new_theta = wrap_angle(theta + params.dt * new_theta_dot)

    return PendulumState(float(new_theta), float(new_theta_dot)), float(reward)


class PendulumEnv(EpisodicEnvironment):
    name = 'pendulum'

    def __init__(self, bins: int = DEFAULT_BINS, max_steps: int = None, **physics):
        self.physics = PendulumParams(**physics)
        if max_steps is None:
            max_steps = self.physics.max_steps
        self.physics = self.physics._replace(max_steps=int(max_steps))
        super().__init__(
            ActionGrid.uniform(1, -self.physics.max_torque, self.physics.max_torque, bins),
            max_steps,
        )
        self.bins = int(bins)
        self.logger = logging.getLogger(__name__)
        self.current = PendulumState(np.pi, 0.0)

    @property
    def state_dim(self) -> int:
        return 3

    def reset_state(self, rng: np.random.Generator) -> None:
        self.current = PendulumState(
            theta=float(rng.uniform(-np.pi, np.pi)),
            theta_dot=float(rng.uniform(-1.0, 1.0)),
        )

    def state(self) -> np.ndarray:
        theta, theta_dot = self.current
        return np.array([np.cos(theta), np.sin(theta), theta_dot])

    def transition(self, action: np.ndarray) -> float:
        torque = self.grid.decode(action)[0]
        self.current, reward = pendulum_step(self.current, torque, self.physics)
        return reward

    def params(self) -> Dict[str, Any]:
        defaults = PendulumParams()
        params = {'bins': self.bins, 'max_steps': self.max_steps}
        for key, value in self.physics._asdict().items():
            if key != 'max_steps' and value != getattr(defaults, key):
                params[key] = value
        return params
