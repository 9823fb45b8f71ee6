from .._errors import ConfigError
from .abc import AbstractEnvironment
from .factored import FactoredEnv
from .pendulum import PendulumEnv
from .reacher import ReacherEnv

ENVIRONMENTS = {
    PendulumEnv.name: PendulumEnv,
    ReacherEnv.name: ReacherEnv,
    FactoredEnv.name: FactoredEnv,
}


def make_env(name: str, **params) -> AbstractEnvironment:
    env_cls = ENVIRONMENTS.get(name)
    if not env_cls:
        raise ConfigError(f'Unsupported environment: {name}')
    try:
        return env_cls(**params)
    except TypeError as e:
        raise ConfigError(f'Invalid parameters for {name}: {e}') from e
