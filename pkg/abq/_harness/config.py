"""
Experiment files are flat ``key = value`` text with dotted sections::

    # pendulum, three seeds
    experiment.label = pendulum-abq
    experiment.seeds = 1, 2, 3
    experiment.output_dir = runs
    env.name = pendulum
    env.bins = 25
    agent.episodes = 500
    agent.baseline_mode = abq

``experiment.label`` and ``experiment.output_dir`` are taken as text, never as numbers or
booleans; quote them to keep a ``#`` or surrounding spaces. Unknown keys and malformed
lines raise ``ParseError`` naming the file and line.
"""
import ast
import os
import re
from typing import Any, Dict, Mapping, NamedTuple, Optional, Tuple

from .._agent.config import AGENT_FIELDS, AgentConfig
from .._errors import ConfigError, ParseError

EXPERIMENT_FIELDS = ('label', 'seeds', 'output_dir', 'eval_episodes', 'window')
TEXT_KEYS = ('experiment.label', 'experiment.output_dir')

_QUOTED = re.compile(r'''^('(?:[^'\\]|\\.)*'|"(?:[^"\\]|\\.)*")''')
_COMMENT = re.compile(r'\s#')


class ExperimentConfig(NamedTuple):
    env_name: str
    env_params: Tuple[Tuple[str, Any], ...] = ()
    agent: AgentConfig = AgentConfig()
    seeds: Tuple[int, ...] = (0,)
    output_dir: str = 'runs'
    label: Optional[str] = None
    eval_episodes: int = 100
    window: int = 100

    @property
    def run_label(self) -> str:
        return self.label or f'{self.env_name}-{self.agent.baseline_mode.value}'

    @property
    def run_dir(self) -> str:
        return os.path.join(self.output_dir, self.run_label)

    def seed_dir(self, seed: int) -> str:
        return os.path.join(self.run_dir, f'seed-{seed}')

    def env_kwargs(self) -> Dict[str, Any]:
        return dict(self.env_params)

    def validate(self) -> 'ExperimentConfig':
        if not self.seeds:
            raise ConfigError('At least one seed is required')
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError(f'Seeds must be distinct, got {list(self.seeds)}')
        if int(self.eval_episodes) < 1:
            raise ConfigError(f'eval_episodes must be positive, got {self.eval_episodes}')
        if int(self.window) < 1:
            raise ConfigError(f'window must be positive, got {self.window}')
        return self

    def to_dict(self) -> Dict[str, Any]:
        return {
            'env_name': self.env_name,
            'env_params': self.env_kwargs(),
            'agent': self.agent.to_dict(),
            'seeds': list(self.seeds),
            'output_dir': self.output_dir,
            'label': self.run_label,
            'eval_episodes': self.eval_episodes,
            'window': self.window,
        }


def _coerce(raw: str) -> Any:
    raw = raw.strip()
    if raw.lower() in ('none', 'null', ''):
        return None
    if raw.lower() in ('true', 'false'):
        return raw.lower() == 'true'
    try:
        return ast.literal_eval(raw)
    except (ValueError, SyntaxError):
        return raw


def _text(raw: str) -> Optional[str]:
    raw = raw.strip()
    quoted = _QUOTED.match(raw)
    if quoted:
        return ast.literal_eval(quoted.group(1))
    raw = _COMMENT.split(raw, 1)[0].strip()
    if raw.lower() in ('none', 'null', ''):
        return None
    return raw


def _int_tuple(value) -> Tuple[int, ...]:
    if isinstance(value, str):
        value = [v for v in value.replace(',', ' ').split() if v]
    if isinstance(value, (int, float)):
        value = [value]
    return tuple(int(v) for v in value)


def _apply(values: Dict[str, Any], key: str, value: Any):
    section, _, name = key.partition('.')
    if not name:
        raise ConfigError(f'Setting {key!r} needs a section (experiment, env or agent)')
    if section == 'experiment':
        if name not in EXPERIMENT_FIELDS:
            raise ConfigError(f'Unknown experiment setting: {name}')
        values['experiment'][name] = value
    elif section == 'env':
        values['env'][name] = value
    elif section == 'agent':
        if name not in AGENT_FIELDS:
            raise ConfigError(f'Unknown agent setting: {name}')
        values['agent'][name] = value
    else:
        raise ConfigError(f'Unknown section {section!r} in {key!r}')


def _build(values: Dict[str, Dict[str, Any]]) -> ExperimentConfig:
    env = dict(values['env'])
    env_name = env.pop('name', None)
    if not env_name:
        raise ConfigError('env.name is required')

    agent = dict(values['agent'])
    if 'widths' in agent:
        agent['widths'] = _int_tuple(agent['widths'])

    experiment = dict(values['experiment'])
    if 'seeds' in experiment:
        experiment['seeds'] = _int_tuple(experiment['seeds'])
    for key in ('eval_episodes', 'window'):
        if key in experiment:
            experiment[key] = int(experiment[key])
    for key in ('output_dir', 'label'):
        if experiment.get(key) is not None:
            experiment[key] = str(experiment[key])

    try:
        agent_config = AgentConfig(**agent)
    except (TypeError, ValueError) as e:
        raise ConfigError(f'Invalid agent settings: {e}') from e

    config = ExperimentConfig(
        env_name=str(env_name),
        env_params=tuple(sorted(env.items())),
        agent=agent_config,
        **experiment,
    )
    return config.validate()


def _empty() -> Dict[str, Dict[str, Any]]:
    return {'experiment': {}, 'env': {}, 'agent': {}}


def parse_config(text: str, path: str = None) -> ExperimentConfig:
    values = _empty()
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        key, sep, raw = line.partition('=')
        key = key.strip()
        if not sep or not key:
            raise ParseError(f'Expected "key = value", got {line!r}', path=path, line=number)
        value = _text(raw) if key in TEXT_KEYS else _coerce(raw.split('#', 1)[0])
        try:
            _apply(values, key, value)
        except ConfigError as e:
            raise ParseError(str(e), path=path, line=number) from e

    try:
        return _build(values)
    except ConfigError as e:
        raise ParseError(str(e), path=path) from e


def load_config(path: str) -> ExperimentConfig:
    with open(path, mode='r', encoding='utf8') as f:
        return parse_config(f.read(), path=path)


def _flatten(config: ExperimentConfig) -> Dict[str, Dict[str, Any]]:
    values = _empty()
    values['env'] = dict(config.env_params, name=config.env_name)
    values['agent'] = config.agent._asdict()
    values['experiment'] = {
        'label': config.label,
        'seeds': config.seeds,
        'output_dir': config.output_dir,
        'eval_episodes': config.eval_episodes,
        'window': config.window,
    }
    return values


def apply_overrides(config: ExperimentConfig, overrides: Mapping[str, Any]) -> ExperimentConfig:
    """Apply dotted ``section.key`` overrides; ``None`` values are skipped."""
    values = _flatten(config)
    for key, value in overrides.items():
        if value is not None:
            _apply(values, key, value)
    return _build(values)


def _format_text(value: str) -> str:
    if (
        value != value.strip()
        or value.lower() in ('none', 'null', '')
        or value[:1] in ('"', "'")
        or any(c in value for c in '#\n\r')
    ):
        return repr(value)
    return value


def _format(value: Any) -> str:
    if hasattr(value, 'value'):
        return str(value.value)
    if isinstance(value, (tuple, list)):
        return ', '.join(_format(v) for v in value)
    if isinstance(value, str):
        return value
    return repr(value)


def dump_config(config: ExperimentConfig) -> str:
    """Snapshot of every effective setting; ``parse_config(dump_config(c)) == c``."""
    values = _flatten(config)
    lines = [f'env.name = {config.env_name}']
    for section in ('experiment', 'env', 'agent'):
        for key, value in sorted(values[section].items()):
            if section == 'env' and key == 'name':
                continue
            if value is None:
                text = 'none'
            elif f'{section}.{key}' in TEXT_KEYS:
                text = _format_text(str(value))
            else:
                text = _format(value)
            lines.append(f'{section}.{key} = {text}')
    return '\n'.join(lines) + '\n'
