"""
Baseline algebra of the dueling branches.

Advantage tables have shape ``(..., n, N)``: one row per action branch, one
column per sub-action, with any number of leading batch axes. A state value
has shape ``(...)`` and a baseline has shape ``(...)`` or, for per-branch
modes, ``(..., n)``.
"""
import enum

import numpy as np

from .._errors import ConfigError, DimensionError, ProtocolError

MODE_ALIASES = {
    'abq': 'abq_max_mean',
    'bdq': 'bdq_branch_mean',
    'gmax': 'global_max',
    'gmean': 'global_mean',
}


class BaselineMode(enum.Enum):
    ABQ_MAX_MEAN = 'abq_max_mean'
    BDQ_BRANCH_MEAN = 'bdq_branch_mean'
    NONE = 'none'
    GLOBAL_MAX = 'global_max'
    GLOBAL_MEAN = 'global_mean'

    @classmethod
    def parse(cls, value) -> 'BaselineMode':
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        key = MODE_ALIASES.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise ConfigError(f'Unknown baseline mode: {value!r}') from None

    @property
    def per_branch(self) -> bool:
        return self is BaselineMode.BDQ_BRANCH_MEAN


def _check_table(advantages: np.ndarray) -> np.ndarray:
    advantages = np.asarray(advantages, dtype=np.float64)
    if advantages.ndim < 2 or advantages.shape[-1] == 0 or advantages.shape[-2] == 0:
        raise DimensionError(f'Advantage table must be (..., n, N), got {advantages.shape}')
    return advantages


def baseline(advantages: np.ndarray, mode: BaselineMode) -> np.ndarray:
    advantages = _check_table(advantages)
    if mode is BaselineMode.ABQ_MAX_MEAN:
        return advantages.mean(axis=-1).max(axis=-1)
    if mode is BaselineMode.BDQ_BRANCH_MEAN:
        return advantages.mean(axis=-1)
    if mode is BaselineMode.NONE:
        return np.zeros(advantages.shape[:-2])
    if mode is BaselineMode.GLOBAL_MAX:
        return advantages.max(axis=(-2, -1))
    if mode is BaselineMode.GLOBAL_MEAN:
        return advantages.mean(axis=(-2, -1))
    raise ConfigError(f'Unsupported baseline mode: {mode!r}')


def baseline_grad(advantages: np.ndarray, grad_baseline: np.ndarray, mode: BaselineMode):
    """Pull ``dL/dB`` back to ``dL/dA``. Max modes route the subgradient to the lowest winner."""
    advantages = _check_table(advantages)
    grad_baseline = np.asarray(grad_baseline, dtype=np.float64)
    n, N = advantages.shape[-2:]
    batch_shape = advantages.shape[:-2]

    expected = advantages.shape[:-1] if mode.per_branch else batch_shape
    if grad_baseline.shape != expected:
        raise ProtocolError(
            f'Baseline gradient shape {grad_baseline.shape} does not fit mode {mode.value}'
        )

    if mode is BaselineMode.NONE:
        return np.zeros_like(advantages)
    if mode is BaselineMode.BDQ_BRANCH_MEAN:
        return np.broadcast_to(grad_baseline[..., None] / N, advantages.shape).copy()
    if mode is BaselineMode.GLOBAL_MEAN:
        return np.broadcast_to(grad_baseline[..., None, None] / (n * N), advantages.shape).copy()

    flat = advantages.reshape(-1, n, N)
    grad_flat = grad_baseline.reshape(-1)
    grad = np.zeros_like(flat)
    rows = np.arange(flat.shape[0])
    if mode is BaselineMode.ABQ_MAX_MEAN:
        winners = flat.mean(axis=-1).argmax(axis=-1)
        grad[rows, winners, :] = grad_flat[:, None] / N
    elif mode is BaselineMode.GLOBAL_MAX:
        winners = flat.reshape(flat.shape[0], -1).argmax(axis=-1)
        grad[rows, winners // N, winners % N] = grad_flat
    else:
        raise ConfigError(f'Unsupported baseline mode: {mode!r}')
    return grad.reshape(advantages.shape)


def compose_q(values, advantages, baselines, mode: BaselineMode) -> np.ndarray:
    """Tuned Q table: ``Q(i, j) = V + A(i, j) - B``."""
    advantages = _check_table(advantages)
    values = np.asarray(values, dtype=np.float64)
    baselines = np.asarray(baselines, dtype=np.float64)
    batch_shape = advantages.shape[:-2]

    if values.shape != batch_shape:
        raise ProtocolError(f'State value shape {values.shape} does not match {batch_shape}')

    if mode.per_branch:
        if baselines.shape != advantages.shape[:-1]:
            raise ProtocolError(
                f'Mode {mode.value} needs per-branch baselines {advantages.shape[:-1]}, '
                f'got {baselines.shape}'
            )
        offset = baselines[..., None]
    else:
        if baselines.shape != batch_shape:
            raise ProtocolError(
                f'Mode {mode.value} needs a scalar baseline per state, got {baselines.shape}'
            )
        offset = baselines[..., None, None]

    return values[..., None, None] + advantages - offset


def greedy_action(q_values: np.ndarray) -> np.ndarray:
    q_values = _check_table(q_values)
    # np.argmax returns the first maximum, so ties go to the lowest index
    return np.argmax(q_values, axis=-1)
