from typing import NamedTuple, Tuple

import numpy as np

from .._errors import DimensionError
from .mlp import param_arrays, replace_arrays

DEFAULT_LR = 1e-4
DEFAULT_BETA1 = 0.9
DEFAULT_BETA2 = 0.999
DEFAULT_EPS = 1e-8


class AdamState(NamedTuple):
    first_moment: Tuple[np.ndarray, ...]
    second_moment: Tuple[np.ndarray, ...]
    step: int = 0
    beta1: float = DEFAULT_BETA1
    beta2: float = DEFAULT_BETA2
    eps: float = DEFAULT_EPS

    @classmethod
    def create(
        cls,
        params,
        beta1: float = DEFAULT_BETA1,
        beta2: float = DEFAULT_BETA2,
        eps: float = DEFAULT_EPS,
    ) -> 'AdamState':
        arrays = param_arrays(params)
        return cls(
            first_moment=tuple(np.zeros_like(a) for a in arrays),
            second_moment=tuple(np.zeros_like(a) for a in arrays),
            step=0,
            beta1=beta1,
            beta2=beta2,
            eps=eps,
        )


def adam_step(params, grads, state: AdamState, lr: float = DEFAULT_LR):
    """Bias-corrected adaptive-moment update. Returns ``(params', state')``; inputs untouched."""
    values = param_arrays(params)
    gradients = param_arrays(grads)

    if not (len(values) == len(gradients) == len(state.first_moment)):
        raise DimensionError(
            f'Parameter/gradient/state counts differ: '
            f'{len(values)}/{len(gradients)}/{len(state.first_moment)}'
        )

    step = state.step + 1
    correction1 = 1.0 - state.beta1**step
    correction2 = 1.0 - state.beta2**step

    new_values, new_m, new_v = [], [], []
    for k, (p, g, m, v) in enumerate(
        zip(values, gradients, state.first_moment, state.second_moment)
    ):
        if not (p.shape == g.shape == m.shape == v.shape):
            raise DimensionError(
                f'Array {k}: parameter {p.shape}, gradient {g.shape}, moment {m.shape}',
                layer=k,
            )
        m = state.beta1 * m + (1.0 - state.beta1) * g
        v = state.beta2 * v + (1.0 - state.beta2) * (g * g)
        update = lr * (m / correction1) / (np.sqrt(v / correction2) + state.eps)
        new_values.append(p - update)
        new_m.append(m)
        new_v.append(v)

    new_state = state._replace(
        first_moment=tuple(new_m),
        second_moment=tuple(new_v),
        step=step,
    )
    return replace_arrays(params, new_values), new_state
