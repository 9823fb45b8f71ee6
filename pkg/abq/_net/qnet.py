import hashlib
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from .._errors import ConfigError, DimensionError
from .._numeric.mlp import (
    Activation,
    MlpParams,
    init_mlp,
    mlp_backward,
    mlp_forward,
    zeros_mlp,
)

# trunk widths followed by the head width
DEFAULT_WIDTHS = (256, 128, 64)


class BranchingNetParams(NamedTuple):
    trunk: MlpParams
    value_head: MlpParams
    branch_heads: Tuple[MlpParams, ...]

    @property
    def state_dim(self) -> int:
        return self.trunk.input_width

    @property
    def n(self) -> int:
        return len(self.branch_heads)

    @property
    def N(self) -> int:
        return self.branch_heads[0].output_width

    @property
    def widths(self) -> Tuple[int, ...]:
        return self.trunk.widths[1:] + (self.value_head.widths[1],)

    def arrays(self) -> List[np.ndarray]:
        arrays = self.trunk.arrays() + self.value_head.arrays()
        for head in self.branch_heads:
            arrays.extend(head.arrays())
        return arrays

    def with_arrays(self, arrays: Sequence[np.ndarray]) -> 'BranchingNetParams':
        arrays = list(arrays)
        expected = len(self.arrays())
        if len(arrays) != expected:
            raise DimensionError(f'Expected {expected} arrays, got {len(arrays)}')

        def take(mlp: MlpParams) -> MlpParams:
            count = 2 * len(mlp.layers)
            chunk = arrays[:count]
            del arrays[:count]
            return mlp.with_arrays(chunk)

        trunk = take(self.trunk)
        value_head = take(self.value_head)
        branch_heads = tuple(take(head) for head in self.branch_heads)
        return BranchingNetParams(trunk, value_head, branch_heads)


class NetworkCache(NamedTuple):
    trunk: List[np.ndarray]
    value: List[np.ndarray]
    branches: List[List[np.ndarray]]


class NetworkOutput(NamedTuple):
    values: np.ndarray  # (batch,)
    advantages: np.ndarray  # (batch, n, N)
    cache: NetworkCache

    @property
    def evaluations(self) -> int:
        """Sub-action advantages computed per state."""
        return self.advantages.shape[-2] * self.advantages.shape[-1]


def _layout(state_dim: int, n: int, N: int, widths: Sequence[int]):
    widths = tuple(int(w) for w in widths)
    for name, value in (('state_dim', state_dim), ('n', n), ('N', N)):
        if int(value) < 1:
            raise ConfigError(f'{name} must be positive, got {value}')
    if len(widths) < 2 or min(widths) < 1:
        raise ConfigError(f'Widths must hold at least two positive sizes, got {widths}')

    trunk = (int(state_dim),) + widths[:-1]
    value = (widths[-2], widths[-1], 1)
    branch = (widths[-2], widths[-1], int(N))
    return trunk, value, branch


def init_network(
    state_dim: int,
    n: int,
    N: int,
    widths: Sequence[int] = DEFAULT_WIDTHS,
    seed: int = 0,
) -> BranchingNetParams:
    trunk, value, branch = _layout(state_dim, n, N, widths)
    rng = np.random.default_rng(seed)
    return BranchingNetParams(
        trunk=init_mlp(trunk, rng, output_activation=Activation.RELU),
        value_head=init_mlp(value, rng),
        branch_heads=tuple(init_mlp(branch, rng) for _ in range(n)),
    )


def zeros_network(
    state_dim: int,
    n: int,
    N: int,
    widths: Sequence[int] = DEFAULT_WIDTHS,
) -> BranchingNetParams:
    trunk, value, branch = _layout(state_dim, n, N, widths)
    return BranchingNetParams(
        trunk=zeros_mlp(trunk, output_activation=Activation.RELU),
        value_head=zeros_mlp(value),
        branch_heads=tuple(zeros_mlp(branch) for _ in range(n)),
    )


def evaluate(net: BranchingNetParams, states: np.ndarray) -> NetworkOutput:
    """One shared trunk pass, then the value head and every branch head on the same features."""
    trunk = mlp_forward(net.trunk, states)
    features = trunk[-1]
    value = mlp_forward(net.value_head, features)
    branches = [mlp_forward(head, features) for head in net.branch_heads]

    return NetworkOutput(
        values=value[-1][:, 0],
        advantages=np.stack([acts[-1] for acts in branches], axis=1),
        cache=NetworkCache(trunk=trunk, value=value, branches=branches),
    )


def network_backward(
    net: BranchingNetParams,
    cache: NetworkCache,
    grad_values: np.ndarray,
    grad_advantages: np.ndarray,
) -> BranchingNetParams:
    grad_values = np.asarray(grad_values, dtype=np.float64)
    grad_advantages = np.asarray(grad_advantages, dtype=np.float64)
    batch = cache.trunk[0].shape[0]
    if grad_values.shape != (batch,) or grad_advantages.shape != (batch, net.n, net.N):
        raise DimensionError(
            f'Gradient shapes {grad_values.shape}/{grad_advantages.shape} '
            f'do not match a batch of {batch}'
        )

    value_grads, grad_features = mlp_backward(net.value_head, cache.value, grad_values[:, None])
    branch_grads = []
    for i, head in enumerate(net.branch_heads):
        head_grads, grad_input = mlp_backward(head, cache.branches[i], grad_advantages[:, i, :])
        branch_grads.append(head_grads)
        grad_features = grad_features + grad_input

    trunk_grads, _ = mlp_backward(net.trunk, cache.trunk, grad_features)
    return BranchingNetParams(trunk_grads, value_grads, tuple(branch_grads))


def joint_action_count(n: int, N: int) -> int:
    """Exact size of the joint action space, ``N ** n``."""
    if int(n) < 1 or int(N) < 1:
        raise ConfigError(f'n and N must be positive, got n={n}, N={N}')
    return int(N) ** int(n)


def params_digest(net) -> str:
    digest = hashlib.sha256()
    for array in net.arrays():
        digest.update(np.ascontiguousarray(array, dtype='<f8').tobytes())
    return digest.hexdigest()
