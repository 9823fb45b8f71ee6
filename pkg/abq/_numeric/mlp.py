import enum
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from .._errors import DimensionError, ProtocolError

DTYPE = np.float64


class Activation(enum.Enum):
    RELU = 'relu'
    IDENTITY = 'identity'


class Layer(NamedTuple):
    weights: np.ndarray  # (in, out)
    bias: np.ndarray  # (out,)
    activation: Activation

    @property
    def input_width(self) -> int:
        return self.weights.shape[0]

    @property
    def output_width(self) -> int:
        return self.weights.shape[1]


class MlpParams(NamedTuple):
    layers: Tuple[Layer, ...]

    @property
    def input_width(self) -> int:
        return self.layers[0].input_width

    @property
    def output_width(self) -> int:
        return self.layers[-1].output_width

    @property
    def widths(self) -> Tuple[int, ...]:
        return (self.input_width,) + tuple(layer.output_width for layer in self.layers)

    def arrays(self) -> List[np.ndarray]:
        arrays = []
        for layer in self.layers:
            arrays.append(layer.weights)
            arrays.append(layer.bias)
        return arrays

    def with_arrays(self, arrays: Sequence[np.ndarray]) -> 'MlpParams':
        arrays = list(arrays)
        if len(arrays) != 2 * len(self.layers):
            raise DimensionError(
                f'Expected {2 * len(self.layers)} arrays, got {len(arrays)}'
            )
        layers = []
        for k, layer in enumerate(self.layers):
            weights = np.asarray(arrays[2 * k], dtype=DTYPE)
            bias = np.asarray(arrays[2 * k + 1], dtype=DTYPE)
            if weights.shape != layer.weights.shape or bias.shape != layer.bias.shape:
                raise DimensionError(
                    f'Layer {k}: expected shapes {layer.weights.shape}/{layer.bias.shape}, '
                    f'got {weights.shape}/{bias.shape}',
                    layer=k,
                )
            layers.append(Layer(weights, bias, layer.activation))
        return MlpParams(tuple(layers))

    def validate(self) -> 'MlpParams':
        if not self.layers:
            raise DimensionError('A network needs at least one layer')
        for k, layer in enumerate(self.layers):
            if layer.weights.ndim != 2 or layer.bias.shape != (layer.output_width,):
                raise DimensionError(f'Layer {k}: bias does not match weights', layer=k)
            if k and self.layers[k - 1].output_width != layer.input_width:
                raise DimensionError(
                    f'Layer {k} expects {layer.input_width} inputs, '
                    f'layer {k - 1} produces {self.layers[k - 1].output_width}',
                    layer=k,
                )
        return self


def init_mlp(
    widths: Sequence[int],
    rng: np.random.Generator,
    output_activation: Activation = Activation.IDENTITY,
) -> MlpParams:
    """Uniform +-sqrt(6 / (fan_in + fan_out)) weights, zero biases, relu between layers."""
    layers = []
    last = len(widths) - 2
    for k, (fan_in, fan_out) in enumerate(zip(widths[:-1], widths[1:])):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights = rng.uniform(-limit, limit, size=(fan_in, fan_out))
        activation = output_activation if k == last else Activation.RELU
        layers.append(Layer(weights, np.zeros(fan_out, dtype=DTYPE), activation))
    return MlpParams(tuple(layers)).validate()


def zeros_mlp(
    widths: Sequence[int],
    output_activation: Activation = Activation.IDENTITY,
) -> MlpParams:
    layers = []
    last = len(widths) - 2
    for k, (fan_in, fan_out) in enumerate(zip(widths[:-1], widths[1:])):
        activation = output_activation if k == last else Activation.RELU
        layers.append(
            Layer(
                np.zeros((fan_in, fan_out), dtype=DTYPE),
                np.zeros(fan_out, dtype=DTYPE),
                activation,
            )
        )
    return MlpParams(tuple(layers)).validate()


def mlp_forward(params: MlpParams, inputs: np.ndarray) -> List[np.ndarray]:
    """Return every activation, input first and network output last."""
    x = np.asarray(inputs, dtype=DTYPE)
    if x.ndim != 2:
        raise DimensionError(f'Expected a (batch, features) matrix, got shape {x.shape}', layer=0)

    activations = [x]
    for k, layer in enumerate(params.layers):
        if x.shape[1] != layer.input_width:
            raise DimensionError(
                f'Layer {k} expects {layer.input_width} inputs, got {x.shape[1]}', layer=k
            )
        z = x @ layer.weights + layer.bias
        x = np.maximum(z, 0.0) if layer.activation is Activation.RELU else z
        activations.append(x)
    return activations


def mlp_backward(
    params: MlpParams,
    activations: Sequence[np.ndarray],
    grad_output: np.ndarray,
) -> Tuple[MlpParams, np.ndarray]:
    """Reverse-mode pass; returns parameter gradients and the gradient w.r.t. the input."""
    if len(activations) != len(params.layers) + 1:
        raise ProtocolError(
            f'Expected {len(params.layers) + 1} activations, got {len(activations)}'
        )

    grad = np.asarray(grad_output, dtype=DTYPE)
    if grad.shape != activations[-1].shape:
        raise DimensionError(
            f'Output gradient shape {grad.shape} does not match output {activations[-1].shape}',
            layer=len(params.layers) - 1,
        )

    grads = [None] * len(params.layers)
    for k in reversed(range(len(params.layers))):
        layer = params.layers[k]
        if layer.activation is Activation.RELU:
            grad = grad * (activations[k + 1] > 0.0)
        grads[k] = Layer(activations[k].T @ grad, grad.sum(axis=0), layer.activation)
        grad = grad @ layer.weights.T

    return MlpParams(tuple(grads)), grad


def param_arrays(params) -> List[np.ndarray]:
    if isinstance(params, np.ndarray):
        return [params]
    return params.arrays()


def replace_arrays(params, arrays: Sequence[np.ndarray]):
    if isinstance(params, np.ndarray):
        (array,) = arrays
        return array
    return params.with_arrays(arrays)
