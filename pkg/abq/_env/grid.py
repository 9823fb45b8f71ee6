from typing import Sequence, Tuple

import numpy as np

from .._errors import ConfigError, DimensionError, ValidationError

DEFAULT_BINS = 25


class ActionGrid:
    """Uniform per-dimension discretization of a box of continuous controls."""

    def __init__(self, lows: Sequence[float], highs: Sequence[float], bins: Sequence[int]):
        lows = tuple(float(v) for v in lows)
        highs = tuple(float(v) for v in highs)
        bins = tuple(int(v) for v in bins)

        if not (len(lows) == len(highs) == len(bins)) or not lows:
            raise ConfigError('Grid needs matching, non-empty lows, highs and bins')
        for i, (low, high, count) in enumerate(zip(lows, highs, bins)):
            if not low < high:
                raise ConfigError(f'Dimension {i}: low {low} must be below high {high}')
            if count < 2:
                raise ConfigError(f'Dimension {i}: need at least 2 bins, got {count}')

        self.lows = lows
        self.highs = highs
        self.bins = bins

    @classmethod
    def uniform(
        cls, dims: int, low: float, high: float, bins: int = DEFAULT_BINS
    ) -> 'ActionGrid':
        if int(dims) < 1:
            raise ConfigError(f'Grid needs at least one dimension, got {dims}')
        return cls((low,) * dims, (high,) * dims, (bins,) * dims)

    @property
    def dims(self) -> int:
        return len(self.bins)

    @property
    def is_rectangular(self) -> bool:
        return len(set(self.bins)) == 1

    @property
    def sub_actions(self) -> int:
        if not self.is_rectangular:
            raise ConfigError(f'Grid is not rectangular: bins {self.bins}')
        return self.bins[0]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.dims, self.sub_actions

    def values(self, i: int) -> np.ndarray:
        return self.decode_dimension(i, np.arange(self.bins[i]))

    def decode_dimension(self, i: int, index) -> np.ndarray:
        t = np.asarray(index, dtype=np.float64) / (self.bins[i] - 1)
        # lerp form keeps both endpoints exact
        return (1.0 - t) * self.lows[i] + t * self.highs[i]

    def decode(self, indices) -> np.ndarray:
        indices = np.asarray(indices)
        if indices.shape != (self.dims,):
            raise DimensionError(f'Expected {self.dims} sub-action indices, got {indices.shape}')
        if not np.issubdtype(indices.dtype, np.integer):
            raise ValidationError(f'Sub-action indices must be integers, got {indices.dtype}')
        if np.any(indices < 0) or np.any(indices >= np.asarray(self.bins)):
            raise ValidationError(f'Sub-action indices out of range: {indices.tolist()}')
        return np.array([self.decode_dimension(i, indices[i]) for i in range(self.dims)])

    def __repr__(self):
        return f'ActionGrid(lows={self.lows}, highs={self.highs}, bins={self.bins})'


def action_decode(indices, grid: ActionGrid) -> np.ndarray:
    return grid.decode(indices)
