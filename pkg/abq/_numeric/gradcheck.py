import logging
from typing import Callable, Optional, Tuple

import numpy as np

from .._errors import ConfigError, NumericError
from .mlp import param_arrays, replace_arrays

MIN_STEP = 1e-8
MAX_STEP = 1e-4

# loss evaluations are trusted to about this many ulps of the loss magnitude
ROUNDOFF_ULPS = 100.0

logger = logging.getLogger(__name__)

LossFn = Callable[[object], Tuple[float, object]]


def _finite_loss(loss_fn: LossFn, params) -> float:
    loss = float(loss_fn(params)[0])
    if not np.isfinite(loss):
        raise NumericError(f'Loss is not finite: {loss}')
    return loss


def finite_diff_check(
    loss_fn: LossFn,
    params,
    h: float = 1e-6,
    coordinates: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """
    Compare the analytic gradient returned by ``loss_fn(params) -> (loss, grads)``
    with central differences and return the largest relative error

        |analytic - cd| / max(|analytic|, |cd|, 1e-12)

    over ``coordinates`` randomly chosen parameter entries (all when None).

    Coordinates whose step window straddles a kink (nonzero third difference)
    are skipped, and disagreements below the loss roundoff level count as agreement.
    """
    if not MIN_STEP <= h <= MAX_STEP:
        raise ConfigError(f'Step {h} outside [{MIN_STEP}, {MAX_STEP}]')

    loss, grads = loss_fn(params)
    loss = float(loss)
    if not np.isfinite(loss):
        raise NumericError(f'Loss is not finite: {loss}')

    analytic = np.concatenate([np.ravel(g) for g in param_arrays(grads)])
    arrays = [np.array(a, dtype=np.float64, copy=True) for a in param_arrays(params)]
    offsets = np.cumsum([0] + [a.size for a in arrays])
    total = int(offsets[-1])
    if analytic.size != total:
        raise ConfigError(f'Gradient has {analytic.size} entries, parameters have {total}')

    if coordinates is None or coordinates >= total:
        chosen = np.arange(total)
    else:
        rng = rng if rng is not None else np.random.default_rng(0)
        chosen = np.sort(rng.choice(total, size=coordinates, replace=False))

    def shifted(flat: np.ndarray, index: int, original: float, delta: float) -> float:
        flat[index] = original + delta
        return _finite_loss(loss_fn, replace_arrays(params, arrays))

    worst = 0.0
    skipped = 0
    for coordinate in chosen:
        k = int(np.searchsorted(offsets, coordinate, side='right') - 1)
        index = int(coordinate - offsets[k])
        flat = arrays[k].reshape(-1)
        original = flat[index]

        plus2 = shifted(flat, index, original, 2 * h)
        plus = shifted(flat, index, original, h)
        minus = shifted(flat, index, original, -h)
        minus2 = shifted(flat, index, original, -2 * h)
        flat[index] = original

        scale = max(abs(loss), abs(plus), abs(minus), abs(plus2), abs(minus2), 1e-300)
        roundoff = ROUNDOFF_ULPS * np.finfo(np.float64).eps * scale

        third_upper = plus2 - 3 * plus + 3 * loss - minus
        third_lower = plus - 3 * loss + 3 * minus - minus2
        if max(abs(third_upper), abs(third_lower)) > 8 * roundoff:
            skipped += 1
            continue

        numeric = (plus - minus) / (2 * h)
        a = float(analytic[coordinate])
        if abs(a - numeric) <= roundoff / h:
            continue
        error = abs(a - numeric) / max(abs(a), abs(numeric), 1e-12)
        worst = max(worst, error)

    logger.debug(
        'finite difference check: %d coordinates, %d skipped at kinks, max error %.3e',
        len(chosen),
        skipped,
        worst,
    )
    return worst
