import math
from dataclasses import dataclass
from typing import Union

import numpy as np
import pandas as pd

from multifilters.image2d import ImageBuffer, SubbandPyramid

ImageLike = Union[ImageBuffer, np.ndarray]

BENCH_COLUMNS = ('level', 'filter', 'mse', 'psnr_db')


class DimensionMismatchError(ValueError):
    ...


@dataclass(frozen=True)
class MetricsReport:
    mse: float
    psnr_db: float
    peak: float
    width: int
    height: int


def _samples(x: Union[ImageLike, SubbandPyramid]) -> np.ndarray:
    if isinstance(x, ImageBuffer):
        return x.samples
    if isinstance(x, SubbandPyramid):
        return x.plane
    return np.asarray(x, dtype=np.float64)


def _pair(x: ImageLike, y: ImageLike):
    x, y = _samples(x), _samples(y)
    if x.shape != y.shape:
        raise DimensionMismatchError(f"cannot compare images of shape {x.shape} and {y.shape}")
    return x, y


def mse(x: ImageLike, y: ImageLike) -> float:
    x, y = _pair(x, y)
    return float(np.mean(np.square(x - y)))


def psnr_from_mse(mse_value: float, peak: float = 255) -> float:
    if peak <= 0:
        raise ValueError(f"peak must be positive, got {peak}")
    if mse_value == 0:
        return math.inf
    return 10 * math.log10(peak ** 2 / mse_value)


def psnr(x: ImageLike, y: ImageLike, peak: float = 255) -> float:
    """10 log10(peak^2 / MSE) in dB, +inf for identical images."""
    return psnr_from_mse(mse(x, y), peak)


def energy(x: Union[ImageLike, SubbandPyramid]) -> float:
    return float(np.sum(np.square(_samples(x))))


def compare(x: ImageLike, y: ImageLike, peak: float = 255) -> MetricsReport:
    error = mse(x, y)
    height, width = _samples(x).shape
    return MetricsReport(mse=error, psnr_db=psnr_from_mse(error, peak), peak=peak, width=width, height=height)


def subband_energies(pyr: SubbandPyramid) -> pd.DataFrame:
    return pd.DataFrame(
        [(block.level, block.label, energy(pyr.block(block))) for block in pyr.channel_map],
        columns=['level', 'label', 'energy'],
    )


def coding_gain_db(pyr: SubbandPyramid) -> float:
    """
    Transform coding gain of a pyramid in dB.

    Ratio of the size-weighted arithmetic mean of subband variances to their
    size-weighted geometric mean. Zero-variance subbands are left out of the
    geometric mean; an all-flat pyramid has 0 dB gain.
    """
    weights, variances = np.asarray([
        (block.height * block.width, np.var(pyr.block(block)))
        for block in pyr.channel_map
    ]).T
    weights = weights / weights.sum()

    active = variances > 0
    if not active.any():
        return 0.0

    arithmetic = float(np.sum(weights * variances))
    geometric = float(np.exp(np.sum(weights[active] * np.log(variances[active])) / weights[active].sum()))
    return 10 * math.log10(arithmetic / geometric)


def bench_frame(rows) -> pd.DataFrame:
    return pd.DataFrame(rows, columns=list(BENCH_COLUMNS))
