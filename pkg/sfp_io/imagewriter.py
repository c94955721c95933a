"""
Binary PGM (P5) writer for reconstructed plates.
"""
import logging
from pathlib import Path
from typing import Union

import numpy as np

from multifilters.image2d import ImageBuffer

log = logging.getLogger(__name__)


def round_half_away(samples: np.ndarray) -> np.ndarray:
    return np.sign(samples) * np.floor(np.abs(samples) + 0.5)


def write_pgm(img: ImageBuffer, path: Union[str, Path]) -> int:
    """
    Write `img` as P5 with maxval = img.peak (1 byte per sample for 255,
    2 bytes big-endian for 65535).

    Samples are rounded half away from zero and clamped to [0, peak]; the
    number of clamped samples is returned.
    """
    rounded = round_half_away(img.samples)
    n_clamped = int(np.count_nonzero((rounded < 0) | (rounded > img.peak)))
    if n_clamped:
        log.warning(f"{path}: clamped {n_clamped} samples to [0, {img.peak}]")

    pixels = np.clip(rounded, 0, img.peak).astype('u1' if img.peak == 255 else '>u2')

    with open(path, 'wb') as f:
        f.write(f'P5\n{img.width} {img.height}\n{img.peak}\n'.encode('ascii'))
        f.write(pixels.tobytes())

    return n_clamped
