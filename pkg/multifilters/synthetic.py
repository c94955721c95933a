from typing import Tuple

import numpy as np

from multifilters.image2d import ImageBuffer


def star_field(
    shape: Tuple[int, int] = (512, 512),
    n_stars: int = 200,
    peak: int = 65535,
    seed: int = 42,
    sky_level: float = 0.08,
    max_sigma: float = 3.0,
) -> ImageBuffer:
    """
    Integer-valued plate-like test image: Gaussian stars on a smooth sky gradient.

    Star amplitudes follow a steep power law so that, as on a scanned plate,
    most stars sit just above the background and a few saturate.
    """
    rng = np.random.default_rng(seed)
    height, width = shape
    rows, cols = np.mgrid[0:height, 0:width].astype(np.float64)

    sky = sky_level * peak * (1 + 0.5 * rows / height + 0.25 * np.sin(np.pi * cols / width))

    centres = rng.uniform((0, 0), (height, width), size=(n_stars, 2))
    sigmas = rng.uniform(0.6, max_sigma, size=n_stars)
    amplitudes = peak * np.minimum(1.0, 0.02 * rng.pareto(1.5, size=n_stars) + 0.01)

    stars = np.zeros(shape)
    for (row, col), sigma, amplitude in zip(centres, sigmas, amplitudes):
        # only the 5-sigma neighbourhood contributes
        r0, r1 = max(0, int(row - 5 * sigma)), min(height, int(row + 5 * sigma) + 1)
        c0, c1 = max(0, int(col - 5 * sigma)), min(width, int(col + 5 * sigma) + 1)
        stars[r0:r1, c0:c1] += amplitude * np.exp(
            -((rows[r0:r1, c0:c1] - row) ** 2 + (cols[r0:r1, c0:c1] - col) ** 2) / (2 * sigma ** 2)
        )

    return ImageBuffer(np.clip(np.rint(sky + stars), 0, peak), peak=peak)
