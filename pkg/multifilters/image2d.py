"""
Separable multilevel 2D decomposition into an in-place subband pyramid.

Each level filters the rows, then the columns, of the current LL region. A
scalar filter splits every axis into [L | H]; an r = 2 multifilter splits it
into [L1 | L2 | H1 | H2], so one level yields 4 (scalar) or 16 (multifilter)
sub-blocks. Recursion continues on the whole low-low region.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from itertools import product
from typing import Tuple

import numpy as np

from multifilters.filterbank import Kernel
from multifilters.transform1d import analysis_step, max_levels, synthesis_step

log = logging.getLogger(__name__)

PEAK_VALUES = (255, 65535)


class ImageShapeError(ValueError):
    ...


class FilterMismatchError(ValueError):
    ...


class LayoutMismatchError(ValueError):
    ...


class KeepLevelsError(ValueError):
    ...


@dataclass(frozen=True)
class ImageBuffer:
    """Grayscale raster of shape (height, width) with a declared peak value."""
    samples: np.ndarray
    peak: int = 255

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 2:
            raise ImageShapeError(f"expected a 2D raster, got shape {samples.shape}")
        if not np.all(np.isfinite(samples)):
            raise ImageShapeError("image contains non-finite samples")
        if self.peak not in PEAK_VALUES:
            raise ValueError(f"peak must be one of {PEAK_VALUES}, got {self.peak}")
        object.__setattr__(self, 'samples', samples)

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    def crop_even(self) -> ImageBuffer:
        """Drop one trailing row and/or column so both dimensions are even."""
        return replace(self, samples=self.samples[:self.height - self.height % 2, :self.width - self.width % 2])


@dataclass(frozen=True)
class SubbandBlock:
    level: int
    label: str
    row: int
    col: int
    height: int
    width: int

    @property
    def is_detail(self) -> bool:
        return not self.label.startswith('LL')

    @property
    def slices(self) -> Tuple[slice, slice]:
        return slice(self.row, self.row + self.height), slice(self.col, self.col + self.width)

    def to_line(self) -> str:
        return f'{self.level} {self.label} {self.row} {self.col} {self.height} {self.width}'

    @classmethod
    def from_line(cls, line: str) -> SubbandBlock:
        level, label, *extent = line.split()
        return cls(int(level), label, *map(int, extent))


ChannelMap = Tuple[SubbandBlock, ...]


@dataclass(frozen=True)
class SubbandPyramid:
    plane: np.ndarray
    levels: int
    filter_name: str
    multiplicity: int
    channel_map: ChannelMap

    @property
    def shape(self) -> Tuple[int, int]:
        return self.plane.shape

    def block(self, block: SubbandBlock) -> np.ndarray:
        return self.plane[block.slices]


def _axis_channels(n: int, r: int):
    """(band, component, offset, size) of the channels one level lays out along an axis of length n"""
    size = n // (2 * r)
    return [
        (band, component, (b * r + c) * size, size)
        for b, band in enumerate('LH')
        for c, component in enumerate(range(1, r + 1) if r > 1 else [''])
    ]


def build_channel_map(shape: Tuple[int, int], levels: int, r: int) -> ChannelMap:
    """Sub-block layout of a pyramid; level 1 is the finest, LL blocks only appear at `levels`."""
    blocks = []
    height, width = shape
    for level in range(1, levels + 1):
        for (v_band, v_comp, row, h), (h_band, h_comp, col, w) in product(
            _axis_channels(height, r), _axis_channels(width, r)
        ):
            label = f'{v_band}{h_band}{v_comp}{h_comp}'
            if label.startswith('LL') and level != levels:
                continue
            blocks.append(SubbandBlock(level, label, row, col, h, w))
        height, width = height // 2, width // 2
    return tuple(blocks)


def _layout_order(n: int, r: int) -> np.ndarray:
    """Permutation taking a natural [a | d] axis to [a1 | a2 | d1 | d2] component blocks."""
    return np.concatenate([
        np.arange(start + component, start + n // 2, r)
        for start in (0, n // 2)
        for component in range(r)
    ])


def _to_layout(natural: np.ndarray, r: int) -> np.ndarray:
    rows, cols = (_layout_order(n, r) for n in natural.shape)
    return natural[np.ix_(rows, cols)]


def _from_layout(region: np.ndarray, r: int) -> np.ndarray:
    rows, cols = (np.argsort(_layout_order(n, r)) for n in region.shape)
    return region[np.ix_(rows, cols)]


def max_levels_2d(shape: Tuple[int, int], kernel: Kernel) -> int:
    return min(max_levels(n, kernel) for n in shape)


def decompose2d(img: ImageBuffer, kernel: Kernel, levels: int) -> SubbandPyramid:
    feasible = max_levels_2d(img.samples.shape, kernel)
    if feasible == 0:
        raise ImageShapeError(
            f"a {img.width}x{img.height} image is too small for even one level with {kernel.name} "
            f"({kernel.n_taps} taps, multiplicity {kernel.multiplicity})"
        )
    if not 1 <= levels <= feasible:
        raise ImageShapeError(
            f"a {img.width}x{img.height} image supports 1..{feasible} levels with {kernel.name}, "
            f"{levels} requested"
        )

    r = kernel.multiplicity
    plane = img.samples.copy()
    approx = plane

    for level in range(1, levels + 1):
        height, width = approx.shape
        low, high = analysis_step(approx, kernel, axis=1)
        (ll, hl), (lh, hh) = (analysis_step(band, kernel, axis=0) for band in (low, high))

        plane[:height, :width] = _to_layout(np.block([[ll, lh], [hl, hh]]), r)
        approx = ll
        log.debug(f"level {level}: {height}x{width} region split, LL now {ll.shape}")

    return SubbandPyramid(
        plane=plane,
        levels=levels,
        filter_name=kernel.name,
        multiplicity=r,
        channel_map=build_channel_map(plane.shape, levels, r),
    )


def reconstruct2d(pyr: SubbandPyramid, kernel: Kernel, peak: int = 255) -> ImageBuffer:
    if (pyr.filter_name, pyr.multiplicity) != (kernel.name, kernel.multiplicity):
        raise FilterMismatchError(
            f"pyramid was built with {pyr.filter_name} (r = {pyr.multiplicity}), "
            f"cannot reconstruct with {kernel.name} (r = {kernel.multiplicity})"
        )
    if pyr.channel_map != build_channel_map(pyr.shape, pyr.levels, pyr.multiplicity):
        raise LayoutMismatchError(f"channel map does not describe a {pyr.levels}-level {pyr.filter_name} pyramid")

    r = pyr.multiplicity
    approx = None
    for level in range(pyr.levels, 0, -1):
        height, width = (n >> (level - 1) for n in pyr.shape)
        natural = _from_layout(pyr.plane[:height, :width], r)

        ll, lh, hl, hh = (
            natural[rows, cols]
            for rows, cols in product((slice(0, height // 2), slice(height // 2, None)),
                                      (slice(0, width // 2), slice(width // 2, None)))
        )
        if approx is not None:
            ll = approx

        low, high = (synthesis_step(a, d, kernel, axis=0) for a, d in ((ll, hl), (lh, hh)))
        approx = synthesis_step(low, high, kernel, axis=1)

    return ImageBuffer(approx, peak=peak)


def approx_only(pyr: SubbandPyramid, keep_levels: int) -> SubbandPyramid:
    """Copy of the pyramid with every detail block of levels 1..keep_levels zeroed."""
    if not 1 <= keep_levels <= pyr.levels:
        raise KeepLevelsError(f"keep_levels must lie in 1..{pyr.levels}, got {keep_levels}")

    plane = pyr.plane.copy()
    for block in pyr.channel_map:
        if block.is_detail and block.level <= keep_levels:
            plane[block.slices] = 0.0

    return replace(pyr, plane=plane)
