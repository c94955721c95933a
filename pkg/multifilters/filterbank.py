"""
Scalar and matrix (r = 2) orthogonal filter banks.

Ships the two scalar parents (Haar, Daubechies-4), the double-shift
multifilters built from them, and the Geronimo-Hardin-Massopust (GHM)
multifilter, together with the orthogonality check over all even shifts and
the matrix frequency response.
"""
from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from math import sqrt
from typing import Dict, Iterable, Tuple, Union

import numpy as np
import pandas as pd

log = logging.getLogger(__name__)

SCALAR_TOLERANCE = 1e-12


class FilterShapeError(ValueError):
    ...


class NonOrthogonalFilterError(ValueError):
    ...


class UnknownFilterError(ValueError):
    ...


def _frozen(taps) -> np.ndarray:
    array = np.array(taps, dtype=np.float64)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class MultiFilterBank:
    """
    Matrix lowpass taps H_0..H_{M-1} and highpass taps G_0..G_{M-1}.

    Taps are stored as arrays of shape (M, r, r). Shipped multifilters have
    r = 2; scalar filters travel through the same code as r = 1 banks
    (see `ScalarFilter.as_bank`).
    """
    name: str
    lowpass_taps: np.ndarray
    highpass_taps: np.ndarray

    def __post_init__(self):
        low, high = map(_frozen, (self.lowpass_taps, self.highpass_taps))

        if low.ndim != 3 or low.shape[1] != low.shape[2]:
            raise FilterShapeError(f"{self.name}: taps must have shape (M, r, r), got {low.shape}")
        if low.shape != high.shape:
            raise FilterShapeError(
                f"{self.name}: lowpass taps {low.shape} and highpass taps {high.shape} differ"
            )
        if low.shape[0] < 1:
            raise FilterShapeError(f"{self.name}: empty filter bank")

        object.__setattr__(self, 'lowpass_taps', low)
        object.__setattr__(self, 'highpass_taps', high)

    @property
    def multiplicity(self) -> int:
        return self.lowpass_taps.shape[1]

    @property
    def n_taps(self) -> int:
        return self.lowpass_taps.shape[0]

    def as_bank(self) -> MultiFilterBank:
        return self


@dataclass(frozen=True)
class ScalarFilter:
    """Orthonormal scalar wavelet filter; the highpass is the alternating flip of the lowpass."""
    name: str
    lowpass: np.ndarray
    highpass: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        low = _frozen(self.lowpass)
        if low.ndim != 1 or len(low) < 2 or len(low) % 2:
            raise FilterShapeError(f"{self.name}: need an even number (>= 2) of taps, got {low.shape}")

        object.__setattr__(self, 'lowpass', low)
        object.__setattr__(self, 'highpass', _frozen(alternating_flip(low)))

    @property
    def n_taps(self) -> int:
        return len(self.lowpass)

    @property
    def multiplicity(self) -> int:
        return 1

    def as_bank(self) -> MultiFilterBank:
        return MultiFilterBank(
            name=self.name,
            lowpass_taps=self.lowpass[:, None, None],
            highpass_taps=self.highpass[:, None, None],
        )

    def orthonormality_residual(self) -> float:
        """max_l |sum_k c_k c_{k+2l} - delta_0l|"""
        c = self.lowpass
        return max(
            abs(float(np.dot(c[max(0, -2 * l):len(c) - max(0, 2 * l)],
                             c[max(0, 2 * l):len(c) - max(0, -2 * l)])) - (l == 0))
            for l in range(-(len(c) // 2) + 1, len(c) // 2)
        )

    def dc_residual(self) -> float:
        return abs(float(self.lowpass.sum()) - sqrt(2))

    def is_orthonormal(self, tolerance: float = SCALAR_TOLERANCE) -> bool:
        return self.orthonormality_residual() <= tolerance and self.dc_residual() <= tolerance


Kernel = Union[ScalarFilter, MultiFilterBank]


def alternating_flip(lowpass: np.ndarray) -> np.ndarray:
    """d_k = (-1)^k c_{L-1-k}"""
    lowpass = np.asarray(lowpass, dtype=np.float64)
    return lowpass[::-1] * (-1.0) ** np.arange(len(lowpass))


def haar_scalar() -> ScalarFilter:
    return ScalarFilter(name='haar', lowpass=[sqrt(2) / 2, sqrt(2) / 2])


def db4_scalar() -> ScalarFilter:
    s3, norm = sqrt(3), 4 * sqrt(2)
    return ScalarFilter(
        name='db4',
        lowpass=[(1 + s3) / norm, (3 + s3) / norm, (3 - s3) / norm, (1 - s3) / norm],
    )


def double_shift_multifilter(base: ScalarFilter) -> MultiFilterBank:
    """
    Build an r = 2 multifilter from an orthonormal scalar filter.

    Tap m has first row (c_{2m}, c_{2m+1}) and second row (c_{2m-2}, c_{2m-1}),
    giving M = L/2 + 1 taps; scalar indices outside 0..L-1 contribute zero.
    The highpass taps are built the same way from d_k.
    """
    if not base.is_orthonormal():
        raise NonOrthogonalFilterError(
            f"{base.name} is not an orthonormal scalar filter "
            f"(orthonormality residual {base.orthonormality_residual():.3e}, "
            f"DC residual {base.dc_residual():.3e})"
        )

    def shifted_rows(taps: np.ndarray) -> np.ndarray:
        # pad one pair of zeros on both ends so row 2 of tap m reads c_{2m-2}, c_{2m-1}
        pairs = np.concatenate((np.zeros(2), taps, np.zeros(2))).reshape(-1, 2)
        return np.stack((pairs[1:], pairs[:-1]), axis=1)

    return MultiFilterBank(
        name=f'{base.name}-multi',
        lowpass_taps=shifted_rows(base.lowpass),
        highpass_taps=shifted_rows(base.highpass),
    )


def ghm_multifilter() -> MultiFilterBank:
    """Geronimo-Hardin-Massopust multifilter, normalized so that sum_k H_k H_k^T = I."""
    s2 = sqrt(2)
    lowpass = [
        [[3 / (5 * s2), 4 / 5], [-1 / 20, -3 / (10 * s2)]],
        [[3 / (5 * s2), 0], [9 / 20, 1 / s2]],
        [[0, 0], [9 / 20, -3 / (10 * s2)]],
        [[0, 0], [-1 / 20, 0]],
    ]
    highpass = [
        [[-1 / 20, -3 / (10 * s2)], [1 / (10 * s2), 3 / 10]],
        [[9 / 20, -1 / s2], [-9 / (10 * s2), 0]],
        [[9 / 20, -3 / (10 * s2)], [9 / (10 * s2), -3 / 10]],
        [[-1 / 20, 0], [-1 / (10 * s2), 0]],
    ]
    return MultiFilterBank(name='ghm', lowpass_taps=lowpass, highpass_taps=highpass)


@dataclass(frozen=True)
class ShiftResidual:
    shift: int
    residual_HH: float
    residual_GG: float
    residual_HG: float


@dataclass(frozen=True)
class OrthogonalityReport:
    name: str
    max_residual_HH: float
    max_residual_GG: float
    max_residual_HG: float
    tolerance: float
    shifts: Tuple[ShiftResidual, ...] = ()

    @property
    def passed(self) -> bool:
        return max(self.max_residual_HH, self.max_residual_GG, self.max_residual_HG) <= self.tolerance

    def to_frame(self) -> pd.DataFrame:
        """One row per shift: filter, shift, residual_HH, residual_GG, residual_HG"""
        frame = pd.DataFrame([vars(shift) for shift in self.shifts])
        frame.insert(0, 'filter', self.name)
        return frame


def _shifted_correlation(a: np.ndarray, b: np.ndarray, shift: int) -> np.ndarray:
    """sum_k A_k B_{k+2l}^T with out-of-range taps treated as zero"""
    n = len(a)
    lo, hi = max(0, -2 * shift), min(n, n - 2 * shift)
    if lo >= hi:
        return np.zeros(a.shape[1:])
    return np.einsum('kij,klj->il', a[lo:hi], b[lo + 2 * shift:hi + 2 * shift])


def verify_orthogonality(bank: Kernel, tolerance: float) -> OrthogonalityReport:
    """
    Residuals of sum_k H_k H_{k+2l}^T = delta_0l I, sum_k G_k G_{k+2l}^T = delta_0l I and
    sum_k H_k G_{k+2l}^T = 0 over all shifts |l| < M.
    """
    if tolerance <= 0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")

    bank = bank.as_bank()
    h, g = bank.lowpass_taps, bank.highpass_taps
    identity = np.eye(bank.multiplicity)

    shifts = tuple(
        ShiftResidual(
            shift=l,
            residual_HH=float(np.abs(_shifted_correlation(h, h, l) - (l == 0) * identity).max()),
            residual_GG=float(np.abs(_shifted_correlation(g, g, l) - (l == 0) * identity).max()),
            residual_HG=float(np.abs(_shifted_correlation(h, g, l)).max()),
        )
        for l in range(-(bank.n_taps - 1), bank.n_taps)
    )

    report = OrthogonalityReport(
        name=bank.name,
        max_residual_HH=max(s.residual_HH for s in shifts),
        max_residual_GG=max(s.residual_GG for s in shifts),
        max_residual_HG=max(s.residual_HG for s in shifts),
        tolerance=tolerance,
        shifts=shifts,
    )
    log.debug(f"{bank.name}: orthogonality passed={report.passed}")
    return report


def response_matrices(bank: Kernel, omegas: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """H(w) = sum_k H_k e^{-ikw} and G(w) likewise, shape (len(omegas), r, r), complex."""
    bank = bank.as_bank()
    phases = np.exp(-1j * np.outer(omegas, np.arange(bank.n_taps)))
    return (
        np.einsum('wk,kij->wij', phases, bank.lowpass_taps),
        np.einsum('wk,kij->wij', phases, bank.highpass_taps),
    )


def frequency_response(bank: Kernel, n_points: int) -> pd.DataFrame:
    """
    Entrywise magnitudes of H(w) and G(w) for n_points values of w spaced uniformly on [0, pi].

    Columns: omega, component (H or G), row, col, magnitude; rows ordered by
    omega, then component, then matrix entry in row-major order.
    """
    if n_points < 2:
        raise ValueError(f"n_points must be at least 2, got {n_points}")

    omegas = np.linspace(0.0, np.pi, n_points)
    r = bank.multiplicity
    rows, cols = np.divmod(np.arange(r * r), r)

    magnitudes = np.stack([np.abs(m).reshape(n_points, r * r) for m in response_matrices(bank, omegas)], axis=1)

    return pd.DataFrame({
        'omega': np.repeat(omegas, 2 * r * r),
        'component': np.tile(np.repeat(['H', 'G'], r * r), n_points),
        'row': np.tile(rows, 2 * n_points),
        'col': np.tile(cols, 2 * n_points),
        'magnitude': magnitudes.reshape(-1),
    })


def haar_multifilter() -> MultiFilterBank:
    return double_shift_multifilter(haar_scalar())


def db4_multifilter() -> MultiFilterBank:
    return double_shift_multifilter(db4_scalar())


# name -> constructor for library use; the CLI builds the same banks from conf/filters/*.yaml
FILTER_REGISTRY: Dict[str, Callable[[], Kernel]] = {
    'haar': haar_scalar,
    'db4': db4_scalar,
    'haar-multi': haar_multifilter,
    'db4-multi': db4_multifilter,
    'ghm': ghm_multifilter,
}


def unknown_filter(name: str, valid: Iterable[str]) -> UnknownFilterError:
    return UnknownFilterError(f"unknown filter {name!r}, valid names are: {', '.join(valid)}")


def get_filter(name: str) -> Kernel:
    try:
        return FILTER_REGISTRY[name]()
    except KeyError:
        raise unknown_filter(name, FILTER_REGISTRY) from None
