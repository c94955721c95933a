"""
Critically sampled 1D analysis/synthesis with periodic boundaries.

Signals are numpy arrays; the sample axis is the last one unless `axis` is
given, so whole image rows or columns are transformed in a single call.
Vector signals carry their r components on a trailing axis of length r.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, NamedTuple, Sequence, Union

import numpy as np

from multifilters.filterbank import Kernel, MultiFilterBank

log = logging.getLogger(__name__)


class OddLengthError(ValueError):
    ...


class SignalTooShortError(ValueError):
    ...


class ChannelMismatchError(ValueError):
    ...


class LevelsExceededError(ValueError):
    ...


@dataclass(frozen=True)
class VectorSignal:
    """n samples of r-vectors, stored as an array of shape (n, r)."""
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2 or len(data) < 1:
            raise ValueError(f"vector signal must have shape (n >= 1, r), got {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ValueError("vector signal contains non-finite samples")
        object.__setattr__(self, 'data', data)

    @property
    def r(self) -> int:
        return self.data.shape[1]

    def __len__(self) -> int:
        return len(self.data)


@dataclass(frozen=True)
class Coeffs1D:
    approx: VectorSignal
    detail: VectorSignal

    def __post_init__(self):
        if self.approx.data.shape != self.detail.data.shape:
            raise ChannelMismatchError(
                f"approx {self.approx.data.shape} and detail {self.detail.data.shape} channels differ"
            )


class ScalarCoeffs(NamedTuple):
    approx: np.ndarray
    detail: np.ndarray


class Decomposition(NamedTuple):
    """details[0] is the finest level; approx is the coarsest approximation."""
    details: List[Union[np.ndarray, VectorSignal]]
    approx: Union[np.ndarray, VectorSignal]


def vectorize(x: np.ndarray, r: int = 2) -> VectorSignal:
    x = np.asarray(x, dtype=np.float64)
    if len(x) % r:
        raise OddLengthError(f"length must be even, got {len(x)}")
    return VectorSignal(x.reshape(-1, r))


def devectorize(v: VectorSignal) -> np.ndarray:
    return v.data.reshape(-1)


def _windows(n: int, n_taps: int) -> np.ndarray:
    """(n/2, M) periodic input indices (2i + k) mod n of every output sample"""
    return (2 * np.arange(n // 2)[:, None] + np.arange(n_taps)) % n


def _check_vector_length(n: int, n_taps: int):
    if n % 2:
        raise OddLengthError(f"length must be even, got {n} vectors")
    if n < n_taps:
        raise SignalTooShortError(f"signal of {n} vectors is shorter than the {n_taps} filter taps")


def _analyze(v: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """out[..., i, :] = sum_k taps[k] @ v[..., (2i + k) mod n, :]"""
    idx = _windows(v.shape[-2], len(taps))
    out = np.zeros(v.shape[:-2] + (len(idx), taps.shape[-1]))
    for k, tap in enumerate(taps):
        out += v[..., idx[:, k], :] @ tap.T
    return out


def _synthesize(coeffs: np.ndarray, taps: np.ndarray) -> np.ndarray:
    """Adjoint of `_analyze`: out[..., (2i + k) mod n, :] += taps[k]^T @ coeffs[..., i, :]"""
    n = 2 * coeffs.shape[-2]
    idx = _windows(n, len(taps))
    out = np.zeros(coeffs.shape[:-2] + (n, taps.shape[-1]))
    for k, tap in enumerate(taps):
        # for a fixed k the indices idx[:, k] are distinct, so no scatter-add is needed
        out[..., idx[:, k], :] += coeffs @ tap
    return out


def analyze_vec(v: VectorSignal, bank: MultiFilterBank) -> Coeffs1D:
    bank = bank.as_bank()
    if v.r != bank.multiplicity:
        raise ChannelMismatchError(f"{v.r}-vector signal given to an r = {bank.multiplicity} bank")
    _check_vector_length(len(v), bank.n_taps)

    return Coeffs1D(
        approx=VectorSignal(_analyze(v.data, bank.lowpass_taps)),
        detail=VectorSignal(_analyze(v.data, bank.highpass_taps)),
    )


def synthesize_vec(c: Coeffs1D, bank: MultiFilterBank) -> VectorSignal:
    bank = bank.as_bank()
    if c.approx.data.shape != c.detail.data.shape:
        raise ChannelMismatchError(
            f"approx {c.approx.data.shape} and detail {c.detail.data.shape} channels differ"
        )
    if c.approx.r != bank.multiplicity:
        raise ChannelMismatchError(f"{c.approx.r}-vector coefficients given to an r = {bank.multiplicity} bank")

    return VectorSignal(
        _synthesize(c.approx.data, bank.lowpass_taps) + _synthesize(c.detail.data, bank.highpass_taps)
    )


def analysis_step(x: np.ndarray, kernel: Kernel, axis: int = -1) -> ScalarCoeffs:
    """
    One analysis level along `axis` of a scalar-sample array.

    The axis is paired into r-vectors (x[2n], x[2n+1]) for r = 2, filtered, and
    the vector outputs are laid back out as scalar samples, so approx and
    detail each have half the samples along `axis`.
    """
    bank = kernel.as_bank()
    r = bank.multiplicity

    x = np.moveaxis(np.asarray(x, dtype=np.float64), axis, -1)
    if x.shape[-1] % r:
        raise OddLengthError(f"length must be even, got {x.shape[-1]}")
    v = x.reshape(x.shape[:-1] + (-1, r))
    _check_vector_length(v.shape[-2], bank.n_taps)

    approx, detail = (
        np.moveaxis(_analyze(v, taps).reshape(x.shape[:-1] + (-1,)), -1, axis)
        for taps in (bank.lowpass_taps, bank.highpass_taps)
    )
    return ScalarCoeffs(approx, detail)


def synthesis_step(approx: np.ndarray, detail: np.ndarray, kernel: Kernel, axis: int = -1) -> np.ndarray:
    bank = kernel.as_bank()
    r = bank.multiplicity

    if np.shape(approx) != np.shape(detail):
        raise ChannelMismatchError(f"approx {np.shape(approx)} and detail {np.shape(detail)} channels differ")

    a, d = (np.moveaxis(np.asarray(c, dtype=np.float64), axis, -1) for c in (approx, detail))
    if a.shape[-1] % r:
        raise OddLengthError(f"coefficient length {a.shape[-1]} is not a multiple of r = {r}")

    a, d = (c.reshape(c.shape[:-1] + (-1, r)) for c in (a, d))
    x = _synthesize(a, bank.lowpass_taps) + _synthesize(d, bank.highpass_taps)

    return np.moveaxis(x.reshape(x.shape[:-2] + (-1,)), -1, axis)


def analyze_scalar(x: np.ndarray, f: Kernel) -> ScalarCoeffs:
    """a[n] = sum_k c_k x[(2n + k) mod len], d[n] = sum_k d_k x[(2n + k) mod len]"""
    return analysis_step(x, f)


def synthesize_scalar(c: ScalarCoeffs, f: Kernel) -> np.ndarray:
    return synthesis_step(c.approx, c.detail, f)


def max_levels(n: int, kernel: Kernel) -> int:
    """Largest number of analysis levels a length-n signal supports with this kernel."""
    bank = kernel.as_bank()
    r, levels = bank.multiplicity, 0
    while n % r == 0 and (n // r) % 2 == 0 and n // r >= bank.n_taps:
        levels += 1
        n //= 2
    return levels


def check_levels(n: int, kernel: Kernel, levels: int):
    if levels < 1:
        raise LevelsExceededError(f"levels must be at least 1, got {levels}")
    if levels > (feasible := max_levels(n, kernel)):
        raise LevelsExceededError(
            f"a length {n} signal supports at most {feasible} levels with {kernel.name}, {levels} requested"
        )


def multilevel(
    x: Union[np.ndarray, VectorSignal],
    kernel: Kernel,
    levels: int
) -> Decomposition:
    """
    Recursive analysis of the approximation channel.

    Scalar arrays are paired into vectors at every level when the kernel is a
    multifilter, so details and approx are returned as scalar-sample arrays.
    A VectorSignal is transformed as given and yields VectorSignals.
    """
    if isinstance(x, VectorSignal):
        check_levels(len(x) * x.r, kernel, levels)
        details, approx = [], x
        for _ in range(levels):
            coeffs = analyze_vec(approx, kernel)
            approx = coeffs.approx
            details.append(coeffs.detail)
        return Decomposition(details, approx)

    x = np.asarray(x, dtype=np.float64)
    check_levels(x.shape[-1], kernel, levels)

    details, approx = [], x
    for level in range(levels):
        approx, detail = analysis_step(approx, kernel)
        details.append(detail)
        log.debug(f"level {level + 1}: approx {approx.shape}")
    return Decomposition(details, approx)


def multilevel_inverse(decomposition: Decomposition, kernel: Kernel) -> Union[np.ndarray, VectorSignal]:
    details: Sequence = decomposition.details
    approx = decomposition.approx

    if isinstance(approx, VectorSignal):
        for detail in reversed(details):
            approx = synthesize_vec(Coeffs1D(approx, detail), kernel)
        return approx

    for detail in reversed(details):
        approx = synthesis_step(approx, detail, kernel)
    return approx

