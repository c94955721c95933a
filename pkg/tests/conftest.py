from pathlib import Path
from typing import Dict, Sequence

import numpy as np
import pytest

from multifilters.filterbank import FILTER_REGISTRY, get_filter

REPO_ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(params=list(FILTER_REGISTRY))
def kernel(request):
    return get_filter(request.param)


@pytest.fixture(params=['haar-multi', 'db4-multi', 'ghm'])
def multifilter(request):
    return get_filter(request.param)


def fits_card(key: str, value: str = None) -> bytes:
    card = key.ljust(8) + ('' if value is None else '= ' + value.rjust(20))
    return card.ljust(80).encode('ascii')


def build_fits(
    cards: Dict[str, str],
    data: bytes,
    end: bool = True,
) -> bytes:
    header = b''.join(fits_card(key, value) for key, value in cards.items())
    if end:
        header += fits_card('END')
    header += b' ' * (-len(header) % 2880)
    return header + data + b'\0' * (-len(data) % 2880)


def fits_image_cards(bitpix: int, shape: Sequence[int], **extra: str) -> Dict[str, str]:
    height, width = shape
    return {
        'SIMPLE': 'T',
        'BITPIX': str(bitpix),
        'NAXIS': '2',
        'NAXIS1': str(width),
        'NAXIS2': str(height),
        **extra,
    }


@pytest.fixture
def fits_fixture(tmp_path):
    """2x2 BITPIX 16 plate holding [[0, 1], [2, 3]]"""
    path = tmp_path / 'fixture.fits'
    path.write_bytes(build_fits(
        fits_image_cards(16, (2, 2)),
        np.array([0, 1, 2, 3], dtype='>i2').tobytes(),
    ))
    return path


@pytest.fixture
def plate_fits(tmp_path, rng):
    """32x32 unsigned 16-bit plate stored with BZERO = 32768"""
    values = rng.integers(0, 65536, size=(32, 32))
    path = tmp_path / 'plate.fits'
    path.write_bytes(build_fits(
        fits_image_cards(16, values.shape, BZERO='32768', BSCALE='1'),
        (values - 32768).astype('>i2').tobytes(),
    ))
    return path, values
