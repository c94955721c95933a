"""
Readers for scanned-plate images: a primary-HDU FITS subset and binary PGM.
"""
import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Tuple, Union

import numpy as np

from multifilters.image2d import ImageBuffer

log = logging.getLogger(__name__)

FITS_BLOCK = 2880
FITS_CARD = np.dtype([('key', 'S8'), ('value', 'S72')])
FITS_DTYPES = {8: np.dtype('>u1'), 16: np.dtype('>i2')}
FITS_PEAKS = {8: 255, 16: 65535}

PGM_HEADER = re.compile(
    rb'P5(?:\s|#[^\n]*\n)+(\d+)(?:\s|#[^\n]*\n)+(\d+)(?:\s|#[^\n]*\n)+(\d+)\s'
)

PathLike = Union[str, Path]


class FitsError(ValueError):
    ...


class MissingSimpleError(FitsError):
    ...


class MissingEndError(FitsError):
    ...


class UnsupportedBitpixError(FitsError):
    ...


class NaxisError(FitsError):
    ...


class TruncatedDataError(FitsError):
    ...


class PgmFormatError(ValueError):
    ...


@dataclass(frozen=True)
class FitsHeader:
    bitpix: int
    naxis: int
    naxis1: int
    naxis2: int
    bscale: float = 1.0
    bzero: float = 0.0

    @property
    def data_bytes(self) -> int:
        return self.naxis1 * self.naxis2 * abs(self.bitpix) // 8


def _card_value(raw: bytes) -> str:
    """Value part of a keyword card: columns 11-80 up to the comment separator."""
    value = raw.decode('ascii', errors='replace')
    if not value.startswith('= '):
        return ''
    value = value[2:]
    if value.lstrip().startswith("'"):
        return value.strip().split("'")[1].rstrip()
    return value.split('/', 1)[0].strip()


def _parse_cards(data: bytes) -> Tuple[Dict[str, str], int]:
    """Keyword values of the primary header and the byte offset of its data unit."""
    if data[:8] != b'SIMPLE  ':
        raise MissingSimpleError("file does not start with a SIMPLE card")

    cards: Dict[str, str] = {}
    offset = 0
    while True:
        block = data[offset:offset + FITS_BLOCK]
        if len(block) < FITS_BLOCK:
            raise MissingEndError(f"header ended after {offset + len(block)} bytes without an END card")

        records = np.frombuffer(block, dtype=FITS_CARD)
        for index, (key, value) in enumerate(zip(records['key'], records['value'])):
            key = key.decode('ascii', errors='replace').rstrip()
            if offset == 0 and index == 0 and (key != 'SIMPLE' or _card_value(value) != 'T'):
                raise MissingSimpleError("first header card must be SIMPLE = T")
            if key == 'END':
                return cards, offset + FITS_BLOCK
            cards.setdefault(key, _card_value(value))
        offset += FITS_BLOCK


def _number(cards: Dict[str, str], key: str, kind: Callable[[str], Union[int, float]]):
    text = cards[key]
    if kind is float:
        # Fortran-style exponents are legal in fixed-format real values
        text = text.replace('D', 'E')
    try:
        return kind(text)
    except ValueError:
        expected = 'an integer' if kind is int else 'a number'
        raise FitsError(f"{key} card holds {cards[key]!r}, expected {expected}") from None


def read_fits_header(data: bytes) -> Tuple[FitsHeader, int]:
    cards, data_offset = _parse_cards(data)

    def integer(key: str) -> int:
        if key not in cards:
            raise (NaxisError if key.startswith('NAXIS') else FitsError)(f"missing {key} card")
        return _number(cards, key, int)

    bitpix = integer('BITPIX')
    if bitpix not in FITS_DTYPES:
        raise UnsupportedBitpixError(f"BITPIX = {bitpix} is not supported, expected one of {list(FITS_DTYPES)}")

    if (naxis := integer('NAXIS')) != 2:
        raise NaxisError(f"NAXIS = {naxis}, only 2D images are supported")

    naxis1, naxis2 = integer('NAXIS1'), integer('NAXIS2')
    if min(naxis1, naxis2) < 1:
        raise NaxisError(f"NAXIS1 = {naxis1}, NAXIS2 = {naxis2} must both be at least 1")

    header = FitsHeader(
        bitpix=bitpix,
        naxis=naxis,
        naxis1=naxis1,
        naxis2=naxis2,
        bscale=_number(cards, 'BSCALE', float) if 'BSCALE' in cards else 1.0,
        bzero=_number(cards, 'BZERO', float) if 'BZERO' in cards else 0.0,
    )
    return header, data_offset


def read_fits(path: PathLike) -> ImageBuffer:
    """
    Primary HDU of a FITS file as an image, NAXIS1 being the width.

    Physical values are bscale * raw + bzero; peak is 255 for BITPIX 8 and
    65535 for BITPIX 16.
    """
    data = Path(path).read_bytes()
    header, offset = read_fits_header(data)

    if len(data) - offset < header.data_bytes:
        raise TruncatedDataError(
            f"{path}: data unit holds {len(data) - offset} bytes, "
            f"NAXIS1 x NAXIS2 x BITPIX needs {header.data_bytes}"
        )

    raw = np.frombuffer(data, dtype=FITS_DTYPES[header.bitpix], count=header.naxis1 * header.naxis2, offset=offset)
    samples = header.bscale * raw.astype(np.float64).reshape(header.naxis2, header.naxis1) + header.bzero

    log.info(f"read {header.naxis1}x{header.naxis2} BITPIX {header.bitpix} image from {path}")
    return ImageBuffer(samples, peak=FITS_PEAKS[header.bitpix])


def read_pgm(path: PathLike) -> ImageBuffer:
    data = Path(path).read_bytes()

    if not data.startswith(b'P5'):
        raise PgmFormatError(f"{path}: not a binary PGM (magic {data[:2]!r})")
    if (match := PGM_HEADER.match(data)) is None:
        raise PgmFormatError(f"{path}: malformed PGM header")

    width, height, maxval = map(int, match.groups())
    if not 0 < maxval <= 65535:
        raise PgmFormatError(f"{path}: maxval {maxval} outside 1..65535")

    dtype = np.dtype('u1' if maxval < 256 else '>u2')
    if len(data) - match.end() < width * height * dtype.itemsize:
        raise PgmFormatError(f"{path}: truncated pixel data")

    samples = np.frombuffer(data, dtype=dtype, count=width * height, offset=match.end())
    return ImageBuffer(samples.reshape(height, width).astype(np.float64), peak=255 if maxval < 256 else 65535)


READERS = {
    '.fits': read_fits,
    '.fit': read_fits,
    '.fts': read_fits,
    '.pgm': read_pgm,
}


def read_image(path: PathLike) -> ImageBuffer:
    try:
        reader = READERS[Path(path).suffix.lower()]
    except KeyError:
        raise ValueError(f"{path}: unknown image type, expected one of {', '.join(READERS)}") from None
    return reader(path)
