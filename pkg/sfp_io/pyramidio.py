"""
Pyramid container: fixed little-endian header, float64 coefficient plane,
plain-text channel map trailer.
"""
from pathlib import Path
from typing import Union

import numpy as np

from multifilters.image2d import SubbandBlock, SubbandPyramid

MAGIC = b'MWPYRv01'
HEADER = np.dtype([
    ('magic', 'S8'),
    ('width', '<u4'),
    ('height', '<u4'),
    ('levels', '<u4'),
    ('r', '<u4'),
    ('filter', 'S16'),
])
PLANE_DTYPE = np.dtype('<f8')


class PyramidFormatError(ValueError):
    ...


def write_pyramid(pyr: SubbandPyramid, path: Union[str, Path]):
    if len(name := pyr.filter_name.encode('ascii')) > HEADER['filter'].itemsize:
        raise PyramidFormatError(f"filter name {pyr.filter_name!r} does not fit the header")

    height, width = pyr.shape
    header = np.array([(MAGIC, width, height, pyr.levels, pyr.multiplicity, name)], dtype=HEADER)
    trailer = ''.join(block.to_line() + '\n' for block in pyr.channel_map)

    with open(path, 'wb') as f:
        f.write(header.tobytes())
        f.write(pyr.plane.astype(PLANE_DTYPE).tobytes())
        f.write(trailer.encode('utf-8'))


def read_pyramid(path: Union[str, Path]) -> SubbandPyramid:
    data = Path(path).read_bytes()

    if len(data) < HEADER.itemsize:
        raise PyramidFormatError(f"{path}: too short for a pyramid header")

    header = np.frombuffer(data, dtype=HEADER, count=1)[0]
    if header['magic'] != MAGIC:
        raise PyramidFormatError(f"{path}: bad magic {header['magic']!r}, expected {MAGIC!r}")

    height, width = int(header['height']), int(header['width'])
    plane_end = HEADER.itemsize + height * width * PLANE_DTYPE.itemsize
    if len(data) < plane_end:
        raise PyramidFormatError(f"{path}: coefficient plane truncated")

    plane = np.frombuffer(data, dtype=PLANE_DTYPE, count=height * width, offset=HEADER.itemsize)

    try:
        channel_map = tuple(
            SubbandBlock.from_line(line)
            for line in data[plane_end:].decode('utf-8').splitlines()
            if line.strip()
        )
    except (UnicodeDecodeError, ValueError, TypeError) as e:
        raise PyramidFormatError(f"{path}: unreadable channel map trailer") from e

    return SubbandPyramid(
        plane=plane.reshape(height, width).astype(np.float64),
        levels=int(header['levels']),
        filter_name=header['filter'].decode('ascii'),
        multiplicity=int(header['r']),
        channel_map=channel_map,
    )
