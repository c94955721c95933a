import numpy as np
import pytest
from numpy.testing import assert_array_equal

from conftest import build_fits, fits_image_cards
from multifilters.filterbank import get_filter
from multifilters.image2d import ImageBuffer, decompose2d
from multifilters.synthetic import star_field
from sfp_io.imagereader import (
    FitsError,
    MissingEndError,
    MissingSimpleError,
    NaxisError,
    PgmFormatError,
    TruncatedDataError,
    UnsupportedBitpixError,
    read_fits,
    read_image,
    read_pgm,
)
from sfp_io.imagewriter import round_half_away, write_pgm
from sfp_io.pyramidio import MAGIC, PyramidFormatError, read_pyramid, write_pyramid


def test_read_fits_fixture(fits_fixture):
    img = read_fits(fits_fixture)
    assert (img.width, img.height, img.peak) == (2, 2, 65535)
    assert_array_equal(img.samples, [[0, 1], [2, 3]])


def test_read_fits_bzero(plate_fits):
    path, values = plate_fits
    img = read_image(path)
    assert_array_equal(img.samples, values)
    assert img.samples.min() >= 0


def test_bzero_maps_most_negative_raw_to_zero(tmp_path):
    path = tmp_path / 'offset.fits'
    path.write_bytes(build_fits(
        fits_image_cards(16, (1, 2), BZERO='32768'),
        np.array([-32768, 32767], dtype='>i2').tobytes(),
    ))
    assert_array_equal(read_fits(path).samples, [[0, 65535]])


def test_read_fits_8_bit(tmp_path):
    path = tmp_path / 'byte.fits'
    path.write_bytes(build_fits(fits_image_cards(8, (2, 3)), bytes(range(6))))
    img = read_fits(path)
    assert img.peak == 255
    assert_array_equal(img.samples, [[0, 1, 2], [3, 4, 5]])


def test_unsupported_bitpix(tmp_path):
    path = tmp_path / 'float.fits'
    path.write_bytes(build_fits(fits_image_cards(32, (2, 2)), np.zeros(4, dtype='>i4').tobytes()))
    with pytest.raises(UnsupportedBitpixError):
        read_fits(path)


def test_missing_end(tmp_path):
    path = tmp_path / 'noend.fits'
    path.write_bytes(build_fits(fits_image_cards(16, (2, 2)), np.zeros(4, dtype='>i2').tobytes(), end=False))
    with pytest.raises(MissingEndError):
        read_fits(path)


def test_missing_simple(tmp_path):
    path = tmp_path / 'plain.fits'
    path.write_bytes(b'hello world')
    with pytest.raises(MissingSimpleError):
        read_fits(path)


def test_three_axes(tmp_path):
    path = tmp_path / 'cube.fits'
    path.write_bytes(build_fits({**fits_image_cards(16, (2, 2)), 'NAXIS': '3', 'NAXIS3': '2'}, bytes(16)))
    with pytest.raises(NaxisError):
        read_fits(path)


def test_truncated_data(tmp_path):
    path = tmp_path / 'short.fits'
    path.write_bytes(build_fits(fits_image_cards(16, (64, 64)), b''))
    with pytest.raises(TruncatedDataError):
        read_fits(path)


def test_unknown_suffix(tmp_path):
    with pytest.raises(ValueError, match='unknown image type'):
        read_image(tmp_path / 'plate.tiff')


def test_write_pgm_bytes(tmp_path):
    path = tmp_path / 'tiny.pgm'
    n_clamped = write_pgm(ImageBuffer(np.array([[0.0, 1.0], [2.0, 3.0]])), path)
    assert n_clamped == 0
    assert path.read_bytes() == b'P5\n2 2\n255\n\x00\x01\x02\x03'


def test_pgm_16_bit_round_trip(tmp_path):
    path = tmp_path / 'plate.pgm'
    img = star_field(shape=(32, 48), n_stars=10)
    write_pgm(img, path)

    restored = read_pgm(path)
    assert restored.peak == 65535
    assert_array_equal(restored.samples, img.samples)
    assert path.read_bytes().startswith(b'P5\n48 32\n65535\n')


def test_pgm_header_comments(tmp_path):
    path = tmp_path / 'comment.pgm'
    path.write_bytes(b'P5\n# scanned plate\n2 1\n255\n\x07\x09')
    assert_array_equal(read_pgm(path).samples, [[7, 9]])


def test_pgm_bad_maxval(tmp_path):
    path = tmp_path / 'wide.pgm'
    path.write_bytes(b'P5\n1 1\n70000\n\x00\x00\x00')
    with pytest.raises(PgmFormatError, match='maxval'):
        read_pgm(path)


def test_pgm_not_binary(tmp_path):
    path = tmp_path / 'ascii.pgm'
    path.write_bytes(b'P2\n1 1\n255\n0\n')
    with pytest.raises(PgmFormatError):
        read_pgm(path)


def test_rounding_and_clamping(tmp_path):
    assert_array_equal(round_half_away(np.array([0.5, 1.5, -0.5, 2.4])), [1, 2, -1, 2])

    path = tmp_path / 'clamped.pgm'
    n_clamped = write_pgm(ImageBuffer(np.array([[-3.0, 12.5], [254.6, 300.0]])), path)
    assert n_clamped == 2
    assert_array_equal(read_pgm(path).samples, [[0, 13], [255, 255]])


def test_pyramid_round_trip(tmp_path, multifilter, rng):
    pyramid = decompose2d(ImageBuffer(rng.uniform(0, 255, size=(32, 16))), multifilter, 2)
    path = tmp_path / 'plate.mwp'
    write_pyramid(pyramid, path)

    restored = read_pyramid(path)
    assert path.read_bytes()[:8] == MAGIC
    assert (restored.levels, restored.filter_name, restored.multiplicity) == (2, multifilter.name, 2)
    assert restored.channel_map == pyramid.channel_map
    assert_array_equal(restored.plane, pyramid.plane)


def test_pyramid_bad_magic(tmp_path):
    path = tmp_path / 'plate.mwp'
    write_pyramid(decompose2d(ImageBuffer(np.zeros((8, 8))), get_filter('haar'), 1), path)
    path.write_bytes(b'NOTAPYR!' + path.read_bytes()[8:])
    with pytest.raises(PyramidFormatError, match='bad magic'):
        read_pyramid(path)


def test_pyramid_truncated_plane(tmp_path):
    path = tmp_path / 'plate.mwp'
    write_pyramid(decompose2d(ImageBuffer(np.zeros((8, 8))), get_filter('haar'), 1), path)
    path.write_bytes(path.read_bytes()[:100])
    with pytest.raises(PyramidFormatError, match='truncated'):
        read_pyramid(path)


@pytest.mark.parametrize('card, value', [
    ('BITPIX', '16.'),
    ('NAXIS1', 'two'),
    ('BSCALE', '1.0.0'),
    ('BZERO', 'T'),
])
def test_malformed_number_names_the_card(tmp_path, card, value):
    cards = fits_image_cards(16, (2, 2), BSCALE='1', BZERO='0')
    cards[card] = value
    path = tmp_path / 'malformed.fits'
    path.write_bytes(build_fits(cards, np.zeros(4, dtype='>i2').tobytes()))

    with pytest.raises(FitsError, match=f'{card} card holds'):
        read_fits(path)


def test_fortran_exponent_in_bscale(tmp_path):
    path = tmp_path / 'fortran.fits'
    path.write_bytes(build_fits(
        fits_image_cards(16, (1, 2), BSCALE='1.0D0', BZERO='3.2768D4'),
        np.array([-32768, 0], dtype='>i2').tobytes(),
    ))
    assert_array_equal(read_fits(path).samples, [[0, 32768]])
