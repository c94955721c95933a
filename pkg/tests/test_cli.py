import numpy as np
import pandas as pd
import pytest
from hydra import compose, initialize_config_dir
from hydra.utils import instantiate
from numpy.testing import assert_array_equal

from conftest import REPO_ROOT
from multifilters.cli import StageError, run
from multifilters.filterbank import FILTER_REGISTRY, get_filter
from multifilters.image2d import ImageBuffer
from multifilters.synthetic import star_field
from sfp_io.imagereader import read_pgm
from sfp_io.imagewriter import write_pgm
from utils.conf_helpers import add_resolvers


@pytest.fixture
def run_command(tmp_path, monkeypatch):
    add_resolvers()
    monkeypatch.chdir(tmp_path)

    def _run(*overrides: str) -> int:
        with initialize_config_dir(config_dir=str(REPO_ROOT / 'conf'), version_base=None):
            cfg = compose(config_name='sfp_multifilters', overrides=list(overrides))
        return run(cfg)

    return _run


def test_verify_passes(run_command):
    assert run_command('command=verify') == 0


def test_verify_fails_on_non_orthonormal_bank(run_command):
    # unit-norm taps whose sum is 1.4 rather than sqrt(2)
    skewed = (
        "+filters.skewed={_target_:'multifilters.filterbank.ScalarFilter',"
        "name:skewed,lowpass:[0.8,0.6],_convert_:all}"
    )
    assert run_command('command=verify', skewed) == 1


def test_verify_writes_shift_table(run_command, tmp_path):
    output = tmp_path / 'verify.csv'
    assert run_command('command=verify', f"output='{output}'") == 0

    table = pd.read_csv(output)
    assert list(table.columns) == ['filter', 'shift', 'residual_HH', 'residual_GG', 'residual_HG']
    assert table['filter'].unique().tolist() == list(FILTER_REGISTRY)
    assert len(table) == sum(2 * get_filter(name).as_bank().n_taps - 1 for name in FILTER_REGISTRY)
    assert (table[['residual_HH', 'residual_GG', 'residual_HG']] < 1e-10).all(axis=None)


def test_filter_conf_builds_registry_banks():
    with initialize_config_dir(config_dir=str(REPO_ROOT / 'conf'), version_base=None):
        cfg = compose(config_name='sfp_multifilters')

    assert list(cfg.filters) == list(FILTER_REGISTRY)
    for name in FILTER_REGISTRY:
        built, expected = instantiate(cfg.filters[name]).as_bank(), get_filter(name).as_bank()
        assert built.name == name
        assert_array_equal(built.lowpass_taps, expected.lowpass_taps)
        assert_array_equal(built.highpass_taps, expected.highpass_taps)


def test_unknown_command(run_command):
    with pytest.raises(ValueError, match='unknown command'):
        run_command('command=compress')


def test_freq(run_command, tmp_path):
    output = tmp_path / 'ghm_freq.csv'
    assert run_command('command=freq', 'filter=ghm', 'points=64', f"output='{output}'") == 0

    table = pd.read_csv(output)
    assert list(table.columns) == ['omega', 'component', 'row', 'col', 'magnitude']
    assert len(table) == 64 * 2 * 4
    assert table['row'].min() == 0


def test_freq_to_stdout(run_command, capsys):
    assert run_command('command=freq', 'filter=haar', 'points=8') == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == 'omega,component,row,col,magnitude'
    assert len(lines) == 1 + 8 * 2


def test_freq_takes_one_filter(run_command):
    with pytest.raises(ValueError, match='exactly one filter'):
        run_command('command=freq', 'filter=[haar,ghm]')


def test_bench_constant_image(run_command, tmp_path):
    image = tmp_path / 'flat.pgm'
    write_pgm(ImageBuffer(np.full((32, 32), 100.0)), image)
    output = tmp_path / 'flat_bench.csv'

    status = run_command(
        'command=bench', f"input='{image}'", 'filter=[haar,db4,haar-multi,db4-multi]', 'levels=2',
        f"output='{output}'",
    )
    assert status == 0

    bench = pd.read_csv(output)
    assert list(bench.columns) == ['level', 'filter', 'mse', 'psnr_db']
    assert len(bench) == 4 * 2
    assert (bench['mse'] < 1e-20).all()
    assert (bench['psnr_db'] > 200).all()


def test_bench_plate_experiment(run_command, tmp_path):
    image = tmp_path / 'star.pgm'
    write_pgm(star_field(shape=(512, 512)), image)

    assert run_command('+experiment=plate_512', f"input='{image}'") == 0

    bench = pd.read_csv(tmp_path / 'star_bench_6.csv')
    assert len(bench) == 5 * 6
    assert set(bench['filter']) == set(FILTER_REGISTRY)
    for name, curve in bench.groupby('filter'):
        assert curve['level'].tolist() == list(range(1, 7))
        assert (np.diff(curve['psnr_db']) <= 1e-9).all(), name

    gains = pd.read_csv(tmp_path / 'star_gain_6.csv')
    assert list(gains.columns) == ['level', 'filter', 'coding_gain_db']
    assert len(gains) == 5 * 6


def test_bench_too_many_levels(run_command, tmp_path):
    image = tmp_path / 'star.pgm'
    write_pgm(star_field(shape=(512, 512), n_stars=20), image)

    with pytest.raises(StageError, match='at most 9 levels'):
        run_command('command=bench', f"input='{image}'", 'filter=haar', 'levels=10', 'peak=65535')


def test_bench_rejects_zero_levels(run_command):
    with pytest.raises(ValueError, match='levels'):
        run_command('command=bench', 'levels=0')


def test_missing_input(run_command, tmp_path):
    with pytest.raises(StageError, match='read failed'):
        run_command('command=bench', f"input='{tmp_path / 'absent.fits'}'")


def test_decompose_reconstruct_round_trip(run_command, tmp_path, plate_fits, caplog):
    path, values = plate_fits
    pyramid, restored = tmp_path / 'plate.mwp', tmp_path / 'plate.pgm'

    assert run_command('command=decompose', f"input='{path}'", 'filter=ghm', 'levels=2', f"output='{pyramid}'") == 0
    assert run_command(
        'command=reconstruct', f"input='{pyramid}'", 'filter=ghm', 'peak=65535', f"output='{restored}'"
    ) == 0

    assert_array_equal(read_pgm(restored).samples, values)
    assert 'clamped' not in ' '.join(r.message for r in caplog.records if r.levelname == 'WARNING')


def test_reconstruct_with_other_filter(run_command, tmp_path, fits_fixture):
    pyramid = tmp_path / 'fixture.mwp'
    run_command('command=decompose', f"input='{fits_fixture}'", 'filter=haar', f"output='{pyramid}'")

    with pytest.raises(StageError, match='reconstruct failed'):
        run_command('command=reconstruct', f"input='{pyramid}'", 'filter=db4', f"output='{tmp_path / 'x.pgm'}'")


def test_decompose_is_deterministic(run_command, tmp_path, plate_fits):
    path, _ = plate_fits
    outputs = [tmp_path / 'a.mwp', tmp_path / 'b.mwp']
    for output in outputs:
        run_command('command=decompose', f"input='{path}'", 'filter=db4-multi', 'levels=2', f"output='{output}'")

    assert outputs[0].read_bytes() == outputs[1].read_bytes()


def test_crop_even(run_command, tmp_path):
    image = tmp_path / 'odd.pgm'
    write_pgm(ImageBuffer(np.arange(9 * 17, dtype=float).reshape(9, 17) % 256), image)
    pyramid = tmp_path / 'odd.mwp'

    with pytest.raises(StageError):
        run_command('command=decompose', f"input='{image}'", f"output='{pyramid}'")

    assert run_command('command=decompose', f"input='{image}'", 'crop_even=True', f"output='{pyramid}'") == 0


def test_freq_unknown_filter(run_command):
    with pytest.raises(ValueError, match='valid names are'):
        run_command('command=freq', 'filter=coiflet')
