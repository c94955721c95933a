import logging
from contextlib import contextmanager
from pathlib import Path
from typing import List

import hydra
import pandas as pd
import tqdm
from hydra.utils import instantiate, to_absolute_path
from omegaconf import DictConfig

from multifilters import metrics
from multifilters.filterbank import (
    Kernel,
    ScalarFilter,
    frequency_response,
    unknown_filter,
    verify_orthogonality,
)
from multifilters.image2d import (
    ImageBuffer,
    ImageShapeError,
    approx_only,
    decompose2d,
    max_levels_2d,
    reconstruct2d,
)
from sfp_io.imagereader import read_image
from sfp_io.imagewriter import write_pgm
from sfp_io.pyramidio import read_pyramid, write_pyramid
from utils.conf_helpers import as_run_conf, filter_names

log = logging.getLogger(__name__)


class StageError(RuntimeError):
    ...


@contextmanager
def stage(name: str):
    try:
        yield
    except (ValueError, OSError) as e:
        raise StageError(f"{name} failed: {e}") from e


def _path(value) -> Path:
    if value is None:
        raise ValueError("this command needs an input/output path")
    return Path(to_absolute_path(str(value)))


def build_filter(cfg: DictConfig, name: str) -> Kernel:
    """Instantiate the `filters.<name>` node, see conf/filters/"""
    if name not in cfg.filters:
        raise unknown_filter(name, cfg.filters)
    return instantiate(cfg.filters[name])


def build_filters(cfg: DictConfig) -> List[Kernel]:
    return [build_filter(cfg, name) for name in filter_names(cfg.filter, cfg.filters)]


def _single_filter(cfg: DictConfig) -> Kernel:
    names = filter_names(cfg.filter, cfg.filters)
    if len(names) != 1:
        raise ValueError(f"{cfg.command} takes exactly one filter, got {names}")
    return build_filter(cfg, names[0])


def _write_csv(frame: pd.DataFrame, output):
    if output is None:
        print(frame.to_csv(index=False), end='')
    else:
        frame.to_csv(_path(output), index=False)
        log.info(f"wrote {len(frame)} rows to {_path(output)}")


def load_input(cfg: DictConfig) -> ImageBuffer:
    with stage('read'):
        img = read_image(_path(cfg.input))

    if cfg.crop_even and (img.width % 2 or img.height % 2):
        log.warning(f"cropping {img.width}x{img.height} input to even dimensions")
        img = img.crop_even()
    return img


def cmd_decompose(cfg: DictConfig) -> int:
    kernel = _single_filter(cfg)
    img = load_input(cfg)

    with stage('decompose'):
        pyramid = decompose2d(img, kernel, cfg.levels)
    with stage('write'):
        write_pyramid(pyramid, _path(cfg.output))

    log.info(f"{kernel.name}: {cfg.levels}-level pyramid of {img.width}x{img.height} written to {cfg.output}")
    return 0


def cmd_reconstruct(cfg: DictConfig) -> int:
    kernel = _single_filter(cfg)

    with stage('read'):
        pyramid = read_pyramid(_path(cfg.input))
    with stage('reconstruct'):
        img = reconstruct2d(pyramid, kernel, peak=cfg.peak)
    with stage('write'):
        n_clamped = write_pgm(img, _path(cfg.output))

    log.info(f"reconstructed {img.width}x{img.height} image written to {cfg.output} ({n_clamped} clamped)")
    return 0


def bench_rows(img: ImageBuffer, kernel, levels: int, peak: int):
    """(bench row, coding gain) for every truncation level 1..levels"""
    for level in range(1, levels + 1):
        with stage('decompose'):
            pyramid = decompose2d(img, kernel, level)
        with stage('truncate'):
            truncated = approx_only(pyramid, level)
        with stage('reconstruct'):
            approx = reconstruct2d(truncated, kernel, peak=img.peak)

        report = metrics.compare(img, approx, peak)
        yield (level, kernel.name, report.mse, report.psnr_db), metrics.coding_gain_db(pyramid)


def cmd_bench(cfg: DictConfig) -> int:
    img = load_input(cfg)
    kernels = build_filters(cfg)

    with stage('decompose'):
        for kernel in kernels:
            if cfg.levels > (feasible := max_levels_2d(img.samples.shape, kernel)):
                raise ImageShapeError(
                    f"{kernel.name} supports at most {feasible} levels on a {img.width}x{img.height} image, "
                    f"{cfg.levels} requested"
                )

    rows, gains = [], []
    for kernel in tqdm.tqdm(kernels, desc='filters'):
        for row, gain in bench_rows(img, kernel, cfg.levels, cfg.peak):
            log.info(f"{row[1]} level {row[0]}: mse {row[2]:.6g}, psnr {row[3]:.4f} dB")
            rows.append(row)
            gains.append((row[0], row[1], gain))

    _write_csv(metrics.bench_frame(rows), cfg.output)
    if cfg.gain_output is not None:
        _write_csv(pd.DataFrame(gains, columns=['level', 'filter', 'coding_gain_db']), cfg.gain_output)
    return 0


def cmd_freq(cfg: DictConfig) -> int:
    kernel = _single_filter(cfg)
    _write_csv(frequency_response(kernel, cfg.points), cfg.output)
    return 0


def cmd_verify(cfg: DictConfig) -> int:
    passed, tables = True, []
    for name in cfg.filters:
        kernel = build_filter(cfg, name)
        report = verify_orthogonality(kernel, cfg.tolerance)
        passed &= report.passed
        tables.append(report.to_frame())

        log.info(
            f"{name}: {'PASS' if report.passed else 'FAIL'} "
            f"max |HH| {report.max_residual_HH:.3e}, max |GG| {report.max_residual_GG:.3e}, "
            f"max |HG| {report.max_residual_HG:.3e} (tolerance {report.tolerance:g})"
        )

        if isinstance(kernel, ScalarFilter):
            scalar_ok = kernel.is_orthonormal(cfg.tolerance)
            passed &= scalar_ok
            log.info(
                f"{name}: {'PASS' if scalar_ok else 'FAIL'} scalar orthonormality "
                f"{kernel.orthonormality_residual():.3e}, sum of taps - sqrt(2) {kernel.dc_residual():.3e}"
            )

    _write_csv(pd.concat(tables, ignore_index=True), cfg.output)
    log.info(f"verify: {'all checks passed' if passed else 'FAILED'}")
    return 0 if passed else 1


COMMANDS = {
    'decompose': cmd_decompose,
    'reconstruct': cmd_reconstruct,
    'bench': cmd_bench,
    'freq': cmd_freq,
    'verify': cmd_verify,
}


def run(cfg: DictConfig) -> int:
    cfg = as_run_conf(cfg)
    log.info(f"running {cfg.command}")
    return COMMANDS[cfg.command](cfg)


@hydra.main(config_path="../conf", config_name="sfp_multifilters", version_base=None)
def main(cfg: DictConfig):
    if status := run(cfg):
        raise SystemExit(status)


if __name__ == '__main__':
    from utils.conf_helpers import add_resolvers
    add_resolvers()

    main()
