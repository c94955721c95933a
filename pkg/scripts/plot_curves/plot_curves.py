import logging

import hydra
import matplotlib.pyplot as plt
import pandas as pd
from hydra.utils import to_absolute_path
from omegaconf import DictConfig, OmegaConf

from utils.conf_helpers import PlotConf


def plot_bench(csv_path: str, out_path: str):
    bench = pd.read_csv(csv_path)

    fig, ax = plt.subplots()
    fig.set_size_inches((8, 5))

    for name, curve in bench.groupby('filter', sort=False):
        ax.plot(curve['level'], curve['psnr_db'], marker='o', label=name)

    ax.set_xlabel('Decomposition level')
    ax.set_ylabel('PSNR [dB]')
    ax.set_title(f'PSNR per level, {csv_path}')
    ax.legend()

    plt.tight_layout()
    plt.savefig(out_path)


def plot_freq(csv_path: str, out_path: str):
    response = pd.read_csv(csv_path)

    fig, axes = plt.subplots(1, 2, sharey=True)
    fig.set_size_inches((12, 5))

    for ax, (component, title) in zip(axes, (('H', 'Multiscaling filter'), ('G', 'Multiwavelet filter'))):
        for (row, col), entry in response[response['component'] == component].groupby(['row', 'col']):
            ax.plot(entry['omega'], entry['magnitude'], label=f'{component}[{row},{col}]')
        ax.set_xlabel('omega [rad]')
        ax.set_title(title)
        ax.legend()

    axes[0].set_ylabel('|response|')
    plt.tight_layout()
    plt.savefig(out_path)


PLOTS = {
    'bench': plot_bench,
    'freq': plot_freq,
}


def plot(cfg: DictConfig) -> str:
    cfg = OmegaConf.merge(OmegaConf.structured(PlotConf), cfg)
    if cfg.kind not in PLOTS:
        raise ValueError(f"unknown plot kind {cfg.kind!r}, expected one of {', '.join(PLOTS)}")

    out_path = to_absolute_path(cfg.png)
    PLOTS[cfg.kind](to_absolute_path(cfg.csv), out_path)
    plt.close('all')
    logging.info(f"wrote {cfg.kind} plot of {cfg.csv} to {out_path}")
    return out_path


@hydra.main(config_path="./conf", config_name="plot_curves", version_base=None)
def main(cfg: PlotConf):
    """Plots a bench CSV (PSNR per level) or a freq CSV (filter magnitude responses) to PNG."""
    plot(cfg)


if __name__ == '__main__':
    from utils.conf_helpers import add_resolvers
    add_resolvers()

    main()
