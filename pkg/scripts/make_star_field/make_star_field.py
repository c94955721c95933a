import logging

import hydra
from hydra.utils import to_absolute_path
from omegaconf import OmegaConf

from multifilters.synthetic import star_field
from sfp_io.imagewriter import write_pgm
from utils.conf_helpers import StarFieldConf


@hydra.main(config_path="./conf", config_name="star_field", version_base=None)
def main(cfg: StarFieldConf):
    """
    Writes a synthetic 16-bit plate (Gaussian stars on a smooth sky) as PGM,
    a stand-in input for `multifilters.cli command=bench` when no scan is at hand.
    """
    cfg = OmegaConf.merge(OmegaConf.structured(StarFieldConf), cfg)

    img = star_field(
        shape=(cfg.height, cfg.width),
        n_stars=cfg.n_stars,
        peak=cfg.peak,
        seed=cfg.seed,
    )
    write_pgm(img, to_absolute_path(cfg.output))
    logging.info(f"wrote {cfg.width}x{cfg.height} star field with {cfg.n_stars} stars to {cfg.output}")


if __name__ == '__main__':
    from utils.conf_helpers import add_resolvers
    add_resolvers()

    main()
