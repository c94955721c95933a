from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from omegaconf import MISSING, DictConfig, ListConfig, OmegaConf

COMMANDS = ('decompose', 'reconstruct', 'bench', 'freq', 'verify')


def add_resolvers() -> None:
    """Adds resolvers to the OmegaConf parsers"""

    def add_resolver(name: str, resolver: Callable):
        OmegaConf.register_new_resolver(
            name=name,
            resolver=resolver,
            replace=True  # need this for multirun
        )

    for name_, resolver_ in (
        ("path.stem", lambda path: Path(path).stem),
    ):
        add_resolver(name_, resolver_)


@dataclass
class RunConf:
    command: str = MISSING
    input: Optional[str] = None
    # a key of filters, a list of keys, or 'all'
    filter: Any = 'haar'
    levels: int = 1
    peak: int = 255
    output: Optional[str] = None
    gain_output: Optional[str] = None
    crop_even: bool = False
    points: int = 512
    tolerance: float = 1e-10
    # name -> _target_ node, filled from conf/filters/
    filters: Dict[str, Any] = field(default_factory=dict)


@dataclass
class StarFieldConf:
    output: str = MISSING
    height: int = 512
    width: int = 512
    n_stars: int = 200
    peak: int = 65535
    seed: int = 42


@dataclass
class PlotConf:
    # bench: PSNR per level, freq: entrywise |H(w)| and |G(w)|
    kind: str = MISSING
    csv: str = MISSING
    png: str = MISSING


def as_run_conf(cfg: DictConfig) -> DictConfig:
    """Validate a composed config against `RunConf`."""
    conf = OmegaConf.merge(OmegaConf.structured(RunConf), cfg)

    if conf.command not in COMMANDS:
        raise ValueError(f"unknown command {conf.command!r}, expected one of {', '.join(COMMANDS)}")
    if conf.levels < 1:
        raise ValueError(f"levels must be at least 1, got {conf.levels}")
    if conf.peak not in (255, 65535):
        raise ValueError(f"peak must be 255 or 65535, got {conf.peak}")

    return conf


def filter_names(value: Any, registry) -> List[str]:
    if isinstance(value, (list, tuple, ListConfig)):
        return [str(name) for name in value]
    if value == 'all':
        return list(registry)
    return [str(value)]
