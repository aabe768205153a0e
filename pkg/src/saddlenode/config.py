"""Run configuration: defaults, INI config file, then command-line overrides.

Config file format (``configparser`` INI, one ``[saddlenode]`` section)::

    [saddlenode]
    trunc = 12
    brjuno_max_terms = 200
    brjuno_threshold = 1000
    brjuno_tol = 1e-8
    rtol = 1e-10
    atol = 1e-13
    jet = 3
    radius = 1
    steps = 0
"""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, fields

from .errors import ConstraintViolated

__all__ = ["Config", "load_config", "SECTION"]

SECTION = "saddlenode"


@dataclass
class Config:
    trunc: int = 12
    brjuno_max_terms: int = 200
    brjuno_threshold: float = 1e3
    brjuno_tol: float = 1e-8
    rtol: float = 1e-10
    atol: float = 1e-13
    jet: int = 3
    radius: float = 1.0
    steps: int = 0

    def validate(self) -> "Config":
        if self.trunc < 2:
            raise ConstraintViolated("trunc >= 2", module="cli")
        if self.jet < 1:
            raise ConstraintViolated("jet >= 1", module="cli")
        if self.radius <= 0:
            raise ConstraintViolated("radius > 0", module="cli")
        if self.steps < 0:
            raise ConstraintViolated("steps >= 0", module="cli")
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    def brjuno_budget(self) -> dict:
        return {"max_terms": self.brjuno_max_terms, "divergence_threshold": self.brjuno_threshold,
                "convergence_tol": self.brjuno_tol}


def load_config(path: str | None = None, **overrides) -> Config:
    """Defaults, updated from ``path`` (if given), then from non-None overrides."""
    cfg = Config()
    types = {f.name: f.type for f in fields(Config)}
    if path:
        parser = configparser.ConfigParser()
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
        if parser.has_section(SECTION):
            for key, raw in parser.items(SECTION):
                if key not in types:
                    raise ConstraintViolated(f"unknown config key {key!r}", module="cli")
                conv = int if types[key] in (int, "int") else float
                try:
                    setattr(cfg, key, conv(raw))
                except ValueError as exc:
                    raise ConstraintViolated(f"config key {key!r}: {raw!r} is not a number", module="cli") from exc
    for key, value in overrides.items():
        if value is not None and key in types:
            setattr(cfg, key, value)
    return cfg.validate()
