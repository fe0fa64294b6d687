"""Run configuration: a flat JSON document validated against a shipped schema."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from importlib import resources
from typing import Optional, Union

import jsonschema

__all__ = ["RunConfig", "COMMANDS", "load_schema", "load_config"]

COMMANDS = ("weight-info", "kernel-bands", "lp-check", "lattice", "criterion", "opnorm", "xcheck")


def load_schema() -> dict:
    text = resources.files("expbergman").joinpath("run_config.schema.json").read_text()
    return json.loads(text)


def _exponent(x):
    """JSON has no infinity: accept ``"inf"`` for exponents."""
    if isinstance(x, str):
        if x.strip().lower() in ("inf", "infinity", "∞"):
            return float("inf")
        return float(x)
    return float(x)


def _emit_exponent(x: float):
    return "inf" if x == float("inf") else x


@dataclass
class RunConfig:
    command: str = "criterion"
    # weight
    gamma: float = 0.0
    alpha: float = 1.0
    b: float = 1.0
    eps_center: float = 0.05
    # quadrature and kernel
    n_r: int = 400
    n_theta: int = 1024
    grid_rmax: Union[float, str] = "auto"
    degree: int = 640
    # operator
    op: str = "GV"
    phi: tuple = ((0.0, 0.0), (1.0, 0.0))
    g: tuple = ((1.0, 0.0),)
    p: float = 2.0
    q: float = 2.0
    # sweeps
    rmin: float = 0.0
    rmax: float = 0.9
    step: float = 0.25
    delta: Optional[float] = None
    # random families
    seed: int = 0
    family_size: int = 10
    poly_degree: int = 30
    # output
    out: Optional[str] = None
    format: str = "json"
    lattice_csv: Optional[str] = None

    def __post_init__(self):
        self.p = _exponent(self.p)
        self.q = _exponent(self.q)
        self.phi = tuple(tuple(float(v) for v in c) for c in self.phi)
        self.g = tuple(tuple(float(v) for v in c) for c in self.g)
        jsonschema.validate(self.to_dict(), load_schema())
        if self.rmin > self.rmax:
            raise ValueError("rmin must not exceed rmax")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["p"] = _emit_exponent(self.p)
        d["q"] = _emit_exponent(self.q)
        d["phi"] = [list(c) for c in self.phi]
        d["g"] = [list(c) for c in self.g]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> RunConfig:
        names = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - names)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> RunConfig:
        return cls.from_dict(json.loads(text))


def load_config(path) -> RunConfig:
    with open(path) as fh:
        return RunConfig.from_json(fh.read())
