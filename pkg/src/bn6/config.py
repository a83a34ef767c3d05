"""Run configuration: flat `key = value` text files with a strict schema.

Unknown keys are errors; absent keys take defaults; lists are comma
separated.  The canonical serialization (sorted keys, 17 significant digits)
is hashed into the config digest that ties every stage output to the
configuration that produced it.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field, fields

from .errors import ConfigError

__all__ = ["RunConfig", "load_config", "parse_config_text", "config_digest"]


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return f"{x:.17g}"
    if isinstance(x, (list, tuple)):
        return ",".join(_fmt(v) for v in x)
    return str(x)


@dataclass
class RunConfig:
    """Everything the pipeline needs, with defaults sized for the unit ball."""

    domain_radius: float = 1.0
    grid_n: int = 4096
    tol_bc: float = 1e-9
    tol_eig: float = 1e-6
    quad_tol: float = 1e-9
    newton_tol: float = 1e-11
    lambda0_tol: float = 1e-9
    v00_tol: float = 1e-4
    # magnitudes; the sign is fixed at runtime by the computed theorem case
    eps_sweep: list = field(default_factory=lambda: [
        0.031622776601683791, 0.01, 0.003162277660168379, 0.001,
    ])
    d_grid: list = field(default_factory=list)  # empty -> geometric around d0
    sigma: float = 0.005
    ell_max: int = 10
    count_per_sector: int = 3
    scan_points: int = 24
    quad_per_decade: int = 128
    branch_eps0: float = 0.02
    branch_eps_min: float = 0.0015
    branch_points: int = 9
    seed_d_ladder: list = field(default_factory=lambda: [1.0, 0.5, 2.0])
    seed_eps_ladder: list = field(default_factory=lambda: [1.0, 0.5, 2.0])
    output_dir: str = "bn6_out"
    jobs: int = 1

    def __post_init__(self):
        for name in ("tol_bc", "tol_eig", "quad_tol", "newton_tol", "lambda0_tol",
                     "v00_tol"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if not 0.0 < self.sigma < 1.0:
            raise ConfigError("sigma must lie in (0, 1)")
        if any(e == 0 for e in self.eps_sweep):
            raise ConfigError("eps_sweep values must be nonzero")
        if self.domain_radius <= 0:
            raise ConfigError("domain_radius must be positive")
        if self.grid_n < 64:
            raise ConfigError("grid_n too small")

    def canonical_text(self) -> str:
        # output_dir and jobs never influence computed bytes, so they stay
        # outside the digest (runs differing only in them are "the same run")
        lines = [f"{f.name} = {_fmt(getattr(self, f.name))}" for f in fields(self)
                 if f.name not in ("output_dir", "jobs")]
        return "\n".join(sorted(lines)) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_text().encode("ascii")).hexdigest()


def config_digest(cfg: RunConfig) -> str:
    return cfg.digest()


_FIELD_TYPES = {f.name: f for f in fields(RunConfig)}
_LIST_FIELDS = {"eps_sweep", "d_grid", "seed_d_ladder", "seed_eps_ladder"}
_INT_FIELDS = {"grid_n", "ell_max", "count_per_sector", "scan_points",
               "quad_per_decade", "branch_points", "jobs"}
_STR_FIELDS = {"output_dir"}


def _convert(key: str, raw: str):
    raw = raw.strip()
    try:
        if key in _LIST_FIELDS:
            if not raw:
                return []
            return [float(tok) for tok in raw.split(",")]
        if key in _INT_FIELDS:
            return int(raw)
        if key in _STR_FIELDS:
            return raw
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc


def parse_config_text(text: str) -> RunConfig:
    """Parse `key = value` lines; '#' starts a comment; unknown keys raise."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(key)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}")
        values[key] = _convert(key, raw)
    return RunConfig(**values)


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Config from file (or defaults), then env, then explicit overrides.

    BN6_OUTPUT_DIR overrides output_dir; CLI flags arrive via ``overrides``
    and take final precedence.
    """
    if path is None:
        cfg = RunConfig()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = parse_config_text(fh.read())
    env_out = os.environ.get("BN6_OUTPUT_DIR")
    if env_out:
        cfg.output_dir = env_out
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _FIELD_TYPES:
            raise ConfigError(key)
        setattr(cfg, key, value)
    return cfg
