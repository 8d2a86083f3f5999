"""Run configuration: validation and plain-text ``key=value`` files."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path

from .detector import DMP_EPS, DMP_FLOOR
from .errors import ConfigError
from .flux import FLUXES
from .scenarios import scenario_catalog
from .weno import WenoParams


@dataclass
class RunConfig:
    scenario: str = "sod"
    N: int = 3
    Ns: int | None = None
    nx: int | None = None
    ny: int | None = None
    cfl: float = 0.9
    flux: str | None = None  # None: the scenario's default
    t_final: float | None = None
    out: str = "out"
    frame_every: int = 0
    seed: int = 0
    dmp_eps: float = DMP_EPS
    dmp_floor: float = DMP_FLOOR
    weno_lambda_central: float = 100.0
    weno_lambda_side: float = 1.0
    weno_epsilon: float = 1e-14
    weno_power: int = 4
    ic_mode: str = "interpolate"
    limiter: bool = True
    force_fraction: float = 0.0
    line_points: int = 200

    def validate(self) -> "RunConfig":
        if self.scenario not in scenario_catalog():
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose from {sorted(scenario_catalog())}")
        if not 0 <= self.N <= 9:
            raise ConfigError(f"N must be in 0..9, got {self.N}")
        if self.Ns is not None and self.Ns < self.N + 1:
            raise ConfigError(f"Ns={self.Ns} is below N+1={self.N + 1}")
        for name in ("nx", "ny"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ConfigError(f"{name} must be positive, got {v}")
        if not 0.0 < self.cfl <= 1.0:
            raise ConfigError(f"cfl must be in (0, 1], got {self.cfl}")
        if self.flux is not None and self.flux not in FLUXES:
            raise ConfigError(f"unknown flux {self.flux!r}; choose from {sorted(FLUXES)}")
        if self.t_final is not None and self.t_final < 0.0:
            raise ConfigError("t_final must be non-negative")
        if self.frame_every < 0:
            raise ConfigError("frame_every must be non-negative")
        if self.dmp_eps < 0.0 or self.dmp_floor < 0.0:
            raise ConfigError("DMP tolerances must be non-negative")
        if self.weno_epsilon <= 0.0 or self.weno_power < 1:
            raise ConfigError("WENO epsilon must be positive and the power at least 1")
        if self.weno_lambda_central <= 0.0 or self.weno_lambda_side <= 0.0:
            raise ConfigError("WENO linear weights must be positive")
        if self.ic_mode not in ("interpolate", "l2"):
            raise ConfigError(f"ic_mode must be 'interpolate' or 'l2', got {self.ic_mode!r}")
        if not 0.0 <= self.force_fraction <= 1.0:
            raise ConfigError("force_fraction must lie in [0, 1]")
        if self.line_points < 2:
            raise ConfigError("line_points must be at least 2")
        return self

    @property
    def weno(self) -> WenoParams:
        return WenoParams(self.weno_lambda_central, self.weno_lambda_side, self.weno_epsilon, self.weno_power)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, raw):
    if raw is None or not isinstance(raw, str):
        return raw
    kind = _TYPES[key]
    text = raw.strip()
    if "None" in kind and text.lower() in ("", "none"):
        return None
    try:
        if kind.startswith("int"):
            return int(text)
        if kind.startswith("float"):
            return float(text)
        if kind == "bool":
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None
    return text


def parse_config_text(text: str) -> dict:
    """``key=value`` lines; blank lines and ``#`` comments are ignored. Dashes in keys read as underscores."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        out[key] = _coerce(key, value)
    return out


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """File values first, then explicitly given overrides (``None`` means not given)."""
    values = {}
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {p}")
        values.update(parse_config_text(p.read_text()))
    for key, val in (overrides or {}).items():
        if val is not None:
            if key not in _TYPES:
                raise ConfigError(f"unknown option {key!r}")
            values[key] = _coerce(key, val)
    return RunConfig(**values).validate()


def dump_config(cfg: RunConfig) -> str:
    return "".join(f"{k}={'' if v is None else v}\n" for k, v in cfg.as_dict().items())
