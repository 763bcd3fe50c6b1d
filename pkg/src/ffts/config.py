"""Flat ``key = value`` run configuration.

Lines are ``key = value``; blank lines and ``#`` comments are ignored.  Keys
mirror the :class:`RunConfig` fields and unknown keys are rejected.  Values
given on the command line override the file.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path

from .exceptions import ConfigError
from .simulation import OUTLIER_KINDS

METHOD_SETS = {"wle": ("WLE",), "mle": ("MLE",), "both": ("WLE", "MLE")}


@dataclass(frozen=True)
class RunConfig:
    input: str = ""
    out: str = "ffts-out"
    seed: int = 0
    threads: int = 1
    method: str = "both"
    h: int = 1
    k: str = "3"
    k_candidates: str = "1,2,3,4,5,6"
    b: int = 199
    mc: int = 200
    alpha: float = 0.05
    kernel_ratio: float = 0.2
    penalty: str = "gcv"
    holdout_fraction: float = 0.2
    p_max: int = 3
    N: int = 100
    J: int = 12
    noise_sd: float = 0.15
    contamination: float = 0.0
    outlier: str = "none"
    shift: float = 0.75
    tables: str = "1,2"

    def __post_init__(self):
        pos = {"threads": self.threads, "h": self.h, "b": self.b, "mc": self.mc,
               "N": self.N, "J": self.J}
        for name, val in pos.items():
            if val < 1:
                raise ConfigError(f"{name} must be >= 1, got {val}")
        if self.p_max < 0:
            raise ConfigError("p_max must be >= 0")
        if self.method not in METHOD_SETS:
            raise ConfigError(f"method must be one of {sorted(METHOD_SETS)}")
        if not 0 < self.alpha < 1:
            raise ConfigError("alpha must lie in (0, 1)")
        if not self.kernel_ratio > 0:
            raise ConfigError("kernel_ratio must be positive")
        if not 0 < self.holdout_fraction < 1:
            raise ConfigError("holdout_fraction must lie in (0, 1)")
        if not self.noise_sd > 0:
            raise ConfigError("noise_sd must be positive")
        if not 0 <= self.contamination < 1:
            raise ConfigError("contamination must lie in [0, 1)")
        if self.outlier not in OUTLIER_KINDS:
            raise ConfigError(f"outlier must be one of {OUTLIER_KINDS}")
        if self.k != "auto":
            self.k_value()
        self.candidates()
        self.penalty_value()
        self.table_set()

    @property
    def methods(self) -> tuple:
        return METHOD_SETS[self.method]

    def k_value(self):
        """``None`` for ``auto``, else the positive integer number of components."""
        if self.k == "auto":
            return None
        try:
            k = int(self.k)
        except ValueError:
            raise ConfigError(f"k must be an integer or 'auto', got {self.k!r}") from None
        if k < 1:
            raise ConfigError("k must be >= 1")
        return k

    def candidates(self) -> tuple:
        try:
            ks = tuple(int(c) for c in self.k_candidates.split(",") if c.strip())
        except ValueError:
            raise ConfigError(f"bad k_candidates {self.k_candidates!r}") from None
        if not ks or min(ks) < 1:
            raise ConfigError("k_candidates must be a non-empty list of positive integers")
        return ks

    def penalty_value(self):
        """``None`` for GCV selection, else the fixed positive penalty."""
        if self.penalty == "gcv":
            return None
        try:
            lam = float(self.penalty)
        except ValueError:
            raise ConfigError(f"penalty must be 'gcv' or a number, got {self.penalty!r}") from None
        if not lam > 0:
            raise ConfigError("penalty must be positive")
        return lam

    def table_set(self) -> tuple:
        tabs = tuple(t.strip() for t in self.tables.split(",") if t.strip())
        if not tabs or any(t not in ("1", "2") for t in tabs):
            raise ConfigError("tables must be a subset of 1,2")
        return tabs


_FIELDS = {f.name: f for f in fields(RunConfig)}
_CASTS = {"int": int, "float": float, "str": str}


def _cast(key, text):
    kind = _FIELDS[key].type
    try:
        return _CASTS[kind](text)
    except ValueError:
        raise ConfigError(f"{key}: cannot read {text!r} as {kind}") from None


def parse_config_text(text: str, source: str = "<config>") -> dict:
    out = {}
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{n}: expected 'key = value'")
        key, val = (p.strip() for p in line.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(f"{source}:{n}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"{source}:{n}: duplicate key {key!r}")
        out[key] = _cast(key, val)
    return out


def load_config(path=None, overrides: dict | None = None) -> RunConfig:
    """Build a :class:`RunConfig` from an optional file plus override values."""
    values = {}
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {p}")
        values.update(parse_config_text(p.read_text(), str(p)))
    for key, val in (overrides or {}).items():
        if key not in _FIELDS:
            raise ConfigError(f"unknown key {key!r}")
        values[key] = _cast(key, val) if isinstance(val, str) else val
    return RunConfig(**values)


def config_text(cfg: RunConfig) -> str:
    """Inverse of :func:`parse_config_text` for a full config."""
    return "".join(f"{k} = {v}\n" for k, v in dataclasses.asdict(cfg).items())
