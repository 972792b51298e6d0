"""
Configuration loaded from a .env file next to skein_homology.py (or the
file named by --config).

  MAX_CROSSINGS=12     refuse diagrams with more crossings (2^n resolutions)
  GCD_TERM_BOUND=40    fractions whose parts exceed this many terms are left
                       unreduced instead of paying for a multivariate gcd
  DEFAULT_SEED=0       seed for the randomized `check` suites
  RANDOM_TRIALS=20     random moves / diagrams per randomized suite

Precedence is CLI flag, then .env value, then the default above. This
module is the single source of truth for reading these keys; entry points
call `load_settings` rather than reading `config` directly.
"""
from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path


@dataclass(frozen=True)
class Settings:
    MAX_CROSSINGS: int = 12
    GCD_TERM_BOUND: int = 40
    DEFAULT_SEED: int = 0
    RANDOM_TRIALS: int = 20


def load_env_file(path: Path) -> dict:
    """KEY=VALUE lines of a .env file; '#' lines are skipped and the last assignment wins."""
    config: dict = {}
    if not path.exists():
        return config
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#") or "=" not in line:
            continue
        key, value = line.split("=", 1)
        config[key.strip()] = value.split(" #", 1)[0].strip()
    return config


def resolve_env_path(script_dir: Path, config_arg: str | None) -> Path:
    """--config when given, else the script-local .env."""
    return Path(config_arg).expanduser() if config_arg else script_dir / ".env"


def load_settings(config: dict) -> Settings:
    """Typed settings from a loaded .env dict; unknown keys are ignored."""
    values = {}
    for f in fields(Settings):
        raw = config.get(f.name)
        if raw is None or raw == "":
            continue
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"{f.name} must be an integer, got {raw!r}") from None
        if value < 0:
            raise ValueError(f"{f.name} must not be negative, got {value}")
        values[f.name] = value
    return Settings(**values)
