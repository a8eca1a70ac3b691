"""Flat ``key=value`` configuration files and overrides."""
from __future__ import annotations

from pathlib import Path

from .errors import ConfigurationError
from .membrane import PmsamConfig
from .monkey import MaParams

INT_KEYS = {"n", "m", "d", "climb_number", "n_max", "t_max", "seed", "max_resample"}
FLOAT_KEYS = {"step_length", "eyesight", "somersault_lo", "somersault_hi", "climb_epsilon"}
OPTIONAL_FLOAT_KEYS = {"target_value"}
KEYS = INT_KEYS | FLOAT_KEYS | OPTIONAL_FLOAT_KEYS

# flat key -> MaParams field (the rest live on PmsamConfig)
_MA_FIELDS = {
    "n": "n",
    "d": "d",
    "step_length": "step_length",
    "eyesight": "eyesight",
    "somersault_lo": "somersault_lo",
    "somersault_hi": "somersault_hi",
    "climb_number": "climb_number",
    "n_max": "cyclic_number",
    "climb_epsilon": "climb_epsilon",
    "max_resample": "max_resample",
}


def _convert(key: str, raw: str):
    raw = raw.strip()
    if key not in KEYS:
        raise ConfigurationError(f"unknown configuration key {key!r}", key=key)
    try:
        if key in OPTIONAL_FLOAT_KEYS:
            return None if raw.lower() in ("", "none") else float(raw)
        if key in FLOAT_KEYS:
            return float(raw)
        try:
            return int(raw)
        except ValueError:
            as_float = float(raw)
            if not as_float.is_integer():
                raise
            return int(as_float)
    except ValueError:
        raise ConfigurationError(f"{key}: expected a number, got {raw!r}", key=key) from None


def parse_pairs(lines, source="override") -> dict:
    values = {}
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{source}:{lineno}: expected key=value, got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        values[key] = _convert(key, raw)
    return values


def to_flat(config: PmsamConfig) -> dict:
    flat = {key: getattr(config.ma, attr) for key, attr in _MA_FIELDS.items()}
    flat.update(m=config.membranes, t_max=config.t_max, target_value=config.target_value,
                seed=config.seed)
    return flat


def from_flat(values: dict, base: PmsamConfig | None = None) -> PmsamConfig:
    flat = to_flat(base or PmsamConfig())
    for key, value in values.items():
        if key not in KEYS:
            raise ConfigurationError(f"unknown configuration key {key!r}", key=key)
        flat[key] = value
    ma = MaParams(**{attr: flat[key] for key, attr in _MA_FIELDS.items()})
    return PmsamConfig(ma=ma, membranes=flat["m"], t_max=flat["t_max"],
                       target_value=flat["target_value"], seed=flat["seed"])


def parse_config(path=None, overrides=()) -> PmsamConfig:
    """Defaults, then the file's values, then ``KEY=VALUE`` overrides."""
    values = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from None
        values.update(parse_pairs(text.splitlines(), source=str(path)))
    values.update(parse_pairs(overrides))
    return from_flat(values)
