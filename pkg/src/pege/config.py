"""Flat ``key = value`` experiment configs.

Lines starting with ``#`` are comments. Lists are comma separated;
``reward_rows`` separates rows with ``;``. ``seeds`` is a seed count
(seeds are ``base_seed + i``); ``seed_list`` gives seeds explicitly.
"""

from __future__ import annotations

from pathlib import Path

from .simulator import ConfigError, ExperimentConfig


def _floats(s):
    return [float(v) for v in s.split(",") if v.strip()]


def _ints(s):
    return [int(v) for v in s.split(",") if v.strip()]


def _bool(s):
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _rows(s):
    return [_floats(r) for r in s.split(";") if r.strip()]


def _int(s):
    v = float(s)  # accept 1e6
    if v != int(v):
        raise ValueError(f"not an integer: {s!r}")
    return int(v)


PARSERS = {
    "env": str.strip,
    "n": _int,
    "algo": str.strip,
    "horizon": _int,
    "seeds": _int,
    "base_seed": _int,
    "seed_list": _ints,
    "adversary": str.strip,
    "means": _floats,
    "beta_a": _floats,
    "beta_b": _floats,
    "gains": _floats,
    "reward_rows": _rows,
    "observed": _ints,
    "h": float,
    "t0": float,
    "delta": float,
    "snapshots": _ints,
    "clamp": _bool,
    "slope_t_min": float,
}
ALIASES = {"T": "horizon", "environment": "env", "algorithm": "algo"}
REQUIRED = ("env", "n", "algo", "horizon")


def parse_config_text(text: str, seeds_override=None):
    """Parse config text; returns ``(ExperimentConfig, extras)``.

    ``extras`` holds run options that are not part of the experiment
    itself (currently ``slope_t_min``).
    """
    values, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("syntax", f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (p.strip() for p in line.split("=", 1))
        key = ALIASES.get(key, key)
        if key not in PARSERS:
            raise ConfigError(key, "unknown key", lineno)
        if key in values:
            raise ConfigError(key, "duplicate key", lineno)
        try:
            values[key] = PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(key, str(exc), lineno) from None
        lines[key] = lineno
    for key in REQUIRED:
        if key not in values:
            raise ConfigError(key, "missing required key")

    count = values.pop("seeds", None)
    base = values.pop("base_seed", 0)
    explicit = values.pop("seed_list", None)
    if seeds_override is not None:
        seeds = list(seeds_override)
    elif explicit is not None:
        seeds = explicit
    else:
        if count is None or count < 1:
            raise ConfigError("seeds", "need a positive seed count or a seed_list")
        seeds = [base + i for i in range(count)]
    extras = {"slope_t_min": values.pop("slope_t_min", None)}
    try:
        config = ExperimentConfig(seeds=seeds, **values)
    except ConfigError as exc:
        exc.line = lines.get(exc.field)
        raise
    return config, extras


def parse_config(path, seeds_override=None):
    return parse_config_text(Path(path).read_text(encoding="utf-8"), seeds_override)


def format_config(config: ExperimentConfig) -> str:
    """Inverse of ``parse_config_text`` (seeds written as an explicit list)."""
    out = []
    for key in ("env", "n", "algo", "horizon", "adversary", "means", "beta_a", "beta_b",
                "gains", "reward_rows", "observed", "h", "t0", "delta", "snapshots", "clamp"):
        v = getattr(config, key)
        if v is None:
            continue
        if key == "reward_rows":
            v = "; ".join(", ".join(repr(float(x)) for x in row) for row in v)
        elif isinstance(v, list):
            v = ", ".join(repr(x) for x in v)
        elif isinstance(v, float):
            v = repr(v)
        out.append(f"{key} = {v}")
    out.append("seed_list = " + ", ".join(str(s) for s in config.seeds))
    return "\n".join(out) + "\n"
