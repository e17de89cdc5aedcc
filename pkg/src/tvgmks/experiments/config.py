"""Flat ``key = value`` configuration files.

Keys are the long CLI flag names without the leading dashes (``mu``,
``noise-level``, ``in`` ...). Blank lines and lines starting with ``#`` are
ignored; a trailing ``# comment`` after a value is stripped.
"""

from pathlib import Path

from ..exceptions import ParameterError

__all__ = ["read_config_file", "CONFIG_KEYS"]

#: file key -> (override name, converter)
CONFIG_KEYS = {
    "problem": ("problem", str),
    "mode": ("mode", str),
    "tv": ("tv", str),
    "mu": ("mu", float),
    "beta": ("beta", float),
    "rho": ("rho", float),
    "eps": ("eps", float),
    "max-iter": ("max_iter", int),
    "seed": ("seed", int),
    "noise-kind": ("noise_kind", str),
    "noise-level": ("noise_level", float),
    "sigma": ("sigma", float),
    "band": ("band", int),
    "blur": ("blur", str),
    "in": ("image", str),
    "channels": ("channels", str),
    "n": ("phillips_n", int),
    "out": ("output", str),
    "trace": ("trace", str),
    "summary": ("summary", str),
}


def read_config_file(path):
    """Parse a configuration file into override keywords.

    Returns
    -------
    dict
        Keys as accepted by :func:`tvgmks.experiments.runner.with_overrides`.
    """
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("_", "-")
        if key not in CONFIG_KEYS:
            raise ParameterError(f"{path}:{lineno}: unknown key {key!r}")
        name, conv = CONFIG_KEYS[key]
        try:
            out[name] = conv(value)
        except ValueError:
            raise ParameterError(f"{path}:{lineno}: bad value {value!r} for {key!r}") from None
    return out
