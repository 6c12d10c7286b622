"""INI run configuration.

Every tolerance and sweep parameter the diagnostics depend on lives here;
command-line flags override file values, which override the defaults below.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace
from pathlib import Path


@dataclass(frozen=True)
class Config:
    system: str | None = None
    seed: int = 0
    pressure_kappa: float = 1.0
    pressure_gamma: float = 2.0
    # sweep, in units of the largest relevant spacing unless ``epsilons`` is set
    epsilons: tuple[float, ...] = ()
    eps_top: float = 16.0
    eps_bottom: float = 4.0
    eps_ratio: float = 2.0 ** 0.5
    region_margin: float = 0.0
    psi_support: tuple[float, float] = (0.25, 0.75)
    window: tuple[float, float] = (0.25, 0.75)
    compat_residual: float = 1e-10
    jacobian_rel: float = 1e-4
    balance_rel: float = 0.05
    samples: int = 100
    extra: dict = field(default_factory=dict)


_SECTIONS = {
    "run": ("system", "seed", "pressure_kappa", "pressure_gamma", "samples"),
    "sweep": ("epsilons", "eps_top", "eps_bottom", "eps_ratio"),
    "region": ("region_margin", "psi_support", "window"),
    "tolerances": ("compat_residual", "jacobian_rel", "balance_rel"),
}


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.replace(",", " ").split())


def _convert(name: str, text: str):
    default = getattr(Config, name, None) if name != "extra" else None
    if name in ("epsilons", "psi_support", "window"):
        vals = _floats(text)
        if name != "epsilons" and len(vals) != 2:
            raise ValueError(f"{name} needs two numbers, got {text!r}")
        return vals
    if name == "system":
        return text.strip()
    if isinstance(default, int) and not isinstance(default, bool):
        return int(text)
    return float(text)


def load_config(path=None) -> Config:
    """Read an INI file (sections ``run``, ``sweep``, ``region``, ``tolerances``)."""
    cfg = Config()
    if path is None:
        return cfg
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    if not parser.read(Path(path)):
        raise FileNotFoundError(f"config file not found: {path}")
    known = {f.name for f in fields(Config)}
    updates, extra = {}, {}
    for section in parser.sections():
        allowed = _SECTIONS.get(section)
        for key, text in parser.items(section):
            name = key.replace("-", "_")
            if allowed is not None and name in allowed and name in known:
                try:
                    updates[name] = _convert(name, text)
                except ValueError as exc:
                    raise ValueError(f"config [{section}] {key}: {exc}") from exc
            else:
                extra[f"{section}.{key}"] = text
    return replace(cfg, extra=extra, **updates)
