"""JSON family configs and run parameters.

A family config is a JSON object with a ``config`` key naming the
construction, its parameters, and optionally ``expect`` (the verdict the
run must reproduce), ``weight`` and ``margin`` / ``support`` extras::

    {"config": "theorem3", "k": [0, 2, 4], "epsilon": 0.2, "expect": "RieszBasis"}
    {"config": "spline", "k": 1, "r": 3, "a": 0.5}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .generators import (
    GeneratorFamily,
    claim_section3_negative,
    family_lemma_4_1,
    family_theorem_3,
    family_theorem_3_general,
    family_theorem_4_3,
    family_theorem_4_6,
)
from .spectral import GridSpec
from .spline import spline_family
from .weights import Weight, constant_weight, weight_from_json

__all__ = ["ConfigError", "RunConfig", "family_from_dict", "load_family", "KNOWN_CONFIGS"]

KNOWN_CONFIGS = (
    "theorem3",
    "theorem3_general",
    "lemma41",
    "theorem43",
    "theorem46",
    "claim_section3_negative",
    "spline",
)


class ConfigError(ValueError):
    """Malformed or unreadable family config."""


def _need(d: dict, key: str):
    if key not in d:
        raise ConfigError(f"config {d.get('config')!r} is missing required field {key!r}")
    return d[key]


def _int(v, key: str) -> int:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or int(v) != v:
        raise ConfigError(f"field {key!r} must be an integer, got {v!r}")
    return int(v)


def _build(d: dict, epsilon: float | None) -> GeneratorFamily:
    name = d["config"]
    eps = float(epsilon) if epsilon is not None else d.get("epsilon")
    if name == "theorem3":
        return family_theorem_3(_need(d, "k"), 0.2 if eps is None else eps)
    if name == "theorem3_general":
        return family_theorem_3_general(_need(d, "support"), _need(d, "k"), eps)
    if name == "lemma41":
        return family_lemma_4_1(0.2 if eps is None else eps)
    if name == "theorem43":
        return family_theorem_4_3(_int(_need(d, "r"), "r"), 0.2 if eps is None else eps)
    if name == "theorem46":
        return family_theorem_4_6(_int(_need(d, "r"), "r"), 0.2 if eps is None else eps)
    if name == "claim_section3_negative":
        return claim_section3_negative(d.get("margin", 0.2), d.get("k", [0]))
    if name == "spline":
        return spline_family(_int(_need(d, "k"), "k"), _int(d.get("r", 1), "r"), d.get("a", 1.0))
    raise ConfigError(f"unknown config {name!r}; expected one of {', '.join(KNOWN_CONFIGS)}")


def family_from_dict(d: dict, epsilon: float | None = None) -> GeneratorFamily:
    """Construct the family; an explicit ``expect`` overrides the constructor default."""
    if not isinstance(d, dict) or "config" not in d:
        raise ConfigError("family config must be a JSON object with a 'config' field")
    try:
        fam = _build(d, epsilon)
        expect = d.get("expect", fam.expect)
        if expect != fam.expect:
            fam = GeneratorFamily(fam.members, fam.label, expect, fam.config)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid {d['config']!r} config: {exc}") from exc
    return fam


def load_family(path, epsilon: float | None = None) -> tuple[GeneratorFamily, dict]:
    """Read a JSON file; returns the family and the raw dict."""
    p = Path(path)
    try:
        d = json.loads(p.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {p}") from exc
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    return family_from_dict(d, epsilon), d


@dataclass
class RunConfig:
    """Everything a CLI command needs besides the family itself."""

    family_path: str
    grid_n: int = 2048
    rel_tol: float = 1e-9
    guard_band: float = 1e-3
    spline_k_max: int = 512
    epsilon: float | None = None
    seed: int = 0
    p: float = 2.0
    out: str = "out"
    trials: int = 20
    weight: Weight = field(default_factory=constant_weight)

    def __post_init__(self):
        if self.grid_n < 64:
            raise ConfigError(f"--grid-n must be at least 64, got {self.grid_n}")
        for key in ("rel_tol", "guard_band"):
            v = getattr(self, key)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"{key} must be positive, got {v}")
        if self.trials < 1:
            raise ConfigError("trials must be positive")

    @property
    def spec(self) -> GridSpec:
        return GridSpec(self.grid_n, self.guard_band, self.rel_tol, self.spline_k_max)

    def weight_from(self, raw: dict[str, Any]) -> Weight:
        if "weight" not in raw:
            return self.weight
        try:
            return weight_from_json(raw["weight"])
        except (TypeError, ValueError, AttributeError) as exc:
            raise ConfigError(f"invalid weight spec: {exc}") from exc
