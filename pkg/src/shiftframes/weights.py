"""Weights and weighted norms for sequences, grid functions and amalgam spaces.

Two concrete weights are provided: the polynomial weight ``(1+|x|)**s``,
which is submultiplicative, and the constant weight.  A polynomial weight
``mu`` is moderate with respect to a polynomial ``omega`` of equal or larger
exponent with constant 1.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Weight",
    "WeightPair",
    "make_polynomial_weight",
    "constant_weight",
    "check_moderate",
    "check_submultiplicative",
    "validate_p",
    "seq_norm",
    "grid_function_norm",
    "amalgam_norm",
    "weight_from_json",
]


def validate_p(p) -> float:
    """Normalise a norm exponent to one of 1.0, 2.0 or inf."""
    if isinstance(p, str):
        p = math.inf if p.strip().lower() in ("inf", "infinity") else float(p)
    p = float(p)
    if p not in (1.0, 2.0, math.inf):
        raise ValueError(f"norm exponent must be 1, 2 or inf, got {p}")
    return p


@dataclass(frozen=True)
class Weight:
    """A symmetric positive weight; ``kind`` is ``"poly"`` or ``"const"``."""

    kind: str = "const"
    s: float = 0.0

    def __post_init__(self):
        if self.kind not in ("poly", "const"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if not math.isfinite(self.s) or self.s < 0:
            raise ValueError(f"weight exponent must be finite and >= 0, got {self.s}")
        if self.kind == "const" and self.s != 0.0:
            raise ValueError("constant weight takes no exponent")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "const":
            return np.ones_like(x)
        return (1.0 + np.abs(x)) ** self.s

    def to_json(self) -> dict:
        if self.kind == "const":
            return {"kind": "const"}
        return {"kind": "poly", "s": self.s}


def make_polynomial_weight(s: float) -> Weight:
    """Return the weight ``x -> (1+|x|)**s``.

    Raises
    ------
    ValueError
        If ``s`` is negative or not finite.
    """
    s = float(s)
    if not math.isfinite(s) or s < 0:
        raise ValueError(f"weight exponent must be finite and >= 0, got {s}")
    return Weight("poly", s)


def constant_weight() -> Weight:
    return Weight("const")


def weight_from_json(spec: Mapping) -> Weight:
    kind = spec.get("kind")
    if kind == "const":
        return constant_weight()
    if kind == "poly":
        if "s" not in spec:
            raise ValueError("polynomial weight needs an exponent 's'")
        return make_polynomial_weight(spec["s"])
    raise ValueError(f"unknown weight kind {kind!r}")


@dataclass(frozen=True)
class WeightPair:
    """Submultiplicative ``omega`` together with an ``omega``-moderate ``mu``."""

    omega: Weight
    mu: Weight
    moderation_constant: float = 1.0

    def __post_init__(self):
        if not self.moderation_constant > 0:
            raise ValueError("moderation constant must be positive")


def check_moderate(pair: WeightPair, grid, tolerance: float = 0.0) -> bool:
    """Check ``mu(x+y) <= C omega(x) mu(y)`` for every pair drawn from ``grid``."""
    g = np.asarray(grid, dtype=float).ravel()
    if g.size == 0:
        raise ValueError("grid must be non-empty")
    x, y = np.meshgrid(g, g, indexing="ij")
    lhs = pair.mu(x + y)
    rhs = pair.moderation_constant * pair.omega(x) * pair.mu(y) * (1.0 + tolerance)
    return bool(np.all(lhs <= rhs))


def check_submultiplicative(w: Weight, x, y, slack: float = 1e-12) -> bool:
    """Check ``w(x+y) <= w(x) w(y)`` pointwise on paired samples."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return bool(np.all(w(x + y) <= w(x) * w(y) * (1.0 + slack)))


def _lp(values: np.ndarray, p: float) -> float:
    if values.size == 0:
        return 0.0
    if p == math.inf:
        return float(np.max(values))
    if p == 1.0:
        return float(np.sum(values))
    # scale by the largest entry so tiny or huge values neither underflow nor overflow
    m = float(np.max(values))
    if m == 0.0 or not math.isfinite(m):
        return m
    return m * float(np.sqrt(np.sum((values / m) ** 2)))


def seq_norm(c, mu: Weight, p, indices: Sequence[int] | None = None) -> float:
    """Weighted sequence norm ``(sum_j |c(j)|^p mu(j)^p)^(1/p)``.

    ``c`` is either a mapping ``{j: c(j)}`` or an array of values; in the
    latter case ``indices`` gives the integer index of every entry (default
    ``0, 1, ...``).
    """
    p = validate_p(p)
    if isinstance(c, Mapping):
        idx = np.fromiter(c.keys(), dtype=float, count=len(c))
        vals = np.array(list(c.values()), dtype=complex)
    else:
        vals = np.asarray(c, dtype=complex).ravel()
        idx = np.arange(vals.size, dtype=float) if indices is None else np.asarray(indices, dtype=float)
        if idx.shape != vals.shape:
            raise ValueError("indices and values differ in length")
    if not np.all(np.isfinite(vals)):
        raise ValueError("sequence has non-finite entries")
    return _lp(np.abs(vals) * mu(idx), p)


def grid_function_norm(samples, h: float, mu: Weight, p, x=None) -> float:
    """Riemann-sum approximation of the weighted ``L^p`` norm of grid samples.

    ``x`` holds the sample locations; if omitted the weight is only valid for
    the constant weight and the samples are taken to start at 0.
    """
    p = validate_p(p)
    if not h > 0:
        raise ValueError(f"grid step must be positive, got {h}")
    f = np.asarray(samples)
    if not np.all(np.isfinite(f)):
        raise ValueError("samples must be finite")
    if x is None:
        x = h * np.arange(f.size)
    vals = np.abs(f) * mu(np.asarray(x, dtype=float))
    if p == math.inf:
        return _lp(vals, p)
    if p == 1.0:
        return float(h * np.sum(vals))
    return math.sqrt(h) * _lp(vals, 2.0)


def amalgam_norm(
    f: Callable[[np.ndarray], np.ndarray],
    cells: Sequence[int],
    mu: Weight,
    p,
    subgrid_points: int = 64,
) -> float:
    """Weighted amalgam norm ``(sum_j sup_{[0,1]} |f(.+j)|^p mu(j)^p)^(1/p)``.

    The supremum over each unit cell is replaced by a maximum over
    ``subgrid_points`` equispaced points of ``[0, 1)``, so the result is a
    lower bound of the true norm.  The half-open cell keeps a function
    supported on ``[0, 1)`` from leaking into cell ``-1``.
    """
    p = validate_p(p)
    cells = np.asarray(list(cells), dtype=int)
    if cells.size == 0:
        raise ValueError("cell range must be non-empty")
    if subgrid_points < 2:
        raise ValueError("need at least two subgrid points per cell")
    t = np.linspace(0.0, 1.0, subgrid_points, endpoint=False)
    local = np.array([np.max(np.abs(f(t + j))) for j in cells])
    return _lp(local * mu(cells.astype(float)), p)
