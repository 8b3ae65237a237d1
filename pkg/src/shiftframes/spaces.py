"""Synthesis, analysis and dual reconstruction in a finitely generated shift-invariant space.

Signals live on a uniform grid ``x_k = -T + k h`` with ``h = 1/q`` for an
integer ``q``, so every integer shift of a generator is a slice of one
render on the extended grid ``[-T-J, T+J]``.  Inner products use the
composite Simpson rule on that grid.

Signals store right-continuous samples together with left limits.  At a
jump the Simpson weight of an even node is split between the two one-sided
products, so a piecewise cubic integrand whose breakpoints sit on even nodes
is integrated exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .generators import GeneratorFamily, time_domain_render
from .spectral import ClassificationError, GridSpec, classify, gram_batch, pinv_hermitian
from .weights import Weight, constant_weight, grid_function_norm, seq_norm, validate_p

__all__ = [
    "RenderGrid",
    "CoefficientArray",
    "SampledSignal",
    "default_render_grid",
    "synthesize",
    "analyze",
    "reconstruct",
    "ReconstructionResult",
    "frame_ratio",
    "riesz_lower_ratio",
    "random_coefficients",
    "simpson_weights",
    "inner",
    "l2_norm",
]


@dataclass(frozen=True)
class RenderGrid:
    """Signal domain ``[-T, T]`` with step ``1/q`` and coefficient window ``[-J, J]``."""

    T: int = 40
    q: int = 256
    J: int = 16

    def __post_init__(self):
        if self.T < 1 or self.q < 2 or self.J < 0:
            raise ValueError("render grid needs T >= 1, q >= 2, J >= 0")
        if self.J > self.T:
            raise ValueError("coefficient window must fit inside the signal domain")

    @property
    def h(self) -> float:
        return 1.0 / self.q

    @property
    def x(self) -> np.ndarray:
        return np.arange(-self.T * self.q, self.T * self.q + 1) / self.q

    @property
    def size(self) -> int:
        return 2 * self.T * self.q + 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.J, self.J + 1)


def default_render_grid(family: GeneratorFamily) -> RenderGrid:
    """Band-limited generators decay slowly but need only a coarse grid."""
    if family.kind == "bump":
        return RenderGrid(T=256, q=16, J=128)
    return RenderGrid(T=40, q=256, J=16)


@dataclass
class CoefficientArray:
    """Coefficients ``c[i, j + J]`` for generator ``i`` and shift ``j`` in ``[-J, J]``."""

    values: np.ndarray
    J: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.ndim != 2 or self.values.shape[1] != 2 * self.J + 1:
            raise ValueError("coefficient array must have shape (r, 2J+1)")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("coefficients must be finite")

    @property
    def r(self) -> int:
        return self.values.shape[0]

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.J, self.J + 1)

    @classmethod
    def zeros(cls, r: int, J: int) -> "CoefficientArray":
        return cls(np.zeros((r, 2 * J + 1), dtype=complex), J)

    @classmethod
    def from_dict(cls, r: int, J: int, entries: dict) -> "CoefficientArray":
        """Build from ``{(i, j): value}``; raises if ``|j| > J``."""
        c = cls.zeros(r, J)
        for (i, j), v in entries.items():
            if abs(j) > J:
                raise ValueError(f"shift {j} outside the coefficient window [-{J}, {J}]")
            c.values[i, j + J] = v
        return c

    def to_csv(self) -> str:
        lines = ["generator,shift,real,imag"]
        for i in range(self.r):
            for j, v in zip(self.indices, self.values[i]):
                lines.append(f"{i},{j},{v.real:.17g},{v.imag:.17g}")
        return "\n".join(lines) + "\n"


@dataclass
class SampledSignal:
    """Right-continuous samples on a render grid; ``left`` holds left limits."""

    values: np.ndarray
    grid: RenderGrid
    label: str = ""
    left: np.ndarray | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.size,):
            raise ValueError("samples do not match the render grid")
        if self.left is None:
            self.left = self.values
        self.left = np.asarray(self.left, dtype=complex)
        if self.left.shape != self.values.shape:
            raise ValueError("left limits do not match the samples")
        if not (np.all(np.isfinite(self.values)) and np.all(np.isfinite(self.left))):
            raise ValueError("signal samples must be finite")

    def __sub__(self, other: "SampledSignal") -> "SampledSignal":
        return SampledSignal(self.values - other.values, self.grid, "", self.left - other.left)

    def scaled(self, s: complex) -> "SampledSignal":
        return SampledSignal(s * self.values, self.grid, self.label, s * self.left)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    def shifted(self, s: int) -> "SampledSignal":
        """``f(. - s)`` for an integer ``s``, padded with zeros at the edge."""
        k = s * self.grid.q

        def move(v):
            out = np.zeros_like(v)
            if k >= 0:
                out[k:] = v[: v.size - k]
            else:
                out[:k] = v[-k:]
            return out

        return SampledSignal(move(self.values), self.grid, f"{self.label} shifted by {s}", move(self.left))

    def to_csv(self) -> str:
        lines = ["x,real,imag"]
        for x, v in zip(self.x, self.values):
            lines.append(f"{x:.17g},{v.real:.17g},{v.imag:.17g}")
        return "\n".join(lines) + "\n"


@lru_cache(maxsize=32)
def simpson_weights(n: int, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Composite Simpson weights split into right-limit and left-limit parts.

    The two parts add up to the usual ``h/3 * (1, 4, 2, ..., 4, 1)``.
    """
    if n < 3 or n % 2 == 0:
        raise ValueError("composite Simpson needs an odd number of at least 3 points")
    right = np.full(n, 1.0)
    left = np.full(n, 1.0)
    right[1::2] = left[1::2] = 2.0
    right[-1] = 0.0
    left[0] = 0.0
    right *= h / 3.0
    left *= h / 3.0
    right.flags.writeable = False
    left.flags.writeable = False
    return right, left


def _render_left(g, x):
    return g.render_left(x) if hasattr(g, "render_left") else time_domain_render(g, x)


@lru_cache(maxsize=64)
def _extended_render(g, grid: RenderGrid) -> tuple[np.ndarray, np.ndarray]:
    span = grid.T + grid.J
    x = np.arange(-span * grid.q, span * grid.q + 1) / grid.q
    right = time_domain_render(g, x)
    left = right if g.kind == "bump" else _render_left(g, x)
    right.flags.writeable = False
    left.flags.writeable = False
    return right, left


def _shift_slice(g, grid: RenderGrid, j: int, side: int = 0) -> np.ndarray:
    """Samples of ``g(x - j)`` on the signal grid (``side`` 0 right limits, 1 left)."""
    full = _extended_render(g, grid)[side]
    start = (grid.J - j) * grid.q
    return full[start : start + grid.size]


def _shift_matrix(g, grid: RenderGrid, side: int = 0) -> np.ndarray:
    return np.stack([_shift_slice(g, grid, int(j), side) for j in grid.indices])


def inner(f: SampledSignal, g: SampledSignal) -> complex:
    wr, wl = simpson_weights(f.grid.size, f.grid.h)
    return complex(np.sum(wr * f.values * np.conj(g.values)) + np.sum(wl * f.left * np.conj(g.left)))


def synthesize(family: GeneratorFamily, c: CoefficientArray, grid: RenderGrid | None = None) -> SampledSignal:
    """``sum_i sum_j c[i, j] phi_i(x - j)`` on the grid."""
    grid = grid or default_render_grid(family)
    if c.r != family.r:
        raise ValueError("coefficient rows do not match the family size")
    if c.J > grid.J:
        nz = np.nonzero(np.any(c.values != 0, axis=0))[0] - c.J
        if nz.size and np.max(np.abs(nz)) > grid.J:
            raise ValueError(f"coefficient index outside the window [-{grid.J}, {grid.J}]")
    out = np.zeros(grid.size, dtype=complex)
    out_left = np.zeros(grid.size, dtype=complex)
    for i, g in enumerate(family.members):
        for j, v in zip(c.indices, c.values[i]):
            if v != 0 and abs(j) <= grid.J:
                out += v * _shift_slice(g, grid, int(j), 0)
                out_left += v * _shift_slice(g, grid, int(j), 1)
    return SampledSignal(out, grid, f"synthesis over {family.label}", out_left)


def analyze(f: SampledSignal, family: GeneratorFamily) -> CoefficientArray:
    """Inner products ``<f, phi_i(. - j)>`` for every generator and window shift."""
    grid = f.grid
    wr, wl = simpson_weights(grid.size, grid.h)
    fr, fl = f.values * wr, f.left * wl
    rows = []
    for g in family.members:
        row = np.conj(_shift_matrix(g, grid, 0)) @ fr
        if g.kind == "bump":
            row = row + np.conj(_shift_matrix(g, grid, 0)) @ fl
        else:
            row = row + np.conj(_shift_matrix(g, grid, 1)) @ fl
        rows.append(row)
    return CoefficientArray(np.stack(rows), grid.J)


def l2_norm(f: SampledSignal) -> float:
    return math.sqrt(max(inner(f, f).real, 0.0))


@dataclass
class ReconstructionResult:
    signal: SampledSignal
    coefficients: CoefficientArray
    relative_error: float
    window_leakage: float
    n_freq: int = 4096
    extra: dict = field(default_factory=dict)


def reconstruct(
    f: SampledSignal,
    family: GeneratorFamily,
    spec: GridSpec | None = None,
    n_freq: int = 4096,
) -> ReconstructionResult:
    """Expand ``f`` against the canonical dual and synthesise it again.

    If ``f = sum c_l(k) phi_l(. - k)`` then the analysis sequences satisfy
    ``A(xi) = conj(G(xi)) C(xi)`` for their transforms.  Multiplying by the
    pseudo-inverse of ``conj(G)`` recovers the minimal-energy coefficients;
    this is the same as analysing against the dual generators ``G^+ hat(Phi)``.
    """
    spec = spec or GridSpec()
    report = classify(family, spec)
    if report.classification == "NotClosed":
        raise ClassificationError(f"{family.label}: integer shifts are not a frame, no dual exists")
    grid = f.grid
    a = analyze(f, family).values
    J = grid.J
    if n_freq < 4 * J + 2:
        raise ValueError("frequency grid too small for the coefficient window")
    buf = np.zeros((family.r, n_freq), dtype=complex)
    idx = np.mod(np.arange(-J, J + 1), n_freq)
    buf[:, idx] = a
    A = np.fft.fft(buf, axis=1)
    xi = 2.0 * np.pi * np.arange(n_freq) / n_freq
    Gp = pinv_hermitian(gram_batch(family, xi), spec.rel_tol)
    C = np.einsum("tij,jt->it", np.conj(Gp), A)
    c_full = np.fft.ifft(C, axis=1)
    coeffs = CoefficientArray(c_full[:, idx], J)
    inside = np.sum(np.abs(coeffs.values) ** 2)
    total = np.sum(np.abs(c_full) ** 2)
    leakage = math.sqrt(max(total - inside, 0.0) / total) if total > 0 else 0.0
    rec = synthesize(family, coeffs, grid)
    nf = l2_norm(f)
    err = l2_norm(rec - f) / nf if nf > 0 else l2_norm(rec)
    rec.label = f"reconstruction over {family.label}"
    return ReconstructionResult(rec, coeffs, err, leakage, n_freq)


def _signal_norm(f: SampledSignal, mu: Weight, p) -> float:
    p = validate_p(p)
    if p == 2.0:
        m = mu(f.x)
        return l2_norm(SampledSignal(f.values * m, f.grid, "", f.left * m))
    return grid_function_norm(f.values, f.grid.h, mu, p, f.x)


def frame_ratio(f: SampledSignal, family: GeneratorFamily, mu: Weight | None = None, p=2) -> float:
    """``sum_i ||<f, phi_i(. - j)>||_{l^p_mu} / ||f||_{L^p_mu}``."""
    mu = mu or constant_weight()
    denom = _signal_norm(f, mu, p)
    if denom == 0:
        raise ZeroDivisionError("frame ratio of the zero signal")
    a = analyze(f, family)
    num = sum(seq_norm(a.values[i], mu, p, a.indices) for i in range(a.r))
    return num / denom


def riesz_lower_ratio(
    c: CoefficientArray, family: GeneratorFamily, mu: Weight | None = None, p=2, grid: RenderGrid | None = None
) -> float:
    """``||sum_i phi_i *' c^i||_{L^p_mu} / sum_i ||c^i||_{l^p_mu}`` for one representation."""
    mu = mu or constant_weight()
    denom = sum(seq_norm(c.values[i], mu, p, c.indices) for i in range(c.r))
    if denom == 0:
        raise ZeroDivisionError("ratio undefined for zero coefficients")
    return _signal_norm(synthesize(family, c, grid), mu, p) / denom


def random_coefficients(r: int, J: int, support: int, rng: np.random.Generator) -> CoefficientArray:
    """Complex Gaussian coefficients on ``[-support, support]``, zero elsewhere."""
    support = min(support, J)
    c = CoefficientArray.zeros(r, J)
    k = 2 * support + 1
    block = rng.standard_normal((r, k)) + 1j * rng.standard_normal((r, k))
    c.values[:, J - support : J + support + 1] = block
    return c
