"""Box-convolution splines with finite smoothness and compact support.

``phi_1`` is the normalised box ``(H(x) - H(x-a)) / a`` with ``H(0) = 1`` and
``phi_n = phi_{n-1} * phi_1``.  The closed form is a signed sum of truncated
powers over the knots ``m*a``; the transform is the n-th power of the box
transform.  Two oracles that share no code with the closed form live here as
well: a sampled convolution and a Gauss-Legendre Fourier quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .generators import GeneratorFamily

__all__ = [
    "SplineGenerator",
    "box_eval",
    "closed_form_eval",
    "convolve_oracle",
    "hat_eval",
    "quadrature_ft",
    "spline_mass",
    "spline_family",
    "r_matrix_at",
    "poisson_gram",
    "tail_bound",
    "choose_truncation",
]

TWO_PI = 2.0 * math.pi
MAX_DEGREE = 20


@dataclass(frozen=True)
class SplineGenerator:
    """``phi_n`` for box width ``a``; supported on ``[0, n*a]``."""

    n: int
    a: float = 1.0
    name: str = ""

    kind = "spline"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(
                f"phi_n is built from n box factors, n a positive integer; got n={self.n}"
            )
        if self.n > MAX_DEGREE:
            raise ValueError(f"n={self.n} exceeds the supported maximum {MAX_DEGREE}")
        if not (math.isfinite(self.a) and self.a > 0):
            raise ValueError(f"box width must be positive, got {self.a}")

    @property
    def coefficients(self) -> list[tuple[float, float]]:
        """``(weight, knot)`` pairs of the truncated-power expansion."""
        n, a = self.n, self.a
        scale = a**n * math.factorial(n - 1)
        return [((-1) ** m * math.comb(n, m) / scale, m * a) for m in range(n + 1)]

    @property
    def knots(self) -> np.ndarray:
        return self.a * np.arange(self.n + 1)

    def support(self) -> tuple[tuple[float, float], ...]:
        return ((0.0, self.n * self.a),)

    def __call__(self, x):
        return closed_form_eval(self, x)

    def hat(self, xi):
        return hat_eval(self, xi)

    def render(self, x) -> np.ndarray:
        """Right-continuous samples, matching ``H(0) = 1``."""
        return closed_form_eval(self, np.asarray(x, dtype=float)).astype(complex)

    def render_left(self, x) -> np.ndarray:
        """Left limits; they differ from :meth:`render` only at the jumps of the box."""
        x = np.asarray(x, dtype=float)
        if self.n > 1:
            return self.render(x)
        return np.where((x > 0.0) & (x <= self.a), 1.0 / self.a, 0.0).astype(complex)

    def tail_bound(self, K: int) -> float:
        return tail_bound(self.n, self.a, K)


def box_eval(a: float, x):
    """``(H(x) - H(x-a)) / a`` with the convention ``H(0) = 1``."""
    if not a > 0:
        raise ValueError(f"box width must be positive, got {a}")
    x = np.asarray(x, dtype=float)
    out = np.where((x >= 0.0) & (x < a), 1.0 / a, 0.0)
    return float(out) if out.ndim == 0 else out


def _truncated_sum(s: SplineGenerator, x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    for w, knot in s.coefficients:
        d = x - knot
        out += w * np.where(d >= 0.0, d, 0.0) ** (s.n - 1)
    return out


def closed_form_eval(s: SplineGenerator, x):
    """Truncated-power closed form of ``phi_n``.

    For ``n >= 2`` the right half is evaluated through the symmetry
    ``phi_n(n*a - x) = phi_n(x)``, which keeps the alternating sum short.
    """
    x = np.asarray(x, dtype=float)
    if s.n == 1:
        return box_eval(s.a, x)
    L = s.n * s.a
    inside = (x > 0.0) & (x < L)
    y = np.where(x > 0.5 * L, L - x, x)
    out = np.where(inside, _truncated_sum(s, y), 0.0)
    out = np.maximum(out, 0.0)
    return float(out) if out.ndim == 0 else out


def convolve_oracle(n: int, a: float, h: float) -> tuple[np.ndarray, np.ndarray]:
    """``phi_n`` on ``[0, n*a]`` by ``n-1`` discrete convolutions of a sampled box.

    The box is sampled on ``0, h, ..., a`` with half values at both ends
    (trapezoid weights), so every discrete convolution is a trapezoid rule
    and the sampled mass stays exactly 1.  Requires ``a/h`` to be an
    integer of at least 64.
    """
    SplineGenerator(n, a)
    if not h > 0:
        raise ValueError("grid step must be positive")
    q = a / h
    M = int(round(q))
    if M < 64 or abs(q - M) > 1e-9 * q:
        raise ValueError(f"grid step {h:g} must be a/M with integer M >= 64")
    box = np.full(M + 1, 1.0 / a)
    box[0] = box[-1] = 0.5 / a
    out = box.copy()
    for _ in range(n - 1):
        out = h * np.convolve(out, box)
    x = h * np.arange(out.size)
    return x, out


def hat_eval(s: SplineGenerator, xi):
    """``((1 - exp(-i a xi)) / (i a xi))**n``, the transform under ``exp(-i x xi)``.

    Written as ``(exp(-i a xi/2) * sinc(a xi/2))**n``; ``np.sinc`` resolves the
    removable point at the origin.
    """
    xi = np.asarray(xi, dtype=float)
    half = 0.5 * s.a * xi
    out = (np.exp(-1j * half) * np.sinc(half / math.pi)) ** s.n
    return complex(out) if out.ndim == 0 else out


@lru_cache(maxsize=64)
def _gauss_nodes(n: int, a: float, pieces: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    t, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, n * a, n * pieces + 1)
    lo, hi = edges[:-1, None], edges[1:, None]
    nodes = 0.5 * (hi - lo) * t + 0.5 * (hi + lo)
    weights = 0.5 * (hi - lo) * w
    return nodes.ravel(), weights.ravel()


def quadrature_ft(s: SplineGenerator, xi, pieces: int = 8, order: int = 32):
    """Fourier transform by Gauss-Legendre quadrature of the closed form.

    Each knot interval is split into ``pieces`` panels, so the integrand is a
    polynomial times an exponential on every panel.
    """
    nodes, weights = _gauss_nodes(s.n, float(s.a), pieces, order)
    vals = closed_form_eval(s, nodes) * weights
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    out = np.exp(-1j * np.outer(xi, nodes)) @ vals
    return out


def spline_mass(s: SplineGenerator) -> float:
    nodes, weights = _gauss_nodes(s.n, float(s.a), 1, max(s.n + 1, 8))
    return float(np.sum(closed_form_eval(s, nodes) * weights))


def spline_family(k: int, r: int, a: float = 1.0) -> GeneratorFamily:
    """``(phi_k, ..., phi_{k+r-1})`` with a common box width."""
    if int(k) != k or k < 1:
        raise ValueError(
            f"phi_n exists only for n = 1, 2, ... (n box factors); got k={k}"
        )
    if int(r) != r or r < 1:
        raise ValueError(f"r must be a positive integer, got {r}")
    k, r, a = int(k), int(r), float(a)
    members = tuple(SplineGenerator(k + m, a, f"phi_{k + m}") for m in range(r))
    config = {"config": "spline", "k": k, "r": r, "a": a}
    label = f"spline k={k} r={r} a={a:g}"
    return GeneratorFamily(members, label, "RieszBasis", config)


def r_matrix_at(family: GeneratorFamily, xi: float, j_range) -> np.ndarray:
    """Rows ``hat(phi_{k+m})(xi + 2*pi*j)`` over the columns ``j_range``."""
    js = np.asarray(list(j_range), dtype=float)
    if js.size == 0:
        raise ValueError("j_range must be non-empty")
    pts = float(xi) + TWO_PI * js
    return np.vstack([np.atleast_1d(g.hat(pts)) for g in family.members])


def poisson_gram(family: GeneratorFamily, xi) -> np.ndarray:
    """Exact Gram symbol of a spline family, one matrix per ``xi``.

    The periodised product ``sum_k hat(phi_m) conj(hat(phi_n))(xi + 2 pi k)``
    equals ``sum_j <phi_m, phi_n(. - j)> exp(-i j xi)``, and the
    correlation of two splines of one width is ``phi_{m+n}(x + n a)``.  The
    sum over ``j`` therefore has finitely many terms.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    r = family.r
    G = np.zeros((xi.size, r, r), dtype=complex)
    for p, gm in enumerate(family.members):
        for q in range(p, r):
            gn = family.members[q]
            if gm.a != gn.a:
                raise ValueError("all splines of a family must share the box width")
            s = SplineGenerator(gm.n + gn.n, gm.a)
            shift = gn.n * gn.a
            j = np.arange(math.floor(-shift) - 1, math.ceil(gm.n * gm.a) + 2)
            c = closed_form_eval(s, j + shift)
            G[:, p, q] = np.exp(-1j * np.outer(xi, j)) @ c
            if q != p:
                G[:, q, p] = np.conj(G[:, p, q])
    return G


def tail_bound(n: int, a: float, K: int) -> float:
    """Upper bound for ``sum_{|k| > K} |hat(phi_n)(xi + 2 pi k)|**2`` on ``[-pi, pi]``.

    Uses ``|hat(phi_n)(t)| <= (2 / (a|t|))**n`` and ``|xi + 2 pi k| >= pi(2|k| - 1)``,
    then compares the sum with an integral.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    c = (2.0 / (a * math.pi)) ** (2 * n)
    return 2.0 * c * (2 * K - 1) ** (1 - 2 * n) / (2.0 * (2 * n - 1))


def choose_truncation(family: GeneratorFamily, tol: float = 1e-12, k_max: int = 512) -> tuple[int, float]:
    """Smallest ``K <= k_max`` whose tail bound is below ``tol`` for every member.

    Returns ``(K, achieved_bound)``; low-degree members may stop at ``k_max``
    with a bound above ``tol``.
    """
    worst = 0
    for g in family.members:
        K = 1
        while K < k_max and tail_bound(g.n, g.a, K) >= tol:
            K *= 2
        K = min(K, k_max)
        lo = max(1, K // 2)
        while lo < K:
            mid = (lo + K) // 2
            if tail_bound(g.n, g.a, mid) < tol:
                K = mid
            else:
                lo = mid + 1
        worst = max(worst, K)
    achieved = max(tail_bound(g.n, g.a, worst) for g in family.members)
    return worst, achieved
