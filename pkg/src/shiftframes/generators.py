"""Band-limited generator families built from smooth compactly supported bumps.

Every generator here is described by its Fourier transform, a bump profile
translated by an integer multiple of pi or 2*pi.  The profile is the
standard mollifier ``exp(1 - 1/(1-t^2))`` rescaled to the support interval
and normalised to peak value 1; two-interval profiles are sums of two such
bumps.  Fourier convention: ``hat(phi)(xi) = int phi(x) exp(-i x xi) dx``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

__all__ = [
    "BumpProfile",
    "BumpGenerator",
    "GeneratorFamily",
    "make_bump",
    "make_two_interval_bump",
    "family_theorem_3",
    "family_theorem_3_general",
    "family_lemma_4_1",
    "family_theorem_4_3",
    "family_theorem_4_6",
    "claim_section3_negative",
    "theorem3_gap_condition",
    "theorem3_expectation",
    "hat_eval",
    "time_domain_render",
]

PI = math.pi
TWO_PI = 2.0 * math.pi

# Largest array (in complex entries) built in one chunk of the render quadrature.
_RENDER_CHUNK = 4_000_000


def _mollifier(x: np.ndarray, lo: float, hi: float) -> np.ndarray:
    t = (2.0 * x - lo - hi) / (hi - lo)
    out = np.zeros(np.shape(x), dtype=float)
    inside = np.abs(t) < 1.0
    ti = t[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - ti * ti))
    return out


@dataclass(frozen=True)
class BumpProfile:
    """Smooth profile, positive exactly on the open support intervals."""

    intervals: tuple[tuple[float, float], ...]
    tag: str = ""

    def __post_init__(self):
        if not self.intervals:
            raise ValueError("profile needs at least one support interval")
        for lo, hi in self.intervals:
            if not lo < hi:
                raise ValueError(f"degenerate support interval [{lo}, {hi}]")
        ordered = sorted(self.intervals)
        for (_, hi), (lo, _) in zip(ordered, ordered[1:]):
            if lo <= hi:
                raise ValueError("support intervals must be disjoint")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=float)
        for lo, hi in self.intervals:
            out += _mollifier(x, lo, hi)
        return out

    def interior(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        mask = np.zeros(x.shape, dtype=bool)
        for lo, hi in self.intervals:
            mask |= (x > lo) & (x < hi)
        return mask

    @property
    def extent(self) -> tuple[float, float]:
        return min(lo for lo, _ in self.intervals), max(hi for _, hi in self.intervals)

    def resolution_distance(self, level: float) -> float:
        """Largest distance from an endpoint at which the profile is still below ``level``.

        Near an endpoint the mollifier is flatter than any power, so entries
        closer than this to a support edge cannot be told apart from zero at
        relative precision ``level``.
        """
        if not 0.0 < level < 1.0:
            raise ValueError("level must lie in (0, 1)")
        t_star = math.sqrt(1.0 - 1.0 / (1.0 - math.log(level)))
        return max(0.5 * (hi - lo) * (1.0 - t_star) for lo, hi in self.intervals)


def make_bump(support, epsilon_tag: float | None = None) -> BumpProfile:
    """Mollifier bump on ``[l, u]`` with peak value 1 at the midpoint."""
    lo, hi = (float(v) for v in support)
    if not lo < hi:
        raise ValueError(f"bump support needs l < u, got [{lo}, {hi}]")
    tag = "" if epsilon_tag is None else f"eps={epsilon_tag:g}"
    return BumpProfile(((lo, hi),), tag)


def make_two_interval_bump(i1, i2) -> BumpProfile:
    """Sum of two mollifier bumps on disjoint intervals."""
    a = tuple(float(v) for v in i1)
    b = tuple(float(v) for v in i2)
    for lo, hi in (a, b):
        if not lo < hi:
            raise ValueError(f"degenerate support interval [{lo}, {hi}]")
    (lo1, hi1), (lo2, hi2) = sorted((a, b))
    if lo2 <= hi1:
        raise ValueError("two-interval bump needs disjoint intervals")
    return BumpProfile(((lo1, hi1), (lo2, hi2)))


@dataclass(frozen=True)
class BumpGenerator:
    """Generator with ``hat(phi)(xi) = profile(xi + shift*unit)``."""

    profile: BumpProfile
    shift: int = 0
    unit: float = PI
    name: str = "phi"

    kind = "bump"

    def __post_init__(self):
        if self.unit not in (PI, TWO_PI):
            raise ValueError("shift unit must be pi or 2*pi")

    @property
    def offset(self) -> float:
        return self.shift * self.unit

    def hat(self, xi):
        xi = np.asarray(xi, dtype=float)
        return self.profile(xi + self.offset).astype(complex)

    def hat_interior(self, xi) -> np.ndarray:
        return self.profile.interior(np.asarray(xi, dtype=float) + self.offset)

    def support(self) -> tuple[tuple[float, float], ...]:
        """Frequency support of ``hat(phi)``: the profile support moved by ``-offset``."""
        return tuple((lo - self.offset, hi - self.offset) for lo, hi in self.profile.intervals)

    def endpoints(self) -> list[float]:
        return [e for iv in self.support() for e in iv]

    def max_frequency(self) -> float:
        return max(max(abs(lo), abs(hi)) for lo, hi in self.support())

    def render(self, x) -> np.ndarray:
        return time_domain_render(self, x)


@dataclass(frozen=True)
class GeneratorFamily:
    """Ordered tuple of generators of one kind plus provenance."""

    members: tuple
    label: str
    expect: str | None = None
    config: dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if len(self.members) < 1:
            raise ValueError("a family needs at least one generator")
        kinds = {g.kind for g in self.members}
        if len(kinds) != 1:
            raise ValueError("all generators of a family must share one representation kind")
        if self.expect not in (None, "RieszBasis", "Frame", "NotClosed"):
            raise ValueError(f"unknown expected classification {self.expect!r}")

    @property
    def r(self) -> int:
        return len(self.members)

    @property
    def kind(self) -> str:
        return self.members[0].kind

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


def hat_eval(g, xi):
    """Fourier transform of a single generator at ``xi`` (scalar or array)."""
    out = g.hat(xi)
    return complex(out) if np.ndim(out) == 0 else out


def time_domain_render(g, x) -> np.ndarray:
    """Samples of the generator on the equispaced points ``x``.

    Band-limited generators are synthesised by the trapezoid rule on their
    frequency support.  The node spacing is chosen so that the aliases of
    the rule, which sit at multiples of ``2*pi/spacing``, land at least
    four times the grid half-width away.  Other kinds render themselves.
    """
    x = np.asarray(x, dtype=float)
    if g.kind != "bump":
        return g.render(x)
    if x.size > 1:
        h = float(x[1] - x[0])
        if h <= 0 or not np.allclose(np.diff(x), h, rtol=1e-9, atol=1e-12):
            raise ValueError("render grid must be equispaced and increasing")
        if h > PI / g.max_frequency():
            raise ValueError(
                f"grid step {h:g} does not resolve frequencies up to {g.max_frequency():g}"
            )
    reach = max(float(np.max(np.abs(x))), 1.0) if x.size else 1.0
    flat = x.ravel()
    out = np.zeros(flat.size, dtype=complex)
    for lo, hi in g.support():
        n = max(int(math.ceil((hi - lo) * 4.0 * reach / TWO_PI)), 512)
        nodes = np.linspace(lo, hi, n + 1)
        step = nodes[1] - nodes[0]
        w = g.profile(nodes + g.offset)
        keep = w > 0
        nodes, w = nodes[keep], w[keep] * (step / TWO_PI)
        chunk = max(1, _RENDER_CHUNK // max(nodes.size, 1))
        for s in range(0, flat.size, chunk):
            out[s : s + chunk] += np.exp(1j * np.outer(flat[s : s + chunk], nodes)) @ w
    return out.reshape(x.shape)


def _check_epsilon(epsilon: float) -> float:
    epsilon = float(epsilon)
    if not 0.0 < epsilon < 0.25:
        raise ValueError(f"epsilon must lie in (0, 1/4), got {epsilon}")
    return epsilon


def _check_k(k_list) -> tuple[int, ...]:
    ks = tuple(int(k) for k in k_list)
    if not ks:
        raise ValueError("k_list must be non-empty")
    if any(int(k) != k for k in k_list):
        raise ValueError("shifts must be integers")
    if len(set(ks)) != len(ks):
        raise ValueError("shifts must be distinct")
    return ks


def theorem3_gap_condition(k_list) -> bool:
    """``|k2 - k1| == 2`` and every pairwise gap is at least 2 (needs r >= 2)."""
    ks = tuple(int(k) for k in k_list)
    if len(ks) < 2 or abs(ks[1] - ks[0]) != 2:
        return False
    return all(abs(a - b) >= 2 for i, a in enumerate(ks) for b in ks[i + 1 :])


def theorem3_expectation(k_list) -> str | None:
    """Verdict predicted for a pi-shift family whose profile support exceeds 2*pi.

    ``None`` means no prediction is made for this shift pattern.
    """
    ks = tuple(int(k) for k in k_list)
    if len(ks) < 2:
        return None
    gaps = [abs(a - b) for i, a in enumerate(ks) for b in ks[i + 1 :]]
    if theorem3_gap_condition(ks):
        return "RieszBasis"
    if abs(ks[1] - ks[0]) == 2 and 1 in gaps:
        return "NotClosed"
    if len(ks) == 2 and gaps[0] == 1:
        return "NotClosed"
    return None


def _pi_shift_family(profile, ks, label, config, expect) -> GeneratorFamily:
    members = tuple(
        BumpGenerator(profile, k, PI, name=f"phi_{i + 1}") for i, k in enumerate(ks)
    )
    if expect is None:
        expect = theorem3_expectation(ks)
    return GeneratorFamily(members, label, expect, config)


def family_theorem_3(k_list, epsilon: float = 0.2, expect: str | None = None) -> GeneratorFamily:
    """theta on ``[-pi-eps, pi+eps]`` translated by ``k_i * pi``."""
    eps = _check_epsilon(epsilon)
    ks = _check_k(k_list)
    theta = make_bump((-PI - eps, PI + eps), eps)
    gap = "satisfied" if theorem3_gap_condition(ks) else "violated"
    label = f"theorem3 k={list(ks)} eps={eps:g}: gap condition {gap}"
    config = {"config": "theorem3", "k": list(ks), "epsilon": eps}
    return _pi_shift_family(theta, ks, label, config, expect)


def family_theorem_3_general(
    support, k_list, epsilon: float | None = None, expect: str | None = None
) -> GeneratorFamily:
    """Same construction with an arbitrary support ``[a, b]`` longer than ``2*pi``."""
    a, b = (float(v) for v in support)
    if not b - a > TWO_PI:
        raise ValueError(f"support length {b - a:g} must exceed 2*pi")
    ks = _check_k(k_list)
    theta = make_bump((a, b), epsilon)
    gap = "satisfied" if theorem3_gap_condition(ks) else "violated"
    label = f"theorem3_general supp=[{a:g},{b:g}] k={list(ks)}: gap condition {gap}"
    config = {"config": "theorem3_general", "support": [a, b], "k": list(ks)}
    if epsilon is not None:
        config["epsilon"] = float(epsilon)
    return _pi_shift_family(theta, ks, label, config, expect)


def _theta_psi(eps: float) -> tuple[BumpProfile, BumpProfile]:
    return (
        make_bump((-eps, TWO_PI + eps), eps),
        make_bump((eps, TWO_PI - eps), eps),
    )


def family_lemma_4_1(epsilon: float = 0.2) -> GeneratorFamily:
    """The pair (theta, psi) with nested supports; rank 1 everywhere."""
    eps = _check_epsilon(epsilon)
    theta, psi = _theta_psi(eps)
    members = (BumpGenerator(theta, 0, TWO_PI, "theta"), BumpGenerator(psi, 0, TWO_PI, "psi"))
    config = {"config": "lemma41", "epsilon": eps}
    return GeneratorFamily(members, f"lemma41 eps={eps:g}", "Frame", config)


def family_theorem_4_3(r: int, epsilon: float = 0.2) -> GeneratorFamily:
    """``2r`` generators: theta then psi, each translated by ``2k*pi``, k < r."""
    if int(r) != r or r < 1:
        raise ValueError(f"r must be a positive integer, got {r}")
    r = int(r)
    eps = _check_epsilon(epsilon)
    theta, psi = _theta_psi(eps)
    members = tuple(BumpGenerator(theta, k, TWO_PI, f"theta_{k}") for k in range(r)) + tuple(
        BumpGenerator(psi, k, TWO_PI, f"psi_{k}") for k in range(r)
    )
    config = {"config": "theorem43", "r": r, "epsilon": eps}
    return GeneratorFamily(members, f"theorem43 r={r} eps={eps:g}", "Frame", config)


def family_theorem_4_6(r: int, epsilon: float = 0.2) -> GeneratorFamily:
    """``3r`` generators built from theta, the two-interval tau and omega_bump."""
    if int(r) != r or r < 1:
        raise ValueError(f"r must be a positive integer, got {r}")
    r = int(r)
    eps = _check_epsilon(epsilon)
    theta = make_bump((-eps, TWO_PI + eps), eps)
    tau = make_two_interval_bump((eps, PI - eps), (PI + eps, TWO_PI - eps))
    omega_bump = make_bump((-3 * PI - eps, -PI + eps), eps)
    members = (
        tuple(BumpGenerator(theta, k, TWO_PI, f"theta_{k}") for k in range(r))
        + tuple(BumpGenerator(tau, k, TWO_PI, f"tau_{k}") for k in range(r))
        + tuple(BumpGenerator(omega_bump, k, TWO_PI, f"omega_bump_{k}") for k in range(r))
    )
    config = {"config": "theorem46", "r": r, "epsilon": eps}
    return GeneratorFamily(members, f"theorem46 r={r} eps={eps:g}", "Frame", config)


def claim_section3_negative(margin: float = 0.2, k_list=(0,)) -> GeneratorFamily:
    """theta supported inside ``[-pi, pi]``; its Gram symbol vanishes on an arc around pi.

    ``margin`` shrinks the support to ``[-pi+margin, pi-margin]`` so the zero
    set is an interval wider than any guard band.
    """
    margin = float(margin)
    if not 0.0 <= margin < PI:
        raise ValueError(f"margin must lie in [0, pi), got {margin}")
    ks = _check_k(k_list)
    theta = make_bump((-PI + margin, PI - margin))
    members = tuple(BumpGenerator(theta, k, PI, f"phi_{i + 1}") for i, k in enumerate(ks))
    config = {"config": "claim_section3_negative", "margin": margin, "k": list(ks)}
    label = f"claim_section3_negative margin={margin:g} k={list(ks)}"
    return GeneratorFamily(members, label, "NotClosed", config)
