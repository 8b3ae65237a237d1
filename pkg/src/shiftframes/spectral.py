"""Shifted-Fourier matrices, Gram symbols, rank profiles and frame classification.

For a family ``Phi = (phi_1, ..., phi_r)`` the shifted matrix at ``xi`` has
rows ``hat(phi_i)(xi + 2 pi j)`` over the integers ``j``; the Gram symbol is
``G(xi) = S(xi) S(xi)^H``.  Integer shifts of ``Phi`` form a frame for their
closed span exactly when the rank of ``S`` is constant in ``xi``, and a Riesz
basis when that constant rank is ``r``.  All certificates here are taken on
a finite grid of one period.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import mpmath
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .generators import GeneratorFamily
from .spline import choose_truncation, poisson_gram

__all__ = [
    "cached_rank_profile",
    "GridSpec",
    "ShiftedMatrixSample",
    "GramSample",
    "RankProfile",
    "FrameReport",
    "ClassificationError",
    "shifted_matrix_at",
    "gram_at",
    "gram_batch",
    "numeric_rank",
    "structural_rank",
    "regime_boundaries",
    "rank_profile",
    "classify",
    "canonical_dual_at",
    "condition_constant_test",
    "lemma2_tests",
    "lemma2_equivalence_check",
    "SCHEMA_VERSION",
]

PI = math.pi
TWO_PI = 2.0 * math.pi
SCHEMA_VERSION = 1

# Spline entries at or below this modulus count as structural zeros.
SPLINE_PATTERN_FLOOR = 1e-13
# Extended precision for the condition-constant test.
MP_DPS = 200
# Approach to a support edge stops where the bump drops below this level.
MP_STOP_LEVEL = 1e-60
# Per-step ratio below which an eigenvalue counts as still falling.
VANISH_STEP = 0.75
# Allowed growth of successive ratios before a fall counts as easing off.
RATIO_SLACK = 1.02
# An upward jump this large means the falling eigenvalue dropped below working precision.
LOSS_JUMP = 1e6
# Guard width as a multiple of the distance where a bump falls below sqrt(rel_tol).
GUARD_MARGIN = 1.0


class ClassificationError(RuntimeError):
    """Raised when an operation needs a frame but the family is not one."""


@dataclass(frozen=True)
class GridSpec:
    """Scan grid over one period of ``xi``."""

    n: int = 2048
    guard_band: float = 1e-3
    rel_tol: float = 1e-9
    spline_k_max: int = 512

    def __post_init__(self):
        if self.n < 64:
            raise ValueError("scan grid needs at least 64 points")
        if not self.guard_band > 0:
            raise ValueError("guard band must be positive")
        if not 0 < self.rel_tol < 1:
            raise ValueError("rel_tol must lie in (0, 1)")


@dataclass
class ShiftedMatrixSample:
    xi: float
    columns: list[int]
    entries: np.ndarray
    pattern: np.ndarray


@dataclass
class GramSample:
    xi: float
    matrix: np.ndarray
    truncation: int | None = None


@dataclass
class RankProfile:
    grid: np.ndarray
    numeric_rank: np.ndarray
    structural_rank: np.ndarray
    gram_rank: np.ndarray
    guard: np.ndarray
    min_eig: np.ndarray
    max_eig: np.ndarray
    min_nonzero_eig: np.ndarray
    guard_band: float
    rel_tol: float
    boundaries: list[float] = field(default_factory=list)
    guard_widths: list[float] = field(default_factory=list)

    @property
    def distinct_values(self) -> set[int]:
        return {int(v) for v in self.numeric_rank[~self.guard]}

    @property
    def distinct_structural(self) -> set[int]:
        return {int(v) for v in self.structural_rank[~self.guard]}

    @property
    def distinct_gram(self) -> set[int]:
        return {int(v) for v in self.gram_rank[~self.guard]}

    @property
    def agreement(self) -> bool:
        keep = ~self.guard
        return bool(np.all(self.numeric_rank[keep] == self.structural_rank[keep]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(
            ["schema_version", "xi", "numeric_rank", "structural_rank", "guard", "min_eig", "max_eig"]
        )
        for t in range(self.grid.size):
            w.writerow(
                [
                    SCHEMA_VERSION,
                    f"{self.grid[t]:.17g}",
                    "" if self.guard[t] else int(self.numeric_rank[t]),
                    int(self.structural_rank[t]),
                    int(self.guard[t]),
                    f"{self.min_eig[t]:.17g}",
                    f"{self.max_eig[t]:.17g}",
                ]
            )
        return buf.getvalue()


@dataclass
class FrameReport:
    label: str
    r: int
    classification: str
    rank_constant: int | None
    distinct_ranks: list[int]
    frame_bounds: tuple[float, float]
    gram_condition_constant: float
    ranks_agree: bool
    grid_points: int
    guard_points: int
    guard_band: float
    rel_tol: float
    expect: str | None = None
    truncation: int | None = None
    truncation_tail: float | None = None
    note: str = (
        "certified on a finite grid of one period; points inside guard bands "
        "report structural rank only"
    )

    @property
    def expectation_met(self) -> bool | None:
        return None if self.expect is None else self.expect == self.classification

    def to_dict(self) -> dict:
        d = asdict(self)
        d["frame_bounds"] = [float(v) for v in self.frame_bounds]
        d["expectation_met"] = self.expectation_met
        d["schema_version"] = SCHEMA_VERSION
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


# ---------------------------------------------------------------- matrices


def _truncation(family: GeneratorFamily, spec: GridSpec | None = None) -> tuple[int, float]:
    k_max = GridSpec().spline_k_max if spec is None else spec.spline_k_max
    return _cached_truncation(family, k_max)


@lru_cache(maxsize=64)
def _cached_truncation(family: GeneratorFamily, k_max: int) -> tuple[int, float]:
    return choose_truncation(family, 1e-12, k_max)


def _bump_columns(family: GeneratorFamily, xi: float) -> list[int]:
    cols: set[int] = set()
    for g in family.members:
        for lo, hi in g.support():
            j0 = math.ceil((lo - xi) / TWO_PI)
            j1 = math.floor((hi - xi) / TWO_PI)
            for j in range(j0, j1 + 1):
                if g.hat_interior(xi + TWO_PI * j):
                    cols.add(j)
    return sorted(cols)


def shifted_matrix_at(family: GeneratorFamily, xi: float, spec: GridSpec | None = None) -> ShiftedMatrixSample:
    """Nonzero columns of ``[hat(Phi)(xi + 2 pi j)]_j`` with their support pattern.

    Bump families keep exactly the columns that meet an open support.
    Spline families keep ``|j - j0| <= K`` around the column nearest ``xi``
    and drop columns whose entries all fall below the pattern floor.
    """
    xi = float(xi)
    r = family.r
    if family.kind == "bump":
        cols = _bump_columns(family, xi)
        pts = xi + TWO_PI * np.asarray(cols, dtype=float)
        entries = np.zeros((r, len(cols)), dtype=complex)
        pattern = np.zeros((r, len(cols)), dtype=bool)
        if cols:
            for i, g in enumerate(family.members):
                entries[i] = g.hat(pts)
                pattern[i] = g.hat_interior(pts)
        return ShiftedMatrixSample(xi, cols, entries, pattern)
    K, _ = _truncation(family, spec)
    j0 = -int(round(xi / TWO_PI))
    js = np.arange(j0 - K, j0 + K + 1)
    pts = xi + TWO_PI * js
    entries = np.vstack([g.hat(pts) for g in family.members])
    pattern = np.abs(entries) > SPLINE_PATTERN_FLOOR
    keep = pattern.any(axis=0)
    return ShiftedMatrixSample(xi, [int(j) for j in js[keep]], entries[:, keep], pattern[:, keep])


def _bump_k_range(family: GeneratorFamily, xi_lo: float, xi_hi: float) -> np.ndarray:
    lo = min(iv[0] for g in family.members for iv in g.support())
    hi = max(iv[1] for g in family.members for iv in g.support())
    return np.arange(math.floor((lo - xi_hi) / TWO_PI) - 1, math.ceil((hi - xi_lo) / TWO_PI) + 2)


def gram_batch(family: GeneratorFamily, xis) -> np.ndarray:
    """Gram symbols ``G(xi)`` for an array of ``xi``; shape ``(len(xi), r, r)``.

    Bump families sum the pairwise products over every translate that can
    meet a support, with no pattern filtering; spline families use the
    exact finite correlation sum.
    """
    xis = np.atleast_1d(np.asarray(xis, dtype=float))
    if family.kind != "bump":
        G = poisson_gram(family, xis)
    else:
        ks = _bump_k_range(family, float(xis.min()), float(xis.max()))
        pts = xis[:, None] + TWO_PI * ks[None, :]
        H = np.stack([g.hat(pts) for g in family.members], axis=1)
        G = np.einsum("tik,tjk->tij", H, np.conj(H))
    return 0.5 * (G + np.conj(np.swapaxes(G, 1, 2)))


def gram_at(family: GeneratorFamily, xi: float) -> GramSample:
    """Both representations give an exact finite sum, so ``truncation`` stays ``None``."""
    return GramSample(float(xi), gram_batch(family, [xi])[0], None)


def numeric_rank(M, rel_tol: float = 1e-9) -> int:
    """Number of singular values above ``rel_tol`` times the largest."""
    if not 0 < rel_tol < 1:
        raise ValueError("rel_tol must lie in (0, 1)")
    M = np.asarray(M)
    if M.size == 0:
        return 0
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


def structural_rank(M, support_pattern=None) -> int:
    """Size of a maximum matching in the bipartite graph of the nonzero pattern."""
    if support_pattern is None:
        support_pattern = np.asarray(M) != 0
    P = np.asarray(support_pattern, dtype=bool)
    if M is not None and np.shape(M) != P.shape:
        raise ValueError("pattern shape does not match the matrix")
    if P.size == 0 or not P.any():
        return 0
    match = maximum_bipartite_matching(csr_matrix(P.astype(np.int8)), perm_type="column")
    return int(np.sum(match >= 0))


# ----------------------------------------------------------------- profiles


def _wrap(x: float) -> float:
    return (x + PI) % TWO_PI - PI


def regime_boundaries(family: GeneratorFamily, rel_tol: float = 1e-9, guard_band: float = 1e-3):
    """Support endpoints folded into ``[-pi, pi)`` with the guard width around each.

    The guard is the larger of ``guard_band`` and the distance within which
    the bump falls below ``sqrt(rel_tol)``, doubled for margin.
    """
    if family.kind != "bump":
        return [], []
    level = math.sqrt(rel_tol)
    out: dict[float, float] = {}
    for g in family.members:
        for iv in g.support():
            w = max(guard_band, GUARD_MARGIN * _interval_resolution(iv, level))
            for e in iv:
                b = round(_wrap(e), 12)
                out[b] = max(out.get(b, 0.0), w)
    bs = sorted(out)
    return bs, [out[b] for b in bs]


def _interval_resolution(iv, level: float) -> float:
    lo, hi = iv
    t_star = math.sqrt(1.0 - 1.0 / (1.0 - math.log(level)))
    return 0.5 * (hi - lo) * (1.0 - t_star)


def _circ_dist(x: np.ndarray, b: float) -> np.ndarray:
    return np.abs(_wrap_arr(x - b))


def _wrap_arr(x: np.ndarray) -> np.ndarray:
    return (x + PI) % TWO_PI - PI


def scan_grid(family: GeneratorFamily, spec: GridSpec) -> np.ndarray:
    base = -PI + TWO_PI * np.arange(spec.n) / spec.n
    bs, ws = regime_boundaries(family, spec.rel_tol, spec.guard_band)
    extra = []
    for b, w in zip(bs, ws):
        for d in (spec.guard_band, 1.01 * w):
            extra += [b - d, b + d]
    if len(bs) > 1:
        ext = bs + [bs[0] + TWO_PI]
        extra += [0.5 * (u + v) for u, v in zip(ext, ext[1:])]
    pts = np.concatenate([base, _wrap_arr(np.asarray(extra, dtype=float))])
    return np.unique(np.round(pts, 14))


def _eig_summary(G: np.ndarray, rel_tol: float):
    lam = np.linalg.eigvalsh(G)
    lmax = lam[:, -1]
    lmin = lam[:, 0]
    thr = rel_tol * np.maximum(lmax, 0.0)
    masked = np.where(lam > thr[:, None], lam, np.inf)
    lnz = masked.min(axis=1)
    rank = np.sum(lam > thr[:, None], axis=1)
    rank = np.where(lmax > 0, rank, 0)
    return lmin, lmax, lnz, rank


def rank_profile(family: GeneratorFamily, spec: GridSpec | None = None, grid=None) -> RankProfile:
    """Numeric, structural and Gram ranks over a scan grid of one period."""
    spec = spec or GridSpec()
    xs = scan_grid(family, spec) if grid is None else np.asarray(grid, dtype=float)
    if xs.size == 0:
        raise ValueError("empty scan grid")
    bs, ws = regime_boundaries(family, spec.rel_tol, spec.guard_band)
    guard = np.zeros(xs.size, dtype=bool)
    for b, w in zip(bs, ws):
        guard |= _circ_dist(xs, b) < w
    nr = np.zeros(xs.size, dtype=int)
    sr = np.zeros(xs.size, dtype=int)
    for t, x in enumerate(xs):
        S = shifted_matrix_at(family, x, spec)
        nr[t] = numeric_rank(S.entries, spec.rel_tol)
        sr[t] = structural_rank(S.entries, S.pattern)
    G = gram_batch(family, xs)
    lmin, lmax, lnz, grank = _eig_summary(G, spec.rel_tol)
    return RankProfile(xs, nr, sr, grank, guard, lmin, lmax, lnz, spec.guard_band, spec.rel_tol, bs, ws)


# ------------------------------------------------------------ classification


def _frame_constants(profile: RankProfile) -> tuple[float, float, float]:
    keep = ~profile.guard
    lnz = profile.min_nonzero_eig[keep]
    lnz = lnz[np.isfinite(lnz)]
    upper = float(np.max(profile.max_eig[keep])) if keep.any() else 0.0
    lower = float(np.min(lnz)) if lnz.size else 0.0
    C = max(1.0, upper, 1.0 / lower if lower > 0 else math.inf)
    return lower, upper, C


def classify(family: GeneratorFamily, spec: GridSpec | None = None) -> FrameReport:
    """Frame verdict from the rank profile: NotClosed, Frame or RieszBasis."""
    spec = spec or GridSpec()
    return _classify_cached(family, spec)


@lru_cache(maxsize=64)
def _classify_cached(family: GeneratorFamily, spec: GridSpec) -> FrameReport:
    prof = _profile_cached(family, spec)
    distinct = sorted(prof.distinct_values)
    if len(distinct) != 1:
        verdict, rho = "NotClosed", None
    else:
        rho = distinct[0]
        verdict = "RieszBasis" if rho == family.r else "Frame"
    lower, upper, C = _frame_constants(prof)
    K = tail = None
    if family.kind != "bump":
        K, tail = _truncation(family, spec)
    return FrameReport(
        label=family.label,
        r=family.r,
        classification=verdict,
        rank_constant=rho,
        distinct_ranks=distinct,
        frame_bounds=(lower, upper),
        gram_condition_constant=C,
        ranks_agree=prof.agreement,
        grid_points=int(prof.grid.size),
        guard_points=int(prof.guard.sum()),
        guard_band=spec.guard_band,
        rel_tol=spec.rel_tol,
        expect=family.expect,
        truncation=K,
        truncation_tail=tail,
    )


@lru_cache(maxsize=64)
def _profile_cached(family: GeneratorFamily, spec: GridSpec) -> RankProfile:
    return rank_profile(family, spec)


def cached_rank_profile(family: GeneratorFamily, spec: GridSpec | None = None) -> RankProfile:
    """The profile behind :func:`classify`, shared instead of recomputed."""
    return _profile_cached(family, spec or GridSpec())


def pinv_hermitian(G: np.ndarray, rel_tol: float = 1e-9) -> np.ndarray:
    """Pseudo-inverse of Hermitian matrices (batched), dropping small eigenvalues."""
    lam, V = np.linalg.eigh(G)
    thr = rel_tol * np.max(lam, axis=-1, keepdims=True)
    inv = np.where(lam > thr, 1.0 / np.where(lam > thr, lam, 1.0), 0.0)
    return (V * inv[..., None, :]) @ np.conj(np.swapaxes(V, -1, -2))


def canonical_dual_at(family: GeneratorFamily, xi: float, spec: GridSpec | None = None):
    """Columns and values of ``G(xi)^+ hat(Phi)(xi + 2 pi j)``.

    Raises ``ClassificationError`` for a family whose integer shifts do not
    form a frame.
    """
    spec = spec or GridSpec()
    report = classify(family, spec)
    if report.classification == "NotClosed":
        raise ClassificationError(f"{family.label}: integer shifts are not a frame")
    S = shifted_matrix_at(family, xi, spec)
    Gp = pinv_hermitian(gram_at(family, xi).matrix, spec.rel_tol)
    return S.columns, Gp @ S.entries


# --------------------------------------------------------- equivalence check


def _mp_gram(family: GeneratorFamily, xi: float):
    """Gram symbol at ``xi`` in extended precision.

    Bump entries are exact conversions of the double samples, so structural
    zeros stay exact and ``S S^H`` keeps its true rank to working precision.
    Spline symbols use the finite correlation sum with the closed form
    evaluated in extended precision.
    """
    if family.kind == "bump":
        S = shifted_matrix_at(family, xi)
        M = mpmath.matrix(family.r, max(len(S.columns), 1))
        for i in range(family.r):
            for c in range(len(S.columns)):
                v = S.entries[i, c]
                M[i, c] = mpmath.mpc(float(v.real), float(v.imag))
        return M * M.transpose_conj()
    x = mpmath.mpf(xi)
    r = family.r
    G = mpmath.matrix(r, r)
    for p, gm in enumerate(family.members):
        for q in range(p, r):
            gn = family.members[q]
            a = mpmath.mpf(gm.a)
            shift = gn.n * a
            n = gm.n + gn.n
            total = mpmath.mpc(0)
            for j in range(math.floor(-gn.n * gm.a) - 1, math.ceil(gm.n * gm.a) + 2):
                total += _mp_spline(n, a, j + shift) * mpmath.expjpi(-j * x / mpmath.pi)
            G[p, q] = total
            G[q, p] = mpmath.conj(total)
    return G


def _mp_spline(n: int, a, x):
    if x <= 0 or x >= n * a:
        return mpmath.mpf(0)
    total = mpmath.mpf(0)
    for m in range(n + 1):
        d = x - m * a
        if d > 0:
            total += (-1) ** m * math.comb(n, m) * d ** (n - 1)
    return total / (a**n * math.factorial(n - 1))


def _mp_lambda_plus(family: GeneratorFamily, xi: float) -> float:
    """Smallest eigenvalue of ``G(xi)`` that is not an exact zero at working precision."""
    with mpmath.workdps(MP_DPS):
        lam = mpmath.eighe(_mp_gram(family, xi), eigvals_only=True)
        lam = sorted(mpmath.re(v) for v in lam)
        top = lam[-1]
        if top <= 0:
            return math.inf
        floor = top * mpmath.mpf(10) ** (-(MP_DPS * 3) // 4)
        nz = [v for v in lam if v > floor]
        return mpmath.mpf(nz[0]) if nz else math.inf


def _vanishes(values) -> bool:
    """True when the tail of an approach sequence falls steeply without easing off.

    A nonzero eigenvalue that tends to zero keeps a per-step ratio below
    ``VANISH_STEP`` that is constant (algebraic decay) or shrinking
    (exponential decay).  One that converges to a positive limit has ratios
    creeping back toward 1.
    """
    vals = list(values)
    for k in range(1, len(vals)):
        if mpmath.isfinite(vals[k]) and vals[k] > LOSS_JUMP * vals[k - 1]:
            vals = vals[:k]
            break
    if len(vals) < 4 or any(not mpmath.isfinite(v) or v <= 0 for v in vals[-4:]):
        return False
    ratios = [vals[k + 1] / vals[k] for k in range(len(vals) - 4, len(vals) - 1)]
    if any(q >= VANISH_STEP for q in ratios):
        return False
    return all(ratios[k + 1] <= RATIO_SLACK * ratios[k] for k in range(len(ratios) - 1))


def _approach_points(family: GeneratorFamily, spec: GridSpec):
    """Suspect points with their starting and stopping distances."""
    out = []
    if family.kind == "bump":
        level = math.sqrt(spec.rel_tol)
        merged: dict[float, tuple[float, float]] = {}
        for g in family.members:
            for iv in g.support():
                w = max(spec.guard_band, GUARD_MARGIN * _interval_resolution(iv, level))
                stop = _interval_resolution(iv, MP_STOP_LEVEL)
                for e in iv:
                    key = round(_wrap(e), 9)
                    w0, s0 = merged.get(key, (0.0, math.inf))
                    merged[key] = (max(w0, w), min(s0, stop))
        return [(p, w, st) for p, (w, st) in sorted(merged.items())]
    xs = -PI + TWO_PI * np.arange(spec.n) / spec.n
    lam = np.linalg.eigvalsh(gram_batch(family, xs))[:, 0]
    h = TWO_PI / spec.n
    n = xs.size
    for t in range(n):
        if lam[t] <= lam[(t - 1) % n] and lam[t] <= lam[(t + 1) % n]:
            out.append((float(xs[t]), h, h * 2.0**-16))
    return out


def condition_constant_test(family: GeneratorFamily, spec: GridSpec | None = None) -> dict:
    """Is the best constant of ``C^-1 G <= G^2 <= C G`` bounded?

    The constant is bounded exactly when the nonzero eigenvalues of ``G`` stay
    away from zero.  Every suspect point (support edges of bump families,
    grid minima of the smallest eigenvalue for spline families) is
    approached geometrically from both sides in extended precision.  A
    nonzero eigenvalue that keeps falling by a fixed factor per step to the
    end of the approach tends to zero and the constant is unbounded; a
    bounded family converges and the per-step ratio tends to 1.
    """
    spec = spec or GridSpec()
    xs = scan_grid(family, spec)
    bs, ws = regime_boundaries(family, spec.rel_tol, spec.guard_band)
    guard = np.zeros(xs.size, dtype=bool)
    for b, w in zip(bs, ws):
        guard |= _circ_dist(xs, b) < w
    lam = np.linalg.eigvalsh(gram_batch(family, xs))
    thr = spec.rel_tol * lam[:, -1:]
    lnz = np.where(lam > thr, lam, np.inf).min(axis=1)
    keep = ~guard & np.isfinite(lnz)
    c_grid = max(1.0, float(np.max(lam[keep, -1])), float(np.max(1.0 / lnz[keep]))) if keep.any() else math.inf

    witnesses = []
    for p, start, stop in _approach_points(family, spec):
        m = max(8, int(math.ceil(4.0 * math.log2(start / stop))) + 1)
        d = start * 2.0 ** (-np.arange(m) / 4.0)
        for side in (-1.0, 1.0):
            seq = [_mp_lambda_plus(family, p + side * dd) for dd in d]
            if _vanishes(seq):
                witnesses.append({"point": p, "side": int(side), "last_eig": float(seq[-1])})
    return {
        "finite": not witnesses,
        "c_grid": c_grid,
        "vanishing_approaches": witnesses,
    }


def lemma2_tests(family: GeneratorFamily, spec: GridSpec | None = None) -> dict:
    """The three constancy tests, each computed on its own."""
    spec = spec or GridSpec()
    prof = _profile_cached(family, spec)
    cond = condition_constant_test(family, spec)
    return {
        "shifted_rank_constant": len(prof.distinct_values) == 1,
        "gram_rank_constant": len(prof.distinct_gram) == 1,
        "condition_constant_finite": cond["finite"],
        "c_grid": cond["c_grid"],
        "vanishing_approaches": cond["vanishing_approaches"],
    }


def lemma2_equivalence_check(family: GeneratorFamily, spec: GridSpec | None = None) -> bool:
    t = lemma2_tests(family, spec)
    return t["shifted_rank_constant"] == t["gram_rank_constant"] == t["condition_constant_finite"]
