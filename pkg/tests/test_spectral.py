import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftframes.generators import (
    BumpGenerator,
    GeneratorFamily,
    claim_section3_negative,
    family_lemma_4_1,
    family_theorem_3,
    family_theorem_4_3,
    family_theorem_4_6,
    make_bump,
)
from shiftframes.spectral import (
    ClassificationError,
    GridSpec,
    cached_rank_profile,
    canonical_dual_at,
    classify,
    gram_at,
    gram_batch,
    lemma2_equivalence_check,
    numeric_rank,
    pinv_hermitian,
    rank_profile,
    shifted_matrix_at,
    structural_rank,
)
from shiftframes.spline import SplineGenerator, choose_truncation, spline_family

PI = math.pi
BUMP_FAMILIES = [
    family_theorem_3((0, 2), 0.2),
    family_theorem_3((0, 1), 0.2),
    family_theorem_3((0, 2, 4), 0.1),
    family_lemma_4_1(0.2),
    family_theorem_4_3(2, 0.2),
    family_theorem_4_6(1, 0.2),
    claim_section3_negative(),
]


def test_numeric_rank_examples():
    assert numeric_rank(np.zeros((3, 5))) == 0
    assert numeric_rank(np.eye(3)) == 3
    assert numeric_rank(np.ones((2, 2))) == 1
    with pytest.raises(ValueError):
        numeric_rank(np.array([[np.nan]]))
    with pytest.raises(ValueError):
        numeric_rank(np.eye(2), 0.0)


def test_structural_rank_examples():
    assert structural_rank(None, np.array([[1, 1, 0], [0, 1, 1]], bool)) == 2
    assert structural_rank(None, np.array([[0, 1, 0], [0, 1, 0]], bool)) == 1
    assert structural_rank(None, np.zeros((2, 3), bool)) == 0
    with pytest.raises(ValueError):
        structural_rank(np.ones((2, 2)), np.ones((2, 3), bool))


@given(st.lists(st.lists(st.booleans(), min_size=4, max_size=4), min_size=1, max_size=4))
def test_structural_rank_bounds_generic_rank(rows):
    P = np.array(rows, dtype=bool)
    rng = np.random.default_rng(0)
    M = np.where(P, rng.uniform(1, 2, P.shape), 0.0)
    assert numeric_rank(M) <= structural_rank(M, P) <= min(P.shape)


def test_theorem3_patterns():
    f = family_theorem_3((0, 2), 0.2)
    S = shifted_matrix_at(f, 0.0)
    assert len(S.columns) == 2
    assert S.pattern.sum(axis=1).tolist() == [1, 1]
    assert structural_rank(S.entries, S.pattern) == 2
    S = shifted_matrix_at(f, -PI - 0.1)
    assert S.pattern[0].sum() == 2 and len(S.columns) >= 2


def test_empty_matrix_outside_support():
    g = BumpGenerator(make_bump((-1.0, 1.0)), 0, PI)
    f = GeneratorFamily((g,), "narrow")
    S = shifted_matrix_at(f, 2.5)
    assert S.entries.shape == (1, 0)
    assert numeric_rank(S.entries) == 0


@pytest.mark.parametrize("fam", BUMP_FAMILIES, ids=lambda f: f.label.split(":")[0])
def test_gram_factorization_bumps(fam):
    rng = np.random.default_rng(1)
    for xi in rng.uniform(-PI, PI, 100):
        S = shifted_matrix_at(fam, xi)
        G = gram_at(fam, xi).matrix
        assert np.max(np.abs(G - S.entries @ S.entries.conj().T), initial=0) < 1e-10
        assert np.max(np.abs(G - G.conj().T)) < 1e-12
        assert np.linalg.eigvalsh(G)[0] > -1e-10


def test_gram_factorization_splines_within_tail():
    fam = spline_family(2, 2, 1.0)
    K, tail = choose_truncation(fam, 1e-12)
    rng = np.random.default_rng(2)
    for xi in rng.uniform(-PI, PI, 100):
        S = shifted_matrix_at(fam, xi)
        G = gram_at(fam, xi).matrix
        assert np.max(np.abs(G - S.entries @ S.entries.conj().T)) < max(1e-10, 10 * tail)


def test_negative_config_gram_values():
    f = claim_section3_negative()
    assert abs(gram_at(f, PI).matrix[0, 0]) == 0.0
    assert gram_at(f, 0.0).matrix[0, 0].real > 0


@pytest.mark.parametrize(
    "fam,want",
    [
        (family_theorem_3((0, 2), 0.2), {2}),
        (family_theorem_3((0, 1), 0.2), {1, 2}),
        (family_lemma_4_1(0.2), {1}),
    ],
    ids=["k02", "k01", "lemma41"],
)
def test_rank_profile_examples(fam, want):
    prof = cached_rank_profile(fam)
    assert prof.distinct_values == want
    assert prof.agreement


@pytest.mark.parametrize("fam", BUMP_FAMILIES[:4], ids=lambda f: f.label.split(":")[0])
def test_periodicity(fam):
    xs = np.linspace(-PI, PI, 97, endpoint=False) + 0.0123
    a = rank_profile(fam, grid=xs)
    b = rank_profile(fam, grid=xs + 2 * PI)
    assert np.array_equal(a.numeric_rank, b.numeric_rank)
    assert np.array_equal(a.structural_rank, b.structural_rank)


def test_profile_invariants():
    for fam in BUMP_FAMILIES:
        prof = cached_rank_profile(fam)
        keep = ~prof.guard
        assert np.all(prof.numeric_rank[keep] <= prof.structural_rank[keep])
        assert np.all(prof.structural_rank <= fam.r)


def test_classify_examples():
    rep = classify(family_theorem_4_3(2, 0.2))
    assert (rep.classification, rep.rank_constant, rep.r) == ("Frame", 2, 4)
    rep = classify(family_theorem_3((0, 2, 4), 0.2))
    assert (rep.classification, rep.rank_constant) == ("RieszBasis", 3)
    rep = classify(claim_section3_negative())
    assert rep.classification == "NotClosed" and len(rep.distinct_ranks) >= 2


@pytest.mark.parametrize("fam", BUMP_FAMILIES, ids=lambda f: f.label.split(":")[0])
def test_report_invariants(fam):
    rep = classify(fam)
    if rep.classification == "RieszBasis":
        assert rep.rank_constant == fam.r
    elif rep.classification == "Frame":
        assert rep.rank_constant < fam.r
        lo, hi = rep.frame_bounds
        assert 0 < lo <= hi
    assert rep.gram_condition_constant >= 1
    d = json.loads(rep.to_json())
    assert d["classification"] == rep.classification and d["schema_version"] == 1


def test_csv_schema():
    prof = cached_rank_profile(family_theorem_3((0, 2), 0.2))
    head = prof.to_csv().splitlines()[0]
    assert head == "schema_version,xi,numeric_rank,structural_rank,guard,min_eig,max_eig"


def test_canonical_dual_scalar_spline():
    fam = GeneratorFamily((SplineGenerator(2, 1.0),), "phi2", "RieszBasis")
    xi = 0.7
    cols, dual = canonical_dual_at(fam, xi)
    S = shifted_matrix_at(fam, xi)
    G = gram_at(fam, xi).matrix[0, 0].real
    assert np.allclose(dual[0], S.entries[0] / G, atol=1e-14)


def test_canonical_dual_reproduces_range():
    fam = family_theorem_4_3(2, 0.2)
    for xi in (-2.0, 0.3, 2.9):
        cols, dual = canonical_dual_at(fam, xi)
        S = shifted_matrix_at(fam, xi).entries
        P = S.conj().T @ dual
        # S^H G^+ S is the orthogonal projector onto the row space of S
        assert np.allclose(P @ P, P, atol=1e-8)
        assert np.allclose(S @ P, S, atol=1e-8)


def test_pinv_identity_gives_self_dual():
    G = np.broadcast_to(np.eye(3), (5, 3, 3))
    assert np.allclose(pinv_hermitian(G), G)


@given(st.integers(1, 4), st.integers(0, 3))
def test_pinv_moore_penrose(n, seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, max(n - 1, 1))) + 1j * rng.standard_normal((n, max(n - 1, 1)))
    G = A @ A.conj().T
    P = pinv_hermitian(G)
    assert np.allclose(G @ P @ G, G, atol=1e-8 * np.abs(G).max())


def test_dual_rejects_not_closed():
    with pytest.raises(ClassificationError):
        canonical_dual_at(claim_section3_negative(), 0.0)


@pytest.mark.parametrize(
    "fam",
    [family_theorem_3((0, 2), 0.2), family_theorem_3((0, 1), 0.2), claim_section3_negative(), family_theorem_4_3(1, 0.2)],
    ids=["k02", "k01", "negative", "theorem43_r1"],
)
def test_equivalence_check(fam):
    assert lemma2_equivalence_check(fam)


def test_truncation_monotone():
    fam = spline_family(2, 2, 1.0)
    xs = np.linspace(-PI, PI, 64, endpoint=False)
    prev = None
    for kmax in (64, 128, 512):
        spec = GridSpec(n=64, spline_k_max=kmax)
        prof = rank_profile(fam, spec, grid=xs)
        if prev is not None:
            assert np.all(prof.numeric_rank >= prev)
        prev = prof.numeric_rank


def test_gridspec_validation():
    with pytest.raises(ValueError):
        GridSpec(n=10)
    with pytest.raises(ValueError):
        GridSpec(rel_tol=2.0)


def test_theorem46_r2_column_deficit():
    # on (eps, pi - eps) only three translates meet any support, so rank <= 3 < 2r
    fam = family_theorem_4_6(2, 0.2)
    for xi in np.linspace(0.3, PI - 0.3, 7):
        S = shifted_matrix_at(fam, xi)
        assert len(S.columns) == 3
        assert numeric_rank(S.entries) == 3
    assert numeric_rank(shifted_matrix_at(fam, -1.5).entries) == 4


def test_unit_width_splines_drop_rank_at_origin():
    # at a = 1 every column j != 0 vanishes at xi = 0 and column 0 is all ones
    fam = spline_family(1, 3, 1.0)
    S = shifted_matrix_at(fam, 0.0)
    assert S.columns == [0]
    assert numeric_rank(S.entries) == 1
    assert numeric_rank(shifted_matrix_at(fam, 0.5).entries) == 3
