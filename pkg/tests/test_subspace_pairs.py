import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from seppairs.errors import NotAProjection, NotSeparated, ShapeMismatch
from seppairs.hilbert_core import Subspace, orth_complement, orthonormalize, subspace_sum
from seppairs.subspace_pairs import (
    PairReport,
    check_sum_equivalences,
    dixmier_cosine,
    friedrichs_cosine,
    is_separated,
    separation_constants,
)

from helpers import crandn, random_projection, random_separated_pair, random_subspace, random_unit

S2 = 1 / np.sqrt(2)


def span(*cols):
    return orthonormalize(np.column_stack(cols))


E1, E2 = span([1, 0]), span([0, 1])
DIAG = span([1, 1])


def test_dixmier_examples():
    assert dixmier_cosine(E1, E2) == 0
    assert dixmier_cosine(E1, E1) == pytest.approx(1)
    assert dixmier_cosine(E1, DIAG) == pytest.approx(S2)


def test_dixmier_matches_circle_sup():
    # sup over the unit circle of K of |<e1, y>|
    t = np.linspace(0, 2 * np.pi, 3601)
    vals = np.abs(np.cos(t) * S2)
    assert dixmier_cosine(E1, DIAG) == pytest.approx(vals.max(), abs=1e-6)


def test_friedrichs_examples():
    assert friedrichs_cosine(DIAG, DIAG) == pytest.approx(0, abs=1e-12)
    assert friedrichs_cosine(E1, E2) == 0
    e = np.eye(4)
    h = span(e[:, 0], e[:, 2])
    k = span(e[:, 0], (e[:, 2] + e[:, 3]) * S2)
    assert friedrichs_cosine(h, k) == pytest.approx(S2)
    # residual pair after removing e1
    assert dixmier_cosine(span(e[:, 2]), span(e[:, 2] + e[:, 3])) == pytest.approx(S2)


def test_friedrichs_nested():
    e = np.eye(3)
    h = span(e[:, 0], e[:, 1])
    assert friedrichs_cosine(h, span(e[:, 0])) == pytest.approx(0, abs=1e-12)


def test_is_separated_examples():
    r = is_separated(E1, E2)
    assert r.separated and r.c0 == 0 and r.alpha1 == pytest.approx(1)
    r = is_separated(E1, E1)
    assert not r.separated and r.alpha1 is None and r.dim_intersection == 1
    r = is_separated(E1, DIAG)
    assert r.separated and r.c0 == pytest.approx(S2)
    assert r.alpha1 == pytest.approx(S2) and r.alpha2 == pytest.approx(S2)


def test_alpha_matches_grid_minimum():
    # min over unit x ∈ H, y ∈ K of ||x + y|| / ||x|| with y free: sin of the angle
    t = np.linspace(-5, 5, 200001)
    vals = np.sqrt((1 + t * S2) ** 2 + (t * S2) ** 2)
    a1, _ = separation_constants(E1, DIAG)
    assert vals.min() >= a1 - 1e-9
    assert vals.min() == pytest.approx(a1, abs=1e-6)


def test_separation_constants_errors():
    assert separation_constants(E1, E2) == pytest.approx((1, 1))
    with pytest.raises(NotSeparated):
        separation_constants(E1, E1)


def test_zero_dim_conventions():
    z = Subspace.zero(2)
    r = is_separated(z, E1)
    assert r.separated and r.c0 == 0 and r.c == 0 and (r.alpha1, r.alpha2) == (1, 1)


def test_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        dixmier_cosine(E1, span([1, 0, 0]))


def test_report_round_trip():
    r = is_separated(E1, DIAG)
    assert PairReport.from_dict(r.to_dict()) == r


def test_sum_equivalences_examples():
    p = np.diag([1, 0]).astype(complex)
    out = check_sum_equivalences(p, p)
    assert out["sum_range"] and out["complement_sum_range"] and out["all_combinations"] and out["dim_sum"] == 1
    out = check_sum_equivalences(p, np.diag([0, 1]))
    assert out["dim_sum"] == 2 and out["norm_pq_below_one"] and out["complements_span"]
    rng = np.random.default_rng(3)
    out = check_sum_equivalences(random_projection(rng, 3, 1), random_projection(rng, 3, 1), coefficients=[(2, -1)])
    assert out["all_combinations"]


def test_sum_equivalences_rejects():
    with pytest.raises(NotAProjection):
        check_sum_equivalences(np.array([[1, 1], [0, 0]]), np.eye(2))
    with pytest.raises(ValueError):
        check_sum_equivalences(np.eye(2), np.eye(2), coefficients=[(1, -1)])


seeds = st.integers(0, 2**32 - 1)


@settings(max_examples=80, deadline=None)
@given(seed=seeds, d=st.integers(1, 8), data=st.data())
def test_cosine_properties(seed, d, data):
    rng = np.random.default_rng(seed)
    h = random_subspace(rng, d, data.draw(st.integers(0, d)))
    k = random_subspace(rng, d, data.draw(st.integers(0, d)))
    c0, c = dixmier_cosine(h, k), friedrichs_cosine(h, k)
    assert 0 <= c <= c0 + 1e-12 <= 1 + 1e-12
    assert c0 == pytest.approx(dixmier_cosine(k, h), abs=1e-12)
    assert c == pytest.approx(friedrichs_cosine(k, h), abs=1e-9)
    rep = is_separated(h, k)
    assert rep.separated == (rep.dim_intersection == 0)
    assert (rep.alpha1 is not None) == rep.separated
    # complement law
    full = subspace_sum(orth_complement(h), orth_complement(k)).dim == d
    assert full == rep.separated


@settings(max_examples=40, deadline=None)
@given(seed=seeds)
def test_engineered_overlap_gives_c0_one(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(3, 8))
    common = crandn(rng, d, 1)
    h = orthonormalize(np.hstack([common, crandn(rng, d, 1)]))
    k = orthonormalize(np.hstack([common, crandn(rng, d, 1)]))
    assert dixmier_cosine(h, k) == pytest.approx(1, abs=1e-12)
    assert not is_separated(h, k).separated


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_sampled_separation_bound(seed):
    rng = np.random.default_rng(seed)
    h, k = random_separated_pair(rng, 2, 8)
    a1, a2 = separation_constants(h, k)
    x = random_unit(rng, h.frame, 1000)
    y = k.frame @ crandn(rng, k.dim, 1000) * rng.uniform(0.01, 10, 1000)
    s = np.linalg.norm(x + y, axis=0)
    assert np.all(s >= a1 - 1e-9)
    assert np.all(s >= a2 * np.linalg.norm(y, axis=0) - 1e-9)
