import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from seppairs.cstar_modules import (
    FiniteCStarAlgebra,
    StandardModule,
    State,
    localize,
    localize_submodule,
    matrix_unit_states,
    module_orth_complement,
    submodule_from_flat,
)
from seppairs.errors import PreconditionFailed
from seppairs.examples import cx_submodules
from seppairs.hilbert_core import operator_norm, orthonormalize
from seppairs.local_angles import (
    AngleEstimate,
    OptimizerBudget,
    check_alpha_complement,
    check_separation_from_alpha0,
    check_zero_angle_theorem,
    local_angle,
    localized_cosine,
    module_dixmier_cosine,
    module_friedrichs_cosine,
)
from seppairs.subspace_pairs import dixmier_cosine, friedrichs_cosine

from helpers import block_module, crandn, range_submodule

SMALL = OptimizerBudget(grid=16, refine_iters=60, chunk=16, mixed_samples=4)
S2 = 1 / np.sqrt(2)


def scalar_module(d):
    return StandardModule(FiniteCStarAlgebra((1,)), d)


def flat(module, *cols):
    return submodule_from_flat(module, np.column_stack(cols))


class TestModuleCosines:
    def test_orthogonal(self):
        mod = StandardModule(FiniteCStarAlgebra((1, 1)), 1)
        h, k = flat(mod, [1, 0]), flat(mod, [0, 1])
        assert module_dixmier_cosine(h, k) == 0

    def test_equal(self):
        mod = StandardModule(FiniteCStarAlgebra((2,)), 1)
        h = range_submodule(mod, [np.array([[1], [0]])])
        assert module_dixmier_cosine(h, h) == pytest.approx(1)
        assert module_friedrichs_cosine(h, h) == pytest.approx(0, abs=1e-12)

    def test_nested(self):
        mod = scalar_module(3)
        h = flat(mod, [1, 0, 0], [0, 1, 0])
        k = flat(mod, [1, 0, 0])
        assert module_friedrichs_cosine(h, k) == pytest.approx(0, abs=1e-12)

    def test_angled_matches_flat(self):
        mod = scalar_module(2)
        h, k = flat(mod, [1, 0]), flat(mod, [1, 1])
        assert module_dixmier_cosine(h, k) == pytest.approx(S2)
        assert module_dixmier_cosine(h, k) == pytest.approx(dixmier_cosine(h.flat, k.flat))


class TestLocalAngle:
    def test_orthogonal_is_zero(self):
        mod = block_module((1, 2), 1)
        h = range_submodule(mod, [np.array([[1]]), np.array([[1], [0]])])
        k = range_submodule(mod, [np.zeros((1, 0)), np.array([[0], [1]])])
        est = local_angle(h, k, budget=SMALL)
        assert est.value <= 1e-12

    def test_scalar_algebra_equals_global(self):
        rng = np.random.default_rng(1)
        mod = scalar_module(5)
        h = submodule_from_flat(mod, crandn(rng, 5, 2))
        k = submodule_from_flat(mod, crandn(rng, 5, 2))
        for kind, ref in (("friedrichs", friedrichs_cosine), ("dixmier", dixmier_cosine)):
            est = local_angle(h, k, kind, SMALL)
            assert est.value == pytest.approx(ref(h.flat, k.flat), abs=1e-12)

    def test_unknown_kind(self):
        mod = scalar_module(2)
        with pytest.raises(PreconditionFailed):
            local_angle(flat(mod, [1, 0]), flat(mod, [0, 1]), "bogus")

    def test_cx_grid(self):
        _, h, k = cx_submodules(8)
        assert local_angle(h, k, budget=SMALL).value <= 1e-6

    def test_empty_localization_gives_zero(self):
        mod = block_module((1, 1), 1)
        h, k = flat(mod, [1, 0]), flat(mod, [1, 0])
        f = State.pure(mod.algebra, 1, [1])
        assert localized_cosine(h, k, f, "dixmier") == 0

    def test_round_trip(self):
        mod = block_module((2,), 1)
        rng = np.random.default_rng(4)
        h = range_submodule(mod, [crandn(rng, 2, 1)])
        k = range_submodule(mod, [crandn(rng, 2, 1)])
        est = local_angle(h, k, "dixmier", SMALL)
        back = AngleEstimate.from_dict(mod.algebra, est.to_dict())
        assert back.value == est.value and back.kind == "dixmier"
        assert back.iterations == est.iterations and back.converged == est.converged
        assert np.allclose(back.argmax_state.densities[0], est.argmax_state.densities[0])

    def test_landscape_rows(self):
        mod = block_module((2,), 1)
        rng = np.random.default_rng(5)
        h = range_submodule(mod, [crandn(rng, 2, 1)])
        k = range_submodule(mod, [crandn(rng, 2, 1)])
        est = local_angle(h, k, "dixmier", SMALL)
        # basis chunk of 2 plus one Sobol chunk of 16
        assert len(est.landscape) == 18
        assert max(r[3] for r in est.landscape) <= est.value + 1e-12


class TestChecks:
    def test_alpha_complement_block_pairs(self):
        rng = np.random.default_rng(2)
        for blocks in [(1, 1), (2,), (1, 2)]:
            mod = block_module(blocks, 2)
            h = range_submodule(mod, [crandn(rng, 2 * n, 1) for n in blocks])
            k = range_submodule(mod, [crandn(rng, 2 * n, 1) for n in blocks])
            out = check_alpha_complement(h, k, SMALL)
            assert out["holds"], out

    def test_zero_angle_commuting(self):
        mod = block_module((1, 2), 2)
        e = np.eye(4)
        h = range_submodule(mod, [e[:2, :1], e[:, :2]])
        k = range_submodule(mod, [e[:2, :2], e[:, 1:3]])
        out = check_zero_angle_theorem(h, k, SMALL)
        assert out["alpha_zero"] and out["lattice_identity"] and out["agree"]

    def test_zero_angle_generic(self):
        mod = block_module((2,), 2)
        h = range_submodule(mod, [np.array([[1], [0], [0], [0]])])
        k = range_submodule(mod, [np.array([[1], [1], [0], [0]])])
        out = check_zero_angle_theorem(h, k, SMALL)
        assert not out["alpha_zero"] and not out["lattice_identity"] and out["agree"]

    def test_zero_angle_cx(self):
        _, h, k = cx_submodules(6)
        out = check_zero_angle_theorem(h, k, SMALL)
        assert out["alpha_zero"] and out["lattice_identity"]

    def test_separation_orthogonal(self):
        mod = block_module((1, 1), 1)
        out = check_separation_from_alpha0(flat(mod, [1, 0]), flat(mod, [0, 1]), SMALL, samples=20)
        assert out["alpha0"] == 0 and out["separated"] and out["implication_holds"]
        assert out["inequality_violations"] == 0

    def test_separation_angled(self):
        mod = block_module((2,), 2)
        h = range_submodule(mod, [np.array([[1], [0], [0], [0]])])
        k = range_submodule(mod, [np.array([[1], [1], [0], [0]])])
        out = check_separation_from_alpha0(h, k, SMALL, samples=50)
        assert out["alpha0"] == pytest.approx(S2, abs=1e-6)
        assert out["alpha0_below_one"] and out["separated"] and out["implication_holds"]
        assert out["inequality_violations"] == 0

    def test_separation_overlap(self):
        mod = block_module((2,), 1)
        e = np.eye(2)
        h = range_submodule(mod, [e[:, :1]])
        out = check_separation_from_alpha0(h, h, SMALL, samples=10)
        assert out["alpha0"] == pytest.approx(1, abs=1e-9)
        assert not out["alpha0_below_one"] and out["implication_holds"]


seeds = st.integers(0, 2**32 - 1)


def random_pair(rng, blocks, m):
    mod = block_module(blocks, m)
    ws_h = [crandn(rng, m * n, int(rng.integers(0, m * n + 1))) for n in blocks]
    ws_k = [crandn(rng, m * n, int(rng.integers(0, m * n + 1))) for n in blocks]
    return mod, range_submodule(mod, ws_h), range_submodule(mod, ws_k)


@settings(max_examples=20, deadline=None)
@given(seed=seeds)
def test_reevaluation_and_monotone_budget(seed):
    rng = np.random.default_rng(seed)
    mod, h, k = random_pair(rng, (1, 2), 2)
    small = local_angle(h, k, "friedrichs", OptimizerBudget(grid=16, refine_iters=40))
    again = localized_cosine(h, k, small.argmax_state, "friedrichs")
    assert abs(again - small.value) <= 1e-12
    big = local_angle(h, k, "friedrichs", OptimizerBudget(grid=32, refine_iters=40))
    assert big.value >= small.value - 1e-12
    assert not small.mixed_exceeds


@settings(max_examples=25, deadline=None)
@given(seed=seeds)
def test_complement_chain_per_state(seed):
    # c((H⊥)_f, (K⊥)_f) >= c(H_f, K_f) is symmetric in finite dimensions, so both sides agree
    rng = np.random.default_rng(seed)
    mod, h, k = random_pair(rng, (2, 3), 1)
    hp, kp = module_orth_complement(h), module_orth_complement(k)
    states = [State.tracial(mod.algebra)] + matrix_unit_states(mod.algebra)
    for f in states:
        a = localized_cosine(h, k, f)
        b = localized_cosine(hp, kp, f)
        assert b >= a - 1e-9 and a >= b - 1e-9


@settings(max_examples=20, deadline=None)
@given(seed=seeds)
def test_commutation_bridge(seed):
    # coordinate choices of W_i make every localized projection pair commute
    rng = np.random.default_rng(seed)
    blocks, m = (1, 2), 2
    mod = block_module(blocks, m)
    pick = lambda d: np.eye(d)[:, rng.random(d) < 0.5]
    h = range_submodule(mod, [pick(m * n) for n in blocks])
    k = range_submodule(mod, [pick(m * n) for n in blocks])
    states = matrix_unit_states(mod.algebra) + [State.tracial(mod.algebra)]
    for f in states:
        loc = localize(mod, f)
        p = localize_submodule(h, loc).projection
        q = localize_submodule(k, loc).projection
        assert operator_norm(p @ q - q @ p) <= 1e-9
    assert local_angle(h, k, budget=SMALL).value <= 1e-6


@settings(max_examples=20, deadline=None)
@given(seed=seeds)
def test_pure_state_value_matches_block_subspaces(seed):
    # at the pure state for ξ in block i, H_f is W_i, so the cosine is the flat cosine of (W_i, V_i)
    rng = np.random.default_rng(seed)
    blocks, m = (2,), 2
    mod = block_module(blocks, m)
    wh, wk = crandn(rng, 4, 2), crandn(rng, 4, 1)
    h, k = range_submodule(mod, [wh]), range_submodule(mod, [wk])
    f = State.pure(mod.algebra, 0, crandn(rng, 2))
    ref = friedrichs_cosine(orthonormalize(wh), orthonormalize(wk))
    assert localized_cosine(h, k, f) == pytest.approx(ref, abs=1e-9)
