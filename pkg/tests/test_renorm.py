import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from greedylab.metrics import fundamental_profile, slc_constant
from greedylab.models import make_besov_truncation, make_haar, make_schlumprecht
from greedylab.renorm import (InvalidConstants, RenormConstants, almost_greedy_renorm, brute_force_renorm,
                              check_constants, compute_constants, gap_maps, lattice_renorm, main_renorm,
                              pipeline_renorm, s_func, subsym_renorm, t_func, tc_func)
from greedylab.seqlab import PosSequence, SequenceError, power_sequence
from greedylab.spaces import SpaceModel, indicator, make_lp, space_from_descriptor


class Skewed(SpaceModel):
    """||v||_2 + |v_1 + v_2| on two coordinates."""
    kind = "skewed-test"
    dim = 2

    def norm(self, v):
        v = self._check(v)
        return float(np.hypot(*v) + abs(v[0] + v[1]))


def test_s_t_tc_examples():
    assert s_func([1, -2, 3], [0, 2]) == 4
    assert s_func([1, -2, 3], []) == 0
    assert s_func([1, 1, 1, 1], range(4)) == 4
    assert t_func([1, 2], [0.5, -0.5], [0, 1]) == -0.5
    assert tc_func([1, 2], [0.5, -0.5], [0, 1]) == 0
    assert t_func([1, 2], [0.5, -0.5], []) == 0
    assert tc_func([1, 2], [0.5, -0.5], []) == -0.5


def test_constants_validation_and_roundtrip():
    c = RenormConstants(1.0, 1.0, 1.2, 1.0, 2.0, 1.0, 0.1, {"C_e": "user-supplied"})
    assert c.kappa == pytest.approx(1 / 4.8)
    assert RenormConstants.from_json(json.loads(json.dumps(c.to_json()))) == c
    with pytest.raises(InvalidConstants):
        RenormConstants(1.0, -1.0, 1.0, 1.0, 1.0, 1.0)
    with pytest.raises(InvalidConstants):
        RenormConstants(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, provenance={"C_e": "guess"})


def test_lattice_identity_on_lp():
    X = np.random.default_rng(0).standard_normal((100, 4))
    base = make_lp(1.5, 4)
    lat = lattice_renorm(base)
    assert np.allclose(lat.norm_many(X), base.norm_many(X), rtol=0, atol=1e-12)


def test_lattice_skewed_example():
    base = Skewed()
    assert base.norm([1.0, -1.0]) == pytest.approx(np.sqrt(2))
    assert lattice_renorm(base).norm([1.0, -1.0]) == pytest.approx(2 + np.sqrt(2))


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, 4, elements=st.floats(-3, 3)), st.lists(st.sampled_from([-1.0, 1.0]), min_size=4, max_size=4))
def test_lattice_haar_sign_invariant_and_dominating(v, eps):
    base = make_haar(2, 3.0)
    lat = lattice_renorm(base)
    assert lat.norm(np.array(eps) * v) == pytest.approx(lat.norm(v), abs=1e-12)
    assert lat.norm(v) >= base.norm(v) - 1e-12


def test_constants_checked_on_l2():
    sp, sig = make_lp(2, 4), power_sequence(0.5, 4)
    c = compute_constants(sp, sig)
    got = check_constants(sp, sig, c, fundamental_profile(sp).phi_u)
    assert got["C_a"] and got["C_r"] and got["C_e"]
    assert c.provenance["C_d"] == "computed-lower-bound-inflated"


def test_main_renorm_fundamental_and_zero():
    pr = pipeline_renorm(make_lp(2, 4), power_sequence(0.5, 4))
    sp = pr.model
    assert sp.norm(np.zeros(4)) == 0.0
    for size in range(1, 5):
        for A in itertools.combinations(range(4), size):
            for eps in itertools.product((1, -1), repeat=size):
                assert sp.norm(indicator(A, 4, eps)) == pytest.approx(np.sqrt(size), abs=1e-9)
    v = np.array([1.0, 1.0, 0.0, 0.0])
    assert sp.norm(v) == pytest.approx(brute_force_renorm(sp).norm(v), abs=1e-9)
    assert slc_constant(sp, max_size=2).value == pytest.approx(1.0, abs=1e-6)


def test_main_renorm_norm_equivalence_envelope():
    pr = pipeline_renorm(make_lp(2, 4), power_sequence(0.5, 4))
    X = np.random.default_rng(3).standard_normal((200, 4))
    r = pr.model.norm_many(X) / pr.lattice.norm_many(X)
    assert np.all(r > 0)
    # the renorm is a sup of terms each bounded by a multiple of the old norm
    assert r.max() / r.min() < 10


def test_main_renorm_descriptor_roundtrip():
    pr = pipeline_renorm(make_lp(2, 4), power_sequence(0.5, 4))
    again = space_from_descriptor(json.loads(json.dumps(pr.model.descriptor())))
    v = np.array([0.3, -1.0, 0.2, 0.7])
    assert again.norm(v) == pytest.approx(pr.model.norm(v), abs=1e-12)


def test_main_renorm_rejects_bad_sigma():
    sp = make_lp(2, 4)
    c = compute_constants(sp, power_sequence(0.5, 4))
    with pytest.raises(SequenceError):
        main_renorm(sp, PosSequence([1.0, 3.0, 3.1, 3.2]), c)


def test_pruned_matches_brute_nonlattice():
    base = make_haar(2, 3.0)
    sig = power_sequence(1 / 3, 4)
    c = compute_constants(lattice_renorm(base), sig)
    pruned = main_renorm(base, sig, c, mode="pruned")
    brute = brute_force_renorm(pruned, all_signs=True)
    for v in np.random.default_rng(5).standard_normal((3, 4)):
        assert pruned.norm(v) == pytest.approx(brute.norm(v), abs=1e-6)


def test_besov_bidemocracy():
    pr = pipeline_renorm(make_besov_truncation(1.5, 4.0, 3), power_sequence(2 / 3, 6))
    prof = fundamental_profile(pr.model)
    assert np.max(prof.phi_u * prof.phi_u_dual / np.arange(1, 7)) <= 1 + 1e-6


def test_almost_greedy_fundamental_and_delta_guard():
    sp, sig = make_lp(2, 4), power_sequence(0.5, 4)
    c = compute_constants(sp, sig, eps_target=0.1)
    model = almost_greedy_renorm(sp, sig, c, 0.1)
    assert model.norm(np.zeros(4)) == 0.0
    for size in range(1, 5):
        assert model.norm(indicator(range(size), 4)) == pytest.approx(np.sqrt(size), abs=1e-9)
    big = RenormConstants(**{**c.to_json(), "delta": 1.0})
    with pytest.raises(InvalidConstants):
        almost_greedy_renorm(sp, sig, big, 0.1)


@given(st.integers(1, 4), st.integers(8, 20), st.integers(1, 3))
def test_gap_maps_constraints(length, window, k):
    for beta in gap_maps(length, window, k):
        assert len(beta) == length
        assert beta[0] >= k - 1 and beta[-1] < window
        assert all(b - a >= k for a, b in zip(beta, beta[1:]))


def test_subsym_lp_and_empty():
    sp = subsym_renorm(make_lp(3.0, 64))
    v = np.zeros(sp.dim)
    v[:3] = [1.0, -2.0, 0.5]
    out = sp.evaluate(v)
    assert out.value == pytest.approx(np.sum(np.abs(v) ** 3) ** (1 / 3), abs=1e-12)
    assert out.stabilized and out.per_k[1] == pytest.approx(out.value)
    assert sp.norm(np.zeros(sp.dim)) == 0.0


def test_subsym_schlumprecht():
    sp = subsym_renorm(make_schlumprecht(32), k_schedule=(1, 2, 4))
    v = np.zeros(sp.dim)
    v[:2] = 1.0
    out = sp.evaluate(v)
    assert out.value == pytest.approx(2 / np.log2(3), abs=1e-6)
    assert out.stabilized


def test_pipeline_dini_policy():
    pr = pipeline_renorm(make_lp(1.5, 4), policy="dini")
    assert np.all(pr.sigma.values >= pr.profile.phi_u - 1e-12)
    for size in range(1, 5):
        assert pr.model.norm(indicator(range(size), 4)) == pytest.approx(pr.sigma(size), abs=1e-9)
