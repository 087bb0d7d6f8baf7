import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from greedylab.metrics import (CapExceeded, best_m_term, constants_report, fundamental_profile, greedy_constant,
                               greedy_sets, lorentz_embedding_constant, slc_constant, tga)
from greedylab.models import make_haar
from greedylab.seqlab import PosSequence, power_sequence
from greedylab.spaces import make_lorentz, make_lp, project

V = np.array([3.0, -3.0, 1.0, 0.0])
small = arrays(np.float64, 5, elements=st.floats(-4, 4).map(lambda x: round(x * 2) / 2))


def test_greedy_sets_examples():
    assert greedy_sets(V, 1) == [(0,), (1,)]
    assert greedy_sets(V, 2) == [(0, 1)]
    assert greedy_sets(V, 0) == [()]


def test_tga_examples():
    st1 = tga(make_lp(2, 4), V, 1)
    assert st1.greedy_set == (0,)
    assert st1.residual.tolist() == [0.0, -3.0, 1.0, 0.0]
    assert not np.any(tga(make_lp(2, 4), V, 4).residual)
    assert not np.any(tga(make_lp(2, 4), V, 0).approximant)


@given(small, st.integers(0, 5))
def test_greedy_sets_dominate(v, m):
    a = np.abs(v)
    sets = greedy_sets(v, m)
    assert sets
    for A in sets:
        rest = [i for i in range(5) if i not in A]
        assert len(A) == m
        if A and rest:
            assert a[list(A)].min() >= a[rest].max()
    assert tga(make_lp(2, 5), v, m).greedy_set in sets


def test_best_m_term_l2_example():
    bm = best_m_term(make_lp(2, 4), V, 1)
    assert bm.value == pytest.approx(np.sqrt(10), abs=1e-12)
    assert bm.support in [(0,), (1,)]
    assert best_m_term(make_lp(2, 4), V, 0).value == pytest.approx(np.sqrt(19))
    assert best_m_term(make_lp(2, 4), V, 4).value == 0.0


def test_best_m_term_nonlattice_beats_zeroing():
    # Haar p=3 is not sign-invariant: free coefficients can do better than zeroing
    sp = make_haar(2, 3.0)
    rng = np.random.default_rng(0)
    for f in rng.standard_normal((5, 4)):
        bm = best_m_term(sp, f, 2)
        zero = min(sp.norm(f - project(f, B)) for B in itertools.combinations(range(4), 2))
        assert bm.value <= zero + 1e-12
        # the returned approximant is a feasible competitor with the claimed error
        assert set(np.flatnonzero(bm.coefficients)) <= set(bm.support)
        assert sp.norm(f - bm.coefficients) == pytest.approx(bm.value, abs=1e-7)


@pytest.mark.parametrize("p,expo", [(2.0, 0.5), (1.0, 1.0), (4.0, 0.25)])
def test_profile_lp(p, expo):
    prof = fundamental_profile(make_lp(p, 4 if p != 1.0 else 3))
    m = np.arange(1, prof.dim + 1)
    assert np.allclose(prof.phi_u, m ** expo) and np.allclose(prof.phi_l, m ** expo)
    assert np.allclose(prof.phi_u_dual, m ** (1 - expo), atol=1e-9)


def test_profile_haar_l2():
    prof = fundamental_profile(make_haar(3, 2.0), dual=False)
    assert np.allclose(prof.phi_u, np.sqrt(np.arange(1, 9)), atol=1e-12)


def test_constants_report_l2_all_one():
    rep = constants_report(make_lp(2, 4), seed=0, samples=200)
    for k, c in rep.entries.items():
        for item in c if isinstance(c, list) else [c]:
            assert item.value == pytest.approx(1.0, abs=1e-6), k
    assert rep.entries["greedy"].mode == "exact"


def test_lorentz_embedding_l2():
    c = lorentz_embedding_constant(make_lp(2, 4), power_sequence(0.5, 4))
    assert c.value == pytest.approx(1.0, abs=1e-6)


def test_slc_isometric_for_symmetric_lattice():
    c = slc_constant(make_lorentz([1.0, 0.6, 0.5, 0.1]), max_size=2)
    assert c.value == pytest.approx(1.0, abs=1e-12)


def test_slc_detects_weighted_asymmetry():
    from greedylab.spaces import make_weighted_lp
    c = slc_constant(make_weighted_lp(2.0, [1.0, 4.0, 1.0, 1.0]), max_size=1)
    assert c.value == pytest.approx(2.0, rel=1e-9)
    assert c.witness


def test_greedy_constant_haar_p3_witness():
    sp = make_haar(3, 3.0)
    c = greedy_constant(sp, np.random.default_rng(0), samples=500)
    assert c.value > 1.02 and c.mode == "lower-bound-estimate"
    w = c.witness
    f = np.array(w["vector"])
    # witness saturates the reported value
    num = sp.norm(f - project(f, w["greedy_set"]))
    assert num / sp.norm(f - np.array(w["best_coefficients"])) == pytest.approx(c.value, abs=1e-9)


def test_cap_exceeded():
    with pytest.raises(CapExceeded):
        fundamental_profile(make_lp(2, 20), cap=16)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(0.05, 1.0), min_size=2, max_size=5))
def test_structural_on_lorentz(w):
    w = sorted(w, reverse=True)
    sp = make_lorentz(w)
    prof = fundamental_profile(sp)
    m = np.arange(1, len(w) + 1)
    assert np.all(np.diff(m / prof.phi_u) >= -1e-12)
    assert np.all(m <= prof.phi_u * prof.phi_l_dual + 1e-9)
    assert np.all(prof.phi_l <= prof.phi_u + 1e-15)
