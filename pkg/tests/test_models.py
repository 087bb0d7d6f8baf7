import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from greedylab.metrics import fundamental_profile, unconditionality
from greedylab.models import (Haar, fundamental_beam_estimate, haar_synthesis, make_besov_truncation, make_haar,
                              make_schlumprecht, schlumprecht_f, schlumprecht_norm)
from greedylab.spaces import indicator, make_lp


@pytest.mark.parametrize("levels", [1, 2, 3])
def test_haar_p2_fundamental_is_sqrt(levels):
    prof = fundamental_profile(make_haar(levels, 2.0), dual=False)
    m = np.arange(1, prof.dim + 1)
    assert np.allclose(prof.phi_u, np.sqrt(m), atol=1e-12)
    assert np.allclose(prof.phi_l, np.sqrt(m), atol=1e-12)


def test_haar_p2_orthonormal_at_four_levels():
    sp = make_haar(4, 2.0)
    G = sp.H.T @ sp.H / sp.dim
    assert np.allclose(G, np.eye(sp.dim), atol=1e-12)


def test_haar_one_level_is_identity_normalised():
    H = haar_synthesis(1, 3.0)
    assert np.allclose(np.abs(H), 1.0)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
@pytest.mark.parametrize("levels", [1, 2, 3, 4])
def test_haar_biorthogonality(p, levels):
    sp = make_haar(levels, p)
    assert np.max(np.abs(sp.Hdual.T @ sp.H / sp.dim - np.eye(sp.dim))) <= 1e-12


@settings(max_examples=25)
@given(arrays(np.float64, 8, elements=st.floats(-5, 5)))
def test_haar_coefficients_roundtrip(v):
    sp = make_haar(3, 3.0)
    assert np.allclose(sp.coefficients(sp.H @ v), v, atol=1e-10)


def test_haar_p3_profile_envelope():
    prof = fundamental_profile(make_haar(3, 3.0), dual=False)
    r = prof.phi_u / np.arange(1, 9) ** (1 / 3)
    assert np.all((0.8 <= r) & (r <= 1.6))


def test_haar_p2_lattice():
    ku, ksu, _ = unconditionality(make_haar(2, 2.0), np.random.default_rng(0), samples=50)
    assert ku.value == pytest.approx(1.0, abs=1e-9)


def test_haar_democracy_trend():
    dem = {p: fundamental_profile(make_haar(3, p), dual=False) for p in (2.0, 3.0)}
    d = {p: float(np.max(pr.phi_u / pr.phi_l)) for p, pr in dem.items()}
    assert d[3.0] > d[2.0]


def test_haar_rejects_p():
    with pytest.raises(ValueError):
        make_haar(2, 1.0)
    with pytest.raises(ValueError):
        make_haar(7, 2.0)


def test_beam_estimate_matches_enumeration_small():
    sp = make_haar(3, 3.0)
    exact = fundamental_profile(sp, dual=False).phi_u
    beam = fundamental_beam_estimate(sp, width=24)
    assert np.all(beam <= exact + 1e-12)
    # a lower estimate: tight at the ends, within 2% in between
    assert beam[0] == exact[0] and beam[-1] == pytest.approx(exact[-1], abs=1e-12)
    assert np.all(beam >= 0.98 * exact)


def test_besov_dim_and_lp_case():
    sp = make_besov_truncation(2.0, 3.0, 3)
    assert sp.dim == 6
    same = make_besov_truncation(1.5, 1.5, 3)
    ref = make_lp(1.5, 6)
    X = np.random.default_rng(0).standard_normal((100, 6))
    assert np.allclose(same.norm_many(X), ref.norm_many(X), rtol=0, atol=1e-12)


def test_besov_envelope():
    prof = fundamental_profile(make_besov_truncation(1.5, 4.0, 3), dual=False)
    t = np.arange(1, 7) ** (2 / 3)
    assert np.all(prof.phi_u >= t / 1.6) and np.all(prof.phi_u <= 1.6 * t)


def test_schlumprecht_examples():
    sp = make_schlumprecht(4)
    assert sp.norm([1.0, 0, 0, 0]) == 1.0
    assert schlumprecht_norm([1.0, 1.0, 1.0, 1.0], sp)[0] == pytest.approx(4 / np.log2(5), abs=1e-9)
    assert schlumprecht_norm([1.0, 1.0])[0] == pytest.approx(2 / np.log2(3), abs=1e-9)


def test_schlumprecht_indicator_law_any_position():
    sp = make_schlumprecht(9)
    for size in range(1, 9):
        for A in itertools.islice(itertools.combinations(range(9), size), 12):
            val, _ = sp.evaluate(indicator(A, 9), compress=False)
            assert val == pytest.approx(size / np.log2(size + 1), abs=1e-6)


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, 6, elements=st.floats(-3, 3)))
def test_schlumprecht_between_linf_and_l1(v):
    sp = make_schlumprecht(6)
    val = sp.norm(v)
    assert np.max(np.abs(v)) - 1e-12 <= val <= np.sum(np.abs(v)) + 1e-9
    g = sp.subgradient(v)
    assert float(g @ v) == pytest.approx(val, abs=1e-8)


def test_schlumprecht_f_properties():
    x = np.linspace(1.1, 32, 120)
    fx = schlumprecht_f(x)
    assert schlumprecht_f(1.0) == 1.0
    assert np.all(fx < x)
    assert np.all(schlumprecht_f(np.multiply.outer(x, x)) <= np.multiply.outer(fx, fx) + 1e-12)
    k = np.arange(1, 65, dtype=float)
    assert np.max(np.diff(k / schlumprecht_f(k), 2)) <= 1e-12


def test_schlumprecht_dim_cap():
    with pytest.raises(ValueError):
        make_schlumprecht(33)


def test_haar_subclass_kind():
    assert isinstance(make_haar(2, 3.0), Haar)
