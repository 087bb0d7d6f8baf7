import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from greedylab.seqlab import PosSequence, power_sequence
from greedylab.spaces import (DescriptorError, DimensionError, SignedSet, apply_multiplier, apply_shift,
                              dumps_descriptor, indicator, make_direct_sum_lp, make_lorentz, make_lp,
                              make_marcinkiewicz, make_weighted_lp, space_from_descriptor)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
vec4 = arrays(np.float64, 4, elements=finite)

MODELS = [
    make_lp(1.0, 4), make_lp(1.5, 4), make_lp(2.0, 4), make_lp(np.inf, 4),
    make_weighted_lp(3.0, [1.0, 2.0, 0.5, 1.0]),
    make_lorentz([1.0, 0.8, 0.6, 0.4]),
    make_marcinkiewicz(power_sequence(0.5, 4)),
    make_direct_sum_lp(2.0, [make_lp(1.0, 1), make_lp(3.0, 3)]),
]


def test_lp_values():
    assert make_lp(2, 3).norm([3.0, 4.0, 0.0]) == pytest.approx(5.0)
    assert make_lp(np.inf, 3).norm([3.0, -4.0, 0.0]) == 4.0
    assert make_lp(1, 3).norm([3.0, -4.0, 1.0]) == 8.0


def test_lorentz_rearranges():
    sp = make_lorentz([1.0, 0.5])
    assert sp.norm([1.0, 3.0]) == pytest.approx(3.5)


def test_marcinkiewicz_indicator_is_sigma():
    sig = power_sequence(0.5, 6)
    sp = make_marcinkiewicz(sig)
    for k in range(1, 7):
        assert sp.norm(indicator(range(k), 6)) == pytest.approx(sig(k), abs=1e-12)


def test_dual_of_lp_closed_form():
    y = np.array([1.0, -2.0, 0.5, 0.0])
    assert make_lp(3, 4).dual_norm(y) == pytest.approx(np.sum(np.abs(y) ** 1.5) ** (1 / 1.5), rel=1e-12)


@pytest.mark.parametrize("sp", MODELS, ids=lambda s: s.kind)
def test_dual_bracket_brackets_ratio(sp):
    rng = np.random.default_rng(1)
    for y in rng.standard_normal((5, sp.dim)):
        est = sp.dual_bracket(y)
        assert est.lower <= est.upper + 1e-12
        x = rng.standard_normal((50, sp.dim))
        # y.x / N(x) never exceeds the dual norm
        assert np.max(x @ y / sp.norm_many(x)) <= est.upper + 1e-7


@pytest.mark.parametrize("sp", MODELS, ids=lambda s: s.kind)
@settings(max_examples=40, deadline=None)
@given(x=vec4, y=vec4, c=finite)
def test_norm_axioms(sp, x, y, c):
    nx, ny = sp.norm(x), sp.norm(y)
    assert nx >= 0
    assert sp.norm(x + y) <= nx + ny + 1e-9 * (1 + nx + ny)
    assert sp.norm(c * x) == pytest.approx(abs(c) * nx, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("sp", MODELS, ids=lambda s: s.kind)
def test_descriptor_roundtrip(sp):
    again = space_from_descriptor(json.loads(dumps_descriptor(sp)))
    v = np.array([0.3, -1.0, 2.0, 0.1])
    assert again.norm(v) == sp.norm(v)


def test_descriptor_errors():
    with pytest.raises(DescriptorError):
        space_from_descriptor({"kind": "nope"})
    with pytest.raises(DescriptorError):
        space_from_descriptor({"p": 2})
    with pytest.raises(DescriptorError):
        space_from_descriptor({"kind": "weighted-lp", "p": 0.5, "weights": [1, 1]})


def test_dimension_checked():
    with pytest.raises(DimensionError):
        make_lp(2, 3).norm([1.0, 2.0])


def test_signed_set_validation():
    with pytest.raises(ValueError):
        SignedSet((0, 0))
    with pytest.raises(ValueError):
        SignedSet((0, 1), (1, 2))
    assert indicator([2, 0], 3, [-1, 1]).tolist() == [1.0, 0.0, -1.0]


@given(v=vec4, lam=arrays(np.float64, 4, elements=st.floats(-1, 1)))
def test_lattice_multiplier_contracts(v, lam):
    sp = make_lp(1.5, 4)
    assert sp.norm(apply_multiplier(sp, lam, v)) <= sp.norm(v) + 1e-12


def test_shift_moves_and_checks_range():
    sp = make_lp(2, 5)
    assert apply_shift(sp, [1, 3], [2.0, -1.0, 0, 0, 0]).tolist() == [0, 2.0, 0, -1.0, 0]
    with pytest.raises(IndexError):
        apply_shift(sp, [1, 5], [2.0, -1.0, 0, 0, 0])
    with pytest.raises(ValueError):
        apply_shift(sp, [3, 1], [2.0, -1.0, 0, 0, 0])


def test_symmetric_norm_shift_invariant():
    sp = make_lorentz([1.0, 0.7, 0.5, 0.2, 0.1])
    v = np.array([1.0, -0.3, 0.0, 0.0, 0.0])
    assert sp.norm(apply_shift(sp, [2, 4], v)) == pytest.approx(sp.norm(v))
