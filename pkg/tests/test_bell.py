import numpy as np
import pytest
from hypothesis import given

from repeaterlab.bell import (
    PHI_PLUS,
    BellDiagonalState,
    StateConsistencyError,
    bell_index,
    epsilon_state,
    make_werner,
    twirl,
)

from conftest import bell_states


@pytest.mark.parametrize("F, expected", [
    (1.0, (1, 0, 0, 0)),
    (0.25, (0.25, 0.25, 0.25, 0.25)),
    (0.7, (0.7, 0.1, 0.1, 0.1)),
])
def test_make_werner(F, expected):
    assert np.allclose(make_werner(F).as_array(), expected, atol=1e-15)


@pytest.mark.parametrize("s, expected", [
    (BellDiagonalState(0.8, 0.1, 0.06, 0.04), (0.8, 0.2 / 3, 0.2 / 3, 0.2 / 3)),
    (make_werner(0.7), tuple(make_werner(0.7))),
    (PHI_PLUS, (1, 0, 0, 0)),
])
def test_twirl(s, expected):
    assert np.allclose(twirl(s).as_array(), expected, atol=1e-15)


@pytest.mark.parametrize("F0, eps, expected", [
    (0.7, 1.0, (0.7, 0.0, 0.0, 0.3)),
    (1.0, 0.5, (1, 0, 0, 0)),
])
def test_epsilon_state(F0, eps, expected):
    assert np.allclose(epsilon_state(F0, eps).as_array(), expected, atol=1e-15)


@pytest.mark.parametrize("F0", np.linspace(0, 1, 11))
def test_epsilon_third_is_werner(F0):
    diff = epsilon_state(F0, 1 / 3).as_array() - make_werner(F0).as_array()
    assert np.max(np.abs(diff)) <= 1e-15


@given(bell_states())
def test_twirl_idempotent_and_keeps_fidelity(s):
    once = twirl(s)
    assert once.a == s.a
    assert twirl(once) == once


def test_label_order():
    # Phi+, Psi-, Psi+, Phi- as (phase, parity)
    assert [bell_index(*lab) for lab in [(0, 0), (1, 1), (0, 1), (1, 0)]] == [0, 1, 2, 3]


def test_small_negative_is_clamped():
    s = BellDiagonalState(1.0, -5e-13, 0.0, 5e-13)
    assert s.b == 0.0


@pytest.mark.parametrize("weights", [
    (1.1, -0.1, 0.0, 0.0),
    (0.5, 0.2, 0.2, 0.2),
    (float("nan"), 0.5, 0.25, 0.25),
])
def test_invalid_weights_rejected(weights):
    with pytest.raises(ValueError):
        BellDiagonalState(*weights)


def test_from_vector_renormalizes_small_drift():
    s = BellDiagonalState.from_vector([0.7 + 5e-10, 0.1, 0.1, 0.1])
    assert abs(sum(s) - 1.0) < 1e-15


@pytest.mark.parametrize("vec", [[0.7 + 1e-6, 0.1, 0.1, 0.1], [1.0, -1e-6, 0.0, 1e-6]])
def test_from_vector_flags_large_drift(vec):
    with pytest.raises(StateConsistencyError):
        BellDiagonalState.from_vector(vec)


@pytest.mark.parametrize("bad", [-0.1, 1.5])
def test_domain_errors(bad):
    with pytest.raises(ValueError):
        make_werner(bad)
    with pytest.raises(ValueError):
        epsilon_state(0.7, bad)
