import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from repeaterlab.timing import (
    TimingParams,
    classical_time,
    estimate_time_c,
    log2_group,
    loop_time_ab,
    simulate_time_c,
    tau_pair_afc,
    total_time_ab,
    total_time_ab_closed,
)

DEFAULT = TimingParams()


def test_defaults():
    assert DEFAULT.tau_class == pytest.approx(3.3333e-5, rel=1e-4)


def test_afc_default():
    assert tau_pair_afc(DEFAULT) == pytest.approx(3.17e-4, rel=2e-3)


def test_afc_short_segment_limit():
    p = TimingParams(tau_op=1e-5, l_segment=1e-12, tau_class=4e-5)
    assert tau_pair_afc(p) == pytest.approx(5e-5 + 8e-5, rel=1e-9)


def test_classical_floor():
    assert classical_time(10240) == 10240 / 3e5
    assert round(classical_time(10240), 3) == 0.034


@pytest.mark.parametrize("bad", [{"tau_op": 0}, {"c": -1.0}, {"tau_class": 0.0}])
def test_timing_validation(bad):
    with pytest.raises(ValueError):
        TimingParams(**bad)


@pytest.mark.parametrize("L, l", [(2, 1), (4, 2), (1024, 10)])
def test_log2_group(L, l):
    assert log2_group(L) == l


@pytest.mark.parametrize("L", [1, 3, 6])
def test_log2_group_rejects(L):
    with pytest.raises(ValueError):
        log2_group(L)


def test_no_levels_is_pair_time():
    assert total_time_ab(2, [], DEFAULT) == tau_pair_afc(DEFAULT)


def test_loop_time_level_one():
    t = loop_time_ab(2, 1, 1, DEFAULT)
    assert t == pytest.approx(3e-5 + DEFAULT.tau_class + 3e-5 + 2 * DEFAULT.tau_class)


@settings(max_examples=40)
@given(st.sampled_from([2, 4, 8]), st.integers(0, 8), st.integers(0, 4))
def test_closed_form_equals_iteration(L, n, k):
    assert total_time_ab_closed(L, n, k, DEFAULT) == pytest.approx(total_time_ab(L, [k] * n, DEFAULT), rel=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("n", [5, 8, 12])
def test_classical_asymptote(n, k):
    p = TimingParams(tau_op=1e-12)
    N = 2**n
    t = total_time_ab(2, [k] * n, p) - tau_pair_afc(p)
    assert t == pytest.approx((2 * k + 1) * N * p.tau_class, rel=0.2)


def test_all_successes_deterministic():
    t = simulate_time_c(2, [[1.0], [1.0, 1.0]], DEFAULT, runs=20, seed=5, pool_size=64)
    assert t.std_total == 0.0
    assert np.all(t.samples == t.samples[0])
    # no restarts: the simulation equals the analytic estimate
    assert t.mean_total == pytest.approx(estimate_time_c(2, [(2, 1), (3, 2)], DEFAULT), rel=1e-12)


def test_seed_determinism():
    probs = [[0.8], [0.7, 0.9], [0.75]]
    a = simulate_time_c(2, probs, DEFAULT, runs=40, seed=11, pool_size=128)
    b = simulate_time_c(2, probs, DEFAULT, runs=40, seed=11, pool_size=128)
    c = simulate_time_c(2, probs, DEFAULT, runs=40, seed=12, pool_size=128)
    assert a.mean_total == b.mean_total and np.array_equal(a.samples, b.samples)
    assert a.mean_total != c.mean_total


def test_runs_are_independent_of_run_count():
    probs = [[0.8], [0.7]]
    short = simulate_time_c(2, probs, DEFAULT, runs=10, seed=2, pool_size=128)
    long = simulate_time_c(2, probs, DEFAULT, runs=30, seed=2, pool_size=128)
    assert np.array_equal(short.samples, long.samples[:10])


def test_empty_chain_and_bad_runs():
    t = simulate_time_c(2, [], DEFAULT, runs=3)
    assert t.mean_total == tau_pair_afc(DEFAULT) and t.std_total == 0.0
    with pytest.raises(ValueError):
        simulate_time_c(2, [[0.5]], DEFAULT, runs=0)


@pytest.mark.parametrize("field", ["tau_op", "tau_class"])
def test_monotone_in_time_constants(field):
    probs = [[0.7], [0.8], [0.75]]
    means = []
    for scale in (1.0, 2.0, 4.0):
        kw = {"tau_op": 1e-5, "tau_class": 3e-5}
        kw[field] *= scale
        means.append(simulate_time_c(2, probs, TimingParams(**kw), runs=50, seed=1, pool_size=128).mean_total)
        assert total_time_ab(2, [1, 2, 1], TimingParams(**kw)) > 0
    assert means == sorted(means)


def test_monotone_in_segments():
    means = [simulate_time_c(2, [[0.8]] * n, DEFAULT, runs=50, seed=1, pool_size=128).mean_total for n in range(1, 6)]
    assert means == sorted(means)
    ab = [total_time_ab(2, [1] * n, DEFAULT) for n in range(6)]
    assert ab == sorted(ab)
