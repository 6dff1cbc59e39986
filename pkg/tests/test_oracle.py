import numpy as np
import pytest
from hypothesis import given, settings

from repeaterlab.bell import PHI_PLUS, BellDiagonalState, make_werner, twirl
from repeaterlab.noise import NoiseParams
from repeaterlab.oracle import (
    CNOT,
    I2,
    X,
    DensityMatrix,
    apply_noisy_one_qubit,
    apply_noisy_two_qubit,
    bell_components,
    bell_offdiagonal_norm,
    measure_povm,
    oracle_connection,
    oracle_connection_outcomes,
    oracle_purification_step,
    partial_trace,
    product_state,
)

from conftest import bell_states, noise_params

BELL = DensityMatrix.from_bell_diagonal(PHI_PLUS)


def random_rho(n, seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(2**n, 2**n)) + 1j * rng.normal(size=(2**n, 2**n))
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m))


def test_identity_channel_is_noop():
    rho = random_rho(2, 1)
    out = apply_noisy_one_qubit(rho, I2, 0, 1.0)
    assert np.allclose(out.entries, rho.entries, atol=1e-14)


def test_full_one_qubit_depolarization():
    rho = random_rho(2, 2)
    out = apply_noisy_one_qubit(rho, X, 1, 0.0)
    expected = np.kron(partial_trace(rho.entries, [1]), I2 / 2)
    assert np.allclose(out.entries, expected, atol=1e-14)


def test_one_qubit_noise_on_bell_pair():
    # a depolarized half of a Bell pair leaves I/4, whose overlap is 1/4
    out = apply_noisy_one_qubit(BELL, I2, 0, 0.99)
    assert bell_components(out)[0] == pytest.approx(0.99 + 0.01 / 4, abs=1e-14)


def test_two_qubit_noise_on_bell_pair():
    out = apply_noisy_two_qubit(BELL, np.eye(4), 0, 1, 0.99)
    assert bell_components(out)[0] == pytest.approx(0.9925, abs=1e-14)


def test_full_two_qubit_depolarization():
    rho = random_rho(3, 3)
    out = apply_noisy_two_qubit(rho, CNOT, 0, 2, 0.0)
    rest = partial_trace(rho.entries, [0, 2])
    expected = np.zeros((8, 8), dtype=complex)
    # qubits 0 and 2 maximally mixed, qubit 1 keeps its reduced state
    expected = np.kron(np.kron(I2 / 2, rest), I2 / 2)
    assert np.allclose(out.entries, expected, atol=1e-14)


@pytest.mark.parametrize("bits, expected", [("00", "00"), ("01", "01"), ("10", "11"), ("11", "10")])
def test_cnot_truth_table(bits, expected):
    out = apply_noisy_two_qubit(DensityMatrix.basis(bits), CNOT, 0, 1, 1.0)
    assert np.allclose(out.entries, DensityMatrix.basis(expected).entries)


def test_cnot_reversed_operands():
    out = apply_noisy_two_qubit(DensityMatrix.basis("01"), CNOT, 1, 0, 1.0)
    assert np.allclose(out.entries, DensityMatrix.basis("11").entries)


@pytest.mark.parametrize("rho, eta, probs", [
    (product_state(DensityMatrix.basis("0"), DensityMatrix.basis("0")), 0.9, (0.9, 0.1)),
    (DensityMatrix(np.eye(4) / 4), 0.77, (0.5, 0.5)),
    (product_state(DensityMatrix.basis("1"), DensityMatrix.basis("0")), 1.0, (0.0, 1.0)),
])
def test_measure_povm(rho, eta, probs):
    out = measure_povm(rho, 0, eta)
    assert [b for b, _, _ in out] == [0, 1]
    assert [p for _, p, _ in out] == pytest.approx(probs, abs=1e-15)


def test_measure_zero_probability_has_no_post_state():
    rho = product_state(DensityMatrix.basis("1"), DensityMatrix.basis("0"))
    assert measure_povm(rho, 0, 1.0)[0][2] is None


def test_two_p1_channels_equal_one_p2_channel():
    rng = np.random.default_rng(4)
    for _ in range(20):
        s = BellDiagonalState.from_vector(rng.dirichlet(np.ones(4)))
        p1 = rng.uniform(0.8, 1.0)
        rho = DensityMatrix.from_bell_diagonal(s)
        two = apply_noisy_one_qubit(apply_noisy_one_qubit(rho, I2, 0, p1), I2, 1, p1)
        one = apply_noisy_two_qubit(rho, np.eye(4), 0, 1, p1 * p1)
        assert np.max(np.abs(two.entries - one.entries)) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(bell_states(), noise_params())
def test_channels_keep_density_matrix_valid(s, noise):
    rho = product_state(DensityMatrix.from_bell_diagonal(s), DensityMatrix.from_bell_diagonal(s))
    out = apply_noisy_two_qubit(rho, CNOT, 0, 2, noise.p2)
    out = apply_noisy_one_qubit(out, X, 3, noise.p1)
    assert np.trace(out.entries).real == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(out.entries - out.entries.conj().T)) <= 1e-12
    assert np.linalg.eigvalsh(out.entries).min() >= -1e-10


def test_perfect_scheme_a_step():
    s, p = oracle_purification_step(make_werner(0.7), make_werner(0.7), "A", NoiseParams())
    assert s.a == pytest.approx(0.7352941176470589, abs=1e-12)
    assert p == pytest.approx(0.68, abs=1e-12)


@pytest.mark.parametrize("noise", [NoiseParams(), NoiseParams(0.9, 0.93, 0.95)])
def test_fully_mixed_is_fixed(noise):
    s, _ = oracle_purification_step(make_werner(0.25), make_werner(0.25), "A", noise)
    assert s.a == pytest.approx(0.25, abs=1e-14)


def test_scheme_b_golden(golden):
    g = golden["scheme_b_werner07_p099"]
    s, p = oracle_purification_step(make_werner(0.7), make_werner(0.7), "B", NoiseParams(1, 0.99, 0.99))
    assert np.allclose(s.as_array(), g["state"], atol=1e-14)
    assert p == pytest.approx(g["p_even"], abs=1e-14)


def test_purification_output_is_bell_diagonal():
    rng = np.random.default_rng(9)
    from repeaterlab.oracle import oracle_purification_unnormalized
    for _ in range(5):
        s1, s2 = (BellDiagonalState.from_vector(rng.dirichlet(np.ones(4))) for _ in range(2))
        kept = oracle_purification_unnormalized(s1, s2, "B", NoiseParams(0.97, 0.95, 0.96))
        rho = DensityMatrix._unchecked(kept / np.trace(kept))
        assert bell_offdiagonal_norm(rho) < 1e-12


def test_swap_of_perfect_pairs():
    assert np.allclose(oracle_connection(PHI_PLUS, PHI_PLUS, NoiseParams()).as_array(), [1, 0, 0, 0], atol=1e-14)
    outs = oracle_connection_outcomes(PHI_PLUS, PHI_PLUS, NoiseParams())
    assert [p for _, p, _ in outs] == pytest.approx([0.25] * 4)


def test_swap_of_werner_pairs():
    s = oracle_connection(make_werner(0.96), make_werner(0.96), NoiseParams())
    expected = 0.25 * (1 + 3 * ((4 * 0.96 - 1) / 3) ** 2)
    assert twirl(s).a == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.92213, abs=1e-5)


def test_swap_golden(golden):
    s = oracle_connection(make_werner(0.96), make_werner(0.96), NoiseParams(1, 0.995, 0.995))
    assert np.allclose(s.as_array(), golden["connect_werner096_p0995"]["state"], atol=1e-14)


@pytest.mark.parametrize("bad", [
    lambda: DensityMatrix(np.array([[1, 1], [0, 0]], dtype=complex)),
    lambda: DensityMatrix(np.eye(2)),
    lambda: DensityMatrix(np.diag([1.5, -0.5])),
    lambda: DensityMatrix(np.eye(128) / 128),
    lambda: DensityMatrix(np.eye(3) / 3),
    lambda: apply_noisy_one_qubit(BELL, np.array([[1, 1], [0, 1]]), 0, 1.0),
    lambda: oracle_purification_step(PHI_PLUS, PHI_PLUS, "Z", NoiseParams()),
])
def test_rejects_invalid_input(bad):
    with pytest.raises(ValueError):
        bad()


def test_bad_qubit_index():
    with pytest.raises(IndexError):
        apply_noisy_one_qubit(BELL, X, 2, 1.0)


def test_matrix_is_read_only():
    with pytest.raises(ValueError):
        BELL.entries[0, 0] = 0
