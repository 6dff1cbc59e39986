"""
Dense density-matrix simulator used as ground truth for the analytic maps.

Conventions (fixed, do not change):

* Qubit 0 is the most significant tensor factor, so ``kron(rho_0, rho_1)``
  puts ``rho_0`` on qubit 0.
* Pair ``k`` occupies qubits ``(2k, 2k + 1)``. In a purification step pair 0
  (qubits 0, 1) is kept and pair 1 (qubits 2, 3) is measured; location A holds
  the even qubits, location B the odd ones. The bilateral CNOTs therefore act
  on (0 -> 2) at A and (1 -> 3) at B.
* In a connection, pair 0 is (0, 1) and pair 1 is (2, 3); the Bell
  measurement acts on the inner qubits 1 and 2 and the correction on qubit 3.

Nothing here is optimized. Everything is computed on full 2^n x 2^n matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .bell import BellDiagonalState, StateConsistencyError, twirl
from .noise import NoiseParams

MAX_QUBITS = 6
HERM_TOL = 1e-12
TRACE_TOL = 1e-12
EIG_TOL = 1e-10
UNITARY_TOL = 1e-12

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)


def rx(theta: float) -> np.ndarray:
    """exp(-i theta X / 2)."""
    return np.cos(theta / 2) * I2 - 1j * np.sin(theta / 2) * X


_s = 1 / np.sqrt(2)
# Bell vectors in component order (Phi+, Psi-, Psi+, Phi-)
BELL_VECTORS = np.array(
    [
        [_s, 0, 0, _s],
        [0, _s, -_s, 0],
        [0, _s, _s, 0],
        [_s, 0, 0, -_s],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class DensityMatrix:
    """Validated, immutable density matrix over ``n_qubits`` qubits."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        dim = m.shape[0]
        if m.ndim != 2 or m.shape[1] != dim or dim & (dim - 1) or dim < 2:
            raise ValueError(f"bad density matrix shape {m.shape}")
        if dim.bit_length() - 1 > MAX_QUBITS:
            raise ValueError("oracle supports at most 6 qubits")
        if np.max(np.abs(m - m.conj().T)) > HERM_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1.0) > TRACE_TOL:
            raise ValueError(f"trace is {np.trace(m)!r}")
        if np.min(np.linalg.eigvalsh(m)) < -EIG_TOL:
            raise ValueError("density matrix is not positive")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def n_qubits(self) -> int:
        return self.entries.shape[0].bit_length() - 1

    @classmethod
    def _unchecked(cls, m: np.ndarray) -> "DensityMatrix":
        # Hermitize to scrub rounding, then validate as usual.
        return cls(0.5 * (m + m.conj().T))

    @classmethod
    def from_bell_diagonal(cls, s: BellDiagonalState) -> "DensityMatrix":
        m = sum(w * np.outer(v, v.conj()) for w, v in zip(s, BELL_VECTORS))
        return cls._unchecked(m)

    @classmethod
    def basis(cls, bits: str) -> "DensityMatrix":
        m = np.zeros((2 ** len(bits),) * 2, dtype=complex)
        k = int(bits, 2)
        m[k, k] = 1.0
        return cls(m)

    def tensor(self, other: "DensityMatrix") -> "DensityMatrix":
        return DensityMatrix._unchecked(np.kron(self.entries, other.entries))


def product_state(*rhos: DensityMatrix) -> DensityMatrix:
    out = rhos[0]
    for r in rhos[1:]:
        out = out.tensor(r)
    return out


def _check_index(n: int, *qubits: int) -> None:
    for q in qubits:
        if not (0 <= q < n):
            raise IndexError(f"qubit {q} out of range for {n} qubits")
    if len(set(qubits)) != len(qubits):
        raise ValueError("qubit indices must be distinct")


def _check_unitary(u: np.ndarray, dim: int) -> None:
    if u.shape != (dim, dim):
        raise ValueError(f"gate must be {dim}x{dim}")
    if np.max(np.abs(u.conj().T @ u - np.eye(dim))) > UNITARY_TOL:
        raise ValueError("gate is not unitary")


def permute_qubits(m: np.ndarray, order: list[int]) -> np.ndarray:
    """Reorder tensor factors: new qubit i is old qubit ``order[i]``."""
    n = m.shape[0].bit_length() - 1
    t = m.reshape([2] * (2 * n))
    t = t.transpose(list(order) + [n + q for q in order])
    return t.reshape(m.shape)


def embed(gate: np.ndarray, targets: list[int], n: int) -> np.ndarray:
    """Full 2^n operator acting as ``gate`` on ``targets`` (in that order)."""
    rest = [q for q in range(n) if q not in targets]
    full = np.kron(gate, np.eye(2 ** len(rest), dtype=complex))
    # full acts on ordering targets + rest; move back to 0..n-1
    order = list(targets) + rest
    inverse = [order.index(q) for q in range(n)]
    return permute_qubits(full, inverse)


def partial_trace(m: np.ndarray, traced: list[int]) -> np.ndarray:
    """Trace out ``traced`` qubits; remaining qubits keep their relative order."""
    n = m.shape[0].bit_length() - 1
    keep = [q for q in range(n) if q not in traced]
    t = m.reshape([2] * (2 * n))
    # bring traced axes to the end pairwise and contract
    t = t.transpose(keep + traced + [n + q for q in keep] + [n + q for q in traced])
    k, r = len(keep), len(traced)
    t = t.reshape(2**k, 2**r, 2**k, 2**r)
    return np.einsum("ajbj->ab", t)


def depolarize(m: np.ndarray, qubits: list[int]) -> np.ndarray:
    """tr_qubits{m} (x) I/2^k, with the identity on the original slots."""
    n = m.shape[0].bit_length() - 1
    rest = [q for q in range(n) if q not in qubits]
    k = len(qubits)
    reduced = partial_trace(m, list(qubits))
    full = np.kron(reduced, np.eye(2**k, dtype=complex) / 2**k)
    order = rest + list(qubits)
    inverse = [order.index(q) for q in range(n)]
    return permute_qubits(full, inverse)


def apply_unitary(rho: DensityMatrix, gate: np.ndarray, targets: list[int]) -> DensityMatrix:
    u = embed(gate, targets, rho.n_qubits)
    return DensityMatrix._unchecked(u @ rho.entries @ u.conj().T)


def apply_noisy_one_qubit(rho: DensityMatrix, gate: np.ndarray, target: int, p1: float) -> DensityMatrix:
    _check_index(rho.n_qubits, target)
    gate = np.asarray(gate, dtype=complex)
    _check_unitary(gate, 2)
    ideal = apply_unitary(rho, gate, [target]).entries
    mixed = depolarize(rho.entries, [target])
    return DensityMatrix._unchecked(p1 * ideal + (1 - p1) * mixed)


def apply_noisy_two_qubit(
    rho: DensityMatrix, gate: np.ndarray, q_a: int, q_b: int, p2: float
) -> DensityMatrix:
    _check_index(rho.n_qubits, q_a, q_b)
    gate = np.asarray(gate, dtype=complex)
    _check_unitary(gate, 4)
    ideal = apply_unitary(rho, gate, [q_a, q_b]).entries
    mixed = depolarize(rho.entries, [q_a, q_b])
    return DensityMatrix._unchecked(p2 * ideal + (1 - p2) * mixed)


def _measure_weighted(m: np.ndarray, target: int, eta: float) -> list[tuple[int, float, np.ndarray]]:
    n = m.shape[0].bit_length() - 1
    out = []
    for bit in (0, 1):
        diag = np.array([eta, 1 - eta] if bit == 0 else [1 - eta, eta], dtype=complex)
        effect = embed(np.diag(diag), [target], n)
        weighted = effect @ m
        prob = float(np.real(np.trace(weighted)))
        out.append((bit, prob, partial_trace(weighted, [target])))
    return out


def measure_povm(rho: DensityMatrix, target: int, eta: float) -> list[tuple[int, float, DensityMatrix | None]]:
    """Noisy Z measurement; the measured qubit is traced out afterwards.

    Returns ``(bit, probability, post_state)`` for both outcomes. The
    post-state is ``None`` for an outcome of zero probability.
    """
    _check_index(rho.n_qubits, target)
    if rho.n_qubits < 2:
        raise ValueError("cannot trace out the only qubit")
    result = []
    for bit, prob, unnorm in _measure_weighted(rho.entries, target, eta):
        post = DensityMatrix._unchecked(unnorm / prob) if prob > 0 else None
        result.append((bit, prob, post))
    return result


def bell_components(rho: DensityMatrix) -> np.ndarray:
    """Diagonal of a two-qubit state in the Bell basis (component order a, b, c, d)."""
    if rho.n_qubits != 2:
        raise ValueError("expected a two-qubit state")
    m = rho.entries
    return np.array([np.real(v.conj() @ m @ v) for v in BELL_VECTORS])


def bell_offdiagonal_norm(rho: DensityMatrix) -> float:
    """Largest off-diagonal magnitude in the Bell basis."""
    b = BELL_VECTORS.conj() @ rho.entries @ BELL_VECTORS.T
    return float(np.max(np.abs(b - np.diag(np.diag(b)))))


def _scheme_gate(scheme: str, side: str) -> np.ndarray:
    if scheme == "A":
        return CNOT
    # +pi/2 about x at A, -pi/2 at B, folded into the CNOT
    sign = 1.0 if side == "A" else -1.0
    r = rx(sign * np.pi / 2)
    return CNOT @ np.kron(r, r)


def oracle_purification_unnormalized(
    s1: BellDiagonalState, s2: BellDiagonalState, scheme: str, noise: NoiseParams
) -> np.ndarray:
    """Unnormalized kept-pair state after coincidence post-selection (4x4 matrix)."""
    if scheme not in ("A", "B"):
        raise ValueError(f"unknown purification scheme {scheme!r}")
    rho = product_state(DensityMatrix.from_bell_diagonal(s1), DensityMatrix.from_bell_diagonal(s2))
    rho = apply_noisy_two_qubit(rho, _scheme_gate(scheme, "A"), 0, 2, noise.p2)
    rho = apply_noisy_two_qubit(rho, _scheme_gate(scheme, "B"), 1, 3, noise.p2)
    kept = np.zeros((4, 4), dtype=complex)
    # measure qubit 3 first (index stays valid), then qubit 2
    for b4, _, m4 in _measure_weighted(rho.entries, 3, noise.eta):
        for b3, _, m34 in _measure_weighted(m4, 2, noise.eta):
            if b3 == b4:
                kept += m34
    return kept


def oracle_purification_step(
    s1: BellDiagonalState, s2: BellDiagonalState, scheme: str, noise: NoiseParams
) -> tuple[BellDiagonalState, float]:
    """One noisy recurrence step; returns the kept pair and the success probability.

    Scheme ``"A"`` twirls inputs and output to Werner form; scheme ``"B"``
    applies the pi/2 rotations and keeps the full Bell-diagonal vector.
    """
    if scheme == "A":
        s1, s2 = twirl(s1), twirl(s2)
    kept = oracle_purification_unnormalized(s1, s2, scheme, noise)
    p_even = float(np.real(np.trace(kept)))
    if p_even <= 0:
        raise StateConsistencyError("post-selection has zero probability")
    state = DensityMatrix._unchecked(kept / p_even)
    out = BellDiagonalState.from_vector(bell_components(state))
    if scheme == "A":
        out = twirl(out)
    return out, p_even


# outcome (x-basis bit on qubit 1, z-basis bit on qubit 2) -> Pauli on qubit 3
def _correction(m_x: int, m_z: int) -> np.ndarray:
    return np.linalg.matrix_power(Z, m_x) @ np.linalg.matrix_power(X, m_z)


def oracle_connection_outcomes(
    s1: BellDiagonalState, s2: BellDiagonalState, noise: NoiseParams
) -> list[tuple[tuple[int, int], float, np.ndarray]]:
    """Per-outcome (probability, Bell components of the 1-4 pair) of a noisy swap."""
    rho = product_state(DensityMatrix.from_bell_diagonal(s1), DensityMatrix.from_bell_diagonal(s2))
    rho = apply_noisy_two_qubit(rho, CNOT, 1, 2, noise.p2)
    # x-basis measurement of qubit 1 == ideal Hadamard then noisy z measurement
    rho = apply_unitary(rho, H, [1])
    results = []
    for m_z, _, after_z in _measure_weighted(rho.entries, 2, noise.eta):
        # qubit 2 removed; old qubit 1 is still index 1
        for m_x, prob, after_x in _measure_weighted(after_z, 1, noise.eta):
            if prob <= 0:
                continue
            pair = DensityMatrix._unchecked(after_x / prob)
            pair = apply_noisy_one_qubit(pair, _correction(m_x, m_z), 1, noise.p1)
            results.append(((m_x, m_z), prob, bell_components(pair)))
    return results


def oracle_connection(
    s1: BellDiagonalState, s2: BellDiagonalState, noise: NoiseParams, agree_tol: float = 1e-9
) -> BellDiagonalState:
    """Noisy entanglement swap of pairs (0,1) and (2,3); returns the (0,3) pair.

    The four outcome-conditioned states are checked to agree before averaging.
    """
    results = oracle_connection_outcomes(s1, s2, noise)
    ref = results[0][2]
    for _, _, comps in results[1:]:
        if np.max(np.abs(comps - ref)) > agree_tol:
            raise StateConsistencyError("connection result depends on the measurement outcome")
    avg = sum(prob * comps for _, prob, comps in results)
    return BellDiagonalState.from_vector(avg)

