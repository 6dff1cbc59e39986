"""
Bell-diagonal two-qubit states.

A Bell-diagonal state is stored as the four weights (a, b, c, d) on
(Phi+, Psi-, Psi+, Phi-). The fidelity with Phi+ is ``a``.

Each Bell state is also labelled by a (phase, parity) bit pair, which is the
Pauli frame relative to Phi+:

    Phi+ = (0, 0)   Psi- = (1, 1)   Psi+ = (0, 1)   Phi- = (1, 0)

Bilateral CNOTs and entanglement swapping act on these labels by XOR, which
is what the analytic maps in :mod:`repeaterlab.purification` and
:mod:`repeaterlab.connection` exploit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NEG_TOL = 1e-12
SUM_TOL = 1e-12
RENORM_TOL = 1e-9

# (phase, parity) label of component index 0..3
LABELS: tuple[tuple[int, int], ...] = ((0, 0), (1, 1), (0, 1), (1, 0))
_INDEX = {label: i for i, label in enumerate(LABELS)}


class StateConsistencyError(ArithmeticError):
    """Raised when a map produces a vector that is not a probability vector."""


def bell_index(phase: int, parity: int) -> int:
    """Component index of the Bell state with the given Pauli-frame label."""
    return _INDEX[(phase & 1, parity & 1)]


def _check_unit(name: str, x: float) -> None:
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {x!r}")


@dataclass(frozen=True)
class BellDiagonalState:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        vals = [float(v) for v in (self.a, self.b, self.c, self.d)]
        for i, v in enumerate(vals):
            if not np.isfinite(v):
                raise ValueError(f"non-finite Bell weight {v!r}")
            if v < 0.0:
                if v < -NEG_TOL:
                    raise ValueError(f"negative Bell weight {v!r}")
                vals[i] = 0.0
        total = sum(vals)
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"Bell weights sum to {total!r}, expected 1")
        for name, v in zip("abcd", vals):
            object.__setattr__(self, name, v)

    @property
    def fidelity(self) -> float:
        return self.a

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d], dtype=np.float64)

    @classmethod
    def from_vector(cls, vec) -> "BellDiagonalState":
        """Build a state from a map output, renormalizing rounding drift.

        Drift larger than ``RENORM_TOL`` or negative entries beyond
        ``NEG_TOL`` mean the map is broken and raise
        :class:`StateConsistencyError`.
        """
        v = np.asarray(vec, dtype=np.float64).reshape(4)
        if np.any(v < -NEG_TOL) or not np.all(np.isfinite(v)):
            raise StateConsistencyError(f"invalid Bell weights {v}")
        v = np.where(v < 0.0, 0.0, v)
        total = float(v.sum())
        if abs(total - 1.0) > RENORM_TOL:
            raise StateConsistencyError(f"Bell weights sum to {total!r}")
        v = v / total
        return cls(*v.tolist())

    def __iter__(self):
        return iter((self.a, self.b, self.c, self.d))


PHI_PLUS = BellDiagonalState(1.0, 0.0, 0.0, 0.0)


def make_werner(F: float) -> BellDiagonalState:
    _check_unit("F", F)
    e = (1.0 - F) / 3.0
    return BellDiagonalState(F, e, e, e)


def twirl(s: BellDiagonalState) -> BellDiagonalState:
    """Depolarize to the Werner state of equal fidelity (noiseless)."""
    return make_werner(s.a)


def epsilon_state(F0: float, eps: float) -> BellDiagonalState:
    """Shape family with fixed fidelity: eps=1/3 is Werner, eps=1 is binary (A, D)."""
    _check_unit("F0", F0)
    _check_unit("eps", eps)
    rest = 1.0 - F0
    bc = rest * (1.0 - eps) / 2.0
    return BellDiagonalState(F0, bc, bc, rest * eps)
