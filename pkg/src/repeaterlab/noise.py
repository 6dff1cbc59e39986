"""Stochastic error parameters for local operations and measurements."""

from __future__ import annotations

from dataclasses import dataclass


def _check_unit(name: str, x: float) -> None:
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {x!r}")


@dataclass(frozen=True)
class NoiseParams:
    """Reliabilities of one- and two-qubit gates and measurement quality.

    ``p1`` and ``p2`` are the weights of the ideal operation (the rest is
    full depolarization of the qubits acted on); ``eta`` is the probability
    that a single-qubit measurement reports the correct outcome.
    """

    p1: float = 1.0
    p2: float = 1.0
    eta: float = 1.0

    def __post_init__(self):
        for name in ("p1", "p2", "eta"):
            _check_unit(name, getattr(self, name))

    @classmethod
    def perfect(cls) -> "NoiseParams":
        return cls(1.0, 1.0, 1.0)

    @classmethod
    def from_error(cls, x: float) -> "NoiseParams":
        """Uniform error probability ``x``: p1 = p2 = eta = 1 - x."""
        return cls(1.0 - x, 1.0 - x, 1.0 - x)


def compose_reliability(pa: float, pb: float) -> float:
    """Reliability of two local operations applied in sequence."""
    _check_unit("pa", pa)
    _check_unit("pb", pb)
    return pa * pb


def povm_probabilities(p0_weight: float, eta: float) -> tuple[float, float]:
    """Outcome probabilities of the noisy Z measurement.

    ``p0_weight`` is the |0> population of the measured qubit.
    """
    _check_unit("p0_weight", p0_weight)
    _check_unit("eta", eta)
    prob0 = eta * p0_weight + (1.0 - eta) * (1.0 - p0_weight)
    return prob0, 1.0 - prob0
