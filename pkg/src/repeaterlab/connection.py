"""
Entanglement swapping of adjacent pairs.

An ideal swap composes the Pauli frames of the two pairs, so the output label
is the XOR of the input (phase, parity) labels. A wrong x-basis outcome flips
the output phase and a wrong z-basis outcome flips the output parity, each
with probability 1 - eta. A depolarized CNOT or correction leaves the outer
pair maximally mixed, which gives the factor p1 * p2 per connection.

Because composition, the measurement flips and the depolarization all
commute, the result of a chain does not depend on the order in which
neighbouring pairs are joined.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .bell import LABELS, BellDiagonalState, bell_index
from .noise import NoiseParams

# index of (label_i XOR label_j)
_XOR = np.array([[bell_index(pi ^ pj, qi ^ qj) for (pj, qj) in LABELS] for (pi, qi) in LABELS])
# index after flipping the phase / the parity bit
_PHASE_FLIP = np.array([bell_index(p ^ 1, q) for p, q in LABELS])
_PARITY_FLIP = np.array([bell_index(p, q ^ 1) for p, q in LABELS])


class ConnectionStrategy(str, Enum):
    SEQUENTIAL = "sequential"
    PARALLEL = "parallel"


def _compose(v1: np.ndarray, v2: np.ndarray) -> np.ndarray:
    out = np.zeros(4)
    np.add.at(out, _XOR, np.outer(v1, v2))
    return out


def connect_pair(s1: BellDiagonalState, s2: BellDiagonalState, noise: NoiseParams) -> BellDiagonalState:
    """Noisy Bell measurement on the inner qubits plus outcome-dependent correction."""
    v = _compose(s1.as_array(), s2.as_array())
    miss = 1.0 - noise.eta
    v = (1.0 - miss) * v + miss * v[_PHASE_FLIP]
    v = (1.0 - miss) * v + miss * v[_PARITY_FLIP]
    r = noise.p1 * noise.p2
    return BellDiagonalState.from_vector(r * v + (1.0 - r) / 4.0)


def connect_chain_werner(f: float, n_pairs: int, noise: NoiseParams) -> float:
    """Fidelity after joining ``n_pairs`` Werner pairs of fidelity ``f``."""
    if n_pairs < 1:
        raise ValueError("need at least one pair")
    k = n_pairs - 1
    return 0.25 * (
        1.0
        + 3.0
        * (noise.p1 * noise.p2) ** k
        * ((4.0 * noise.eta**2 - 1.0) / 3.0) ** k
        * ((4.0 * f - 1.0) / 3.0) ** n_pairs
    )


def connect_chain(
    states: list[BellDiagonalState],
    strategy: ConnectionStrategy | str,
    noise: NoiseParams,
) -> tuple[BellDiagonalState, int]:
    """Join a chain of pairs; returns the end-to-end pair and the number of rounds.

    Sequential joins one more pair per round (N - 1 rounds). Parallel joins
    neighbours simultaneously, carrying an odd leftover to the next round
    (ceil(log2 N) rounds). Intermediate pairs are not twirled.
    """
    if not states:
        raise ValueError("empty chain")
    strategy = ConnectionStrategy(strategy)
    chain = list(states)
    rounds = 0
    if strategy is ConnectionStrategy.SEQUENTIAL:
        acc = chain[0]
        for s in chain[1:]:
            acc = connect_pair(acc, s, noise)
            rounds += 1
        return acc, rounds
    while len(chain) > 1:
        joined = [connect_pair(chain[i], chain[i + 1], noise) for i in range(0, len(chain) - 1, 2)]
        if len(chain) % 2:
            joined.append(chain[-1])
        chain = joined
        rounds += 1
    return chain[0], rounds
