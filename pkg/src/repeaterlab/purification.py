"""
Recurrence purification with noisy gates and measurements.

Scheme A: Werner pairs, bilateral CNOT, coincidence
post-selection, re-twirl. Scheme B: the same on full
Bell-diagonal vectors with pi/2 rotations before the CNOTs and no twirl.
Scheme C: scheme B's map with the second (sacrificed) pair held fixed.

All maps share one structure. With q = eta^2 + (1-eta)^2 the probability
that the two noisy measurements report the true parity, the unnormalized
kept pair is

    p2^2 * [q * even(s1, s2) + (1 - q) * odd(s1, s2)] + (1 - p2^2) / 8

where ``even``/``odd`` are the ideal bilateral-CNOT contributions for equal
and unequal parity labels, and the success probability is its trace.
A depolarized gate leaves the measured qubit maximally mixed, so that branch
passes post-selection with probability 1/2 and carries I/4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bell import BellDiagonalState, StateConsistencyError, make_werner, twirl
from .noise import NoiseParams

FIX_TOL = 1e-10
MAX_ITER = 10_000
DISC_TOL = 1e-12


class TargetUnreachable(ValueError):
    """The requested fidelity cannot be reached with the given scheme and noise."""


class NonConvergence(RuntimeError):
    pass


@dataclass(frozen=True)
class FixpointReport:
    f_trivial: float = 0.25
    f_min: float | None = None
    f_max: float | None = None
    purification_possible: bool = False


@dataclass(frozen=True)
class ResourceReport:
    """Expected cost of purifying up to a target fidelity.

    ``s`` is the expected number of performed steps including failures. For
    schemes A and B every step is performed on the whole tree in parallel,
    so ``s == k_max``.
    """

    k_max: int
    m: float
    s: float
    p_even: tuple[float, ...] = ()
    final_state: BellDiagonalState | None = None
    trajectory: tuple[BellDiagonalState, ...] = field(default=(), repr=False)


def _parity_weight(eta: float) -> float:
    return eta * eta + (1.0 - eta) * (1.0 - eta)


def _rotate(v: np.ndarray) -> np.ndarray:
    # pi/2 x-rotations (A: +, B: -) exchange Psi- and Phi-
    return v[[0, 3, 2, 1]]


def bilateral_map(
    s1: BellDiagonalState, s2: BellDiagonalState, noise: NoiseParams, rotate: bool
) -> tuple[np.ndarray, float]:
    """Unnormalized kept-pair vector and success probability of one step."""
    a1, b1, c1, d1 = _rotate(s1.as_array()) if rotate else s1.as_array()
    a2, b2, c2, d2 = _rotate(s2.as_array()) if rotate else s2.as_array()
    q = _parity_weight(noise.eta)
    even = np.array([
        a1 * a2 + d1 * d2,
        c1 * b2 + b1 * c2,
        c1 * c2 + b1 * b2,
        a1 * d2 + d1 * a2,
    ])
    odd = np.array([
        a1 * c2 + d1 * b2,
        c1 * d2 + b1 * a2,
        c1 * a2 + b1 * d2,
        a1 * b2 + d1 * c2,
    ])
    p2sq = noise.p2 * noise.p2
    unnorm = p2sq * (q * even + (1.0 - q) * odd) + (1.0 - p2sq) / 8.0
    return unnorm, float(unnorm.sum())


def _normalize(unnorm: np.ndarray, p_even: float) -> BellDiagonalState:
    if p_even <= 0.0:
        raise StateConsistencyError("success probability vanished")
    return BellDiagonalState.from_vector(unnorm / p_even)


# ---------------------------------------------------------------- scheme A


def scheme_a_step(f: float, noise: NoiseParams) -> tuple[float, float]:
    """Noisy recurrence for Werner pairs.

    Returns the new fidelity and the success probability. The fidelity
    formula is normalized by p2^2, so the success probability is p2^2
    times its denominator.
    """
    if not (0.0 <= f <= 1.0):
        raise ValueError(f"fidelity must lie in [0, 1], got {f!r}")
    eta, p2 = noise.eta, noise.p2
    if p2 <= 0.0:
        return 0.25, 0.5
    e = (1.0 - f) / 3.0
    q = eta**2 + (1.0 - eta) ** 2
    x = 2.0 * eta * (1.0 - eta)
    dep = (1.0 - p2**2) / (8.0 * p2**2)
    num = (f**2 + e**2) * q + (f * e + e**2) * x + dep
    den = (f**2 + 2.0 / 3.0 * f * (1.0 - f) + 5.0 / 9.0 * (1.0 - f) ** 2) * q + (f * e + e**2) * 4.0 * x + 4.0 * dep
    if den <= 0.0:
        raise StateConsistencyError("non-positive success probability")
    return num / den, p2**2 * den


def werner_recurrence_perfect(f: float) -> float:
    """Noiseless Werner recurrence."""
    g = 1.0 - f
    return (f * f + (g / 3.0) ** 2) / (f * f + 2.0 / 3.0 * f * g + 5.0 / 9.0 * g * g)


def scheme_a_fixpoints(noise: NoiseParams) -> FixpointReport:
    eta, p2 = noise.eta, noise.p2
    if p2 <= 0.0:
        return FixpointReport()
    g = eta * (eta - 1.0)
    disc = (
        10.0 - 9.0 / p2**2 + 64 * eta**4 - 128 * eta**3 + 116 * eta**2 - 52 * eta
        - 36.0 * g / p2**2
    )
    if disc < 0.0:
        if disc < -DISC_TOL:
            return FixpointReport()
        disc = 0.0
    root = math.sqrt(disc)
    den = 16.0 * g + 4.0
    # F = 1 is exactly fixed when p2 = 1; keep rounding from leaving [0, 1]
    f_max = min(1.0, (8.0 * g + 3.0 + root) / den)
    f_min = (8.0 * g + 3.0 - root) / den
    return FixpointReport(0.25, f_min, f_max, purification_possible=root > 0.0)


# ---------------------------------------------------------- schemes B and C


def scheme_b_step(s: BellDiagonalState, noise: NoiseParams) -> tuple[BellDiagonalState, float]:
    unnorm, p = bilateral_map(s, s, noise, rotate=True)
    return _normalize(unnorm, p), p


def scheme_c_step(
    target: BellDiagonalState, aux: BellDiagonalState, noise: NoiseParams
) -> tuple[BellDiagonalState, float]:
    unnorm, p = bilateral_map(target, aux, noise, rotate=True)
    return _normalize(unnorm, p), p


def werner_pair_step(f: float, f_aux: float, noise: NoiseParams) -> tuple[float, float]:
    """Scheme A's twirled step with unequal input fidelities.

    This is scheme C run with depolarization after every step.
    """
    unnorm, p = bilateral_map(make_werner(f), make_werner(f_aux), noise, rotate=False)
    return _normalize(unnorm, p).a, p


def _step(scheme: str, s: BellDiagonalState, aux: BellDiagonalState | None, noise: NoiseParams):
    if scheme == "A":
        f, p = scheme_a_step(s.a, noise)
        return make_werner(f), p
    if scheme == "B":
        return scheme_b_step(s, noise)
    if scheme == "C":
        return scheme_c_step(s, aux, noise)
    raise ValueError(f"unknown scheme {scheme!r}")


def _check_aux(scheme: str, aux) -> None:
    if scheme not in ("A", "B", "C"):
        raise ValueError(f"unknown scheme {scheme!r}")
    if (scheme == "C") != (aux is not None):
        raise ValueError("aux pair is required for scheme C and only for scheme C")


def iterate_to_fixpoint(
    scheme: str,
    start: BellDiagonalState,
    aux: BellDiagonalState | None,
    noise: NoiseParams,
    tol: float = FIX_TOL,
    max_iter: int = MAX_ITER,
) -> tuple[BellDiagonalState, int]:
    """Iterate a step map until it settles; returns the attractor and step count.

    Scheme A is checked on the fidelity alone, B and C on the full vector.
    """
    _check_aux(scheme, aux)
    s = twirl(start) if scheme == "A" else start
    for n in range(1, max_iter + 1):
        nxt, _ = _step(scheme, s, aux, noise)
        delta = np.max(np.abs(nxt.as_array() - s.as_array()))
        s = nxt
        if delta < tol:
            return s, n
    raise NonConvergence(f"scheme {scheme} did not settle after {max_iter} steps")


def scheme_c_fixpoint(aux: BellDiagonalState, noise: NoiseParams) -> BellDiagonalState:
    """Reachable state of scheme C when target and auxiliary start equal."""
    return iterate_to_fixpoint("C", aux, aux, noise)[0]


def scheme_b_fixpoints(noise: NoiseParams) -> FixpointReport:
    """Upper attractor of scheme B and the Werner-start threshold.

    The upper fixpoint is reached from Phi+. The threshold is the smallest
    Werner fidelity that still flows to it (bisection).
    """
    top, _ = iterate_to_fixpoint("B", BellDiagonalState(1.0, 0.0, 0.0, 0.0), None, noise)
    if top.a < 0.25 + 1e-6:
        return FixpointReport()
    f_max = top.a

    def flows_up(f0: float) -> bool:
        s = make_werner(f0)
        for _ in range(MAX_ITER):
            s, _ = scheme_b_step(s, noise)
            if s.a > f_max - 1e-3:
                return True
            if s.a < 0.25 + 1e-3:
                return False
        return s.a > 0.5 * (0.25 + f_max)

    lo, hi = 0.25, f_max
    if not flows_up(hi - 1e-9):
        return FixpointReport(0.25, None, f_max, purification_possible=False)
    for _ in range(60):
        m = 0.5 * (lo + hi)
        if flows_up(m):
            hi = m
        else:
            lo = m
        if hi - lo < 1e-12:
            break
    return FixpointReport(0.25, hi, f_max, purification_possible=hi < f_max)


# ---------------------------------------------------------------- resources


def _trajectory_to(scheme, start, aux, f_target, noise, max_steps=MAX_ITER):
    s = twirl(start) if scheme == "A" else start
    states, probs = [s], []
    while s.a < f_target:
        if len(probs) >= max_steps:
            raise TargetUnreachable(f"target {f_target} not reached in {max_steps} steps")
        nxt, p = _step(scheme, s, aux, noise)
        if np.max(np.abs(nxt.as_array() - s.as_array())) < 1e-14:
            raise TargetUnreachable(f"stalled at fidelity {s.a:.12f} < {f_target}")
        s = nxt
        states.append(s)
        probs.append(p)
    return states, probs


def resources_ab(
    scheme: str, start: BellDiagonalState, f_target: float, noise: NoiseParams
) -> ResourceReport:
    """Steps and expected pairs (product of 2/p_even) to reach ``f_target``."""
    if scheme not in ("A", "B"):
        raise ValueError(f"resources_ab handles schemes A and B, got {scheme!r}")
    if scheme == "A" and start.a < f_target:
        fp = scheme_a_fixpoints(noise)
        if not fp.purification_possible or start.a <= fp.f_min or f_target >= fp.f_max:
            raise TargetUnreachable(
                f"scheme A cannot take {start.a:.6f} to {f_target} (interval {fp.f_min}, {fp.f_max})"
            )
    states, probs = _trajectory_to(scheme, start, None, f_target, noise)
    m = 1.0
    for p in probs:
        m *= 2.0 / p
    k = len(probs)
    return ResourceReport(k, m, float(k), tuple(probs), states[-1], tuple(states))


def sequential_costs(p_even) -> tuple[float, float]:
    """Expected pair creations M and steps S when a failure restarts from scratch."""
    m, s = 1.0, 0.0
    for p in p_even:
        m = (m + 1.0) / p
        s = (s + 1.0) / p
    return m, s


def resources_c(aux: BellDiagonalState, f_target: float, noise: NoiseParams) -> ResourceReport:
    """Scheme C cost: target and aux start as ``aux``; aux is re-created each step."""
    states, probs = _trajectory_to("C", aux, aux, f_target, noise)
    m, s = sequential_costs(probs)
    return ResourceReport(len(probs), m, s, tuple(probs), states[-1], tuple(states))
