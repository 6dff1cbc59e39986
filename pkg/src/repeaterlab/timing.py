"""
Build-up time of the nested protocol.

Level ``m`` joins pairs spanning ``(2^l)^(m-1)`` elementary segments, so a
connection round needs classical messages across ``(2^l - 1) * (2^l)^(m-1)``
segments and a purification step across ``2^l * (2^l)^(m-1)``.

Schemes A and B run the purification tree in parallel, so only successful
steps cost time. Scheme C builds each auxiliary pair sequentially and restarts
after a failed step; its time is sampled by Monte Carlo.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_POOL = 4096


@dataclass(frozen=True)
class TimingParams:
    tau_op: float = 1e-5
    l_segment: float = 10.0
    l0: float = 10.0
    c: float = 3e5
    tau_class: float | None = None

    def __post_init__(self):
        if self.tau_class is None:
            object.__setattr__(self, "tau_class", self.l_segment / self.c)
        for name in ("tau_op", "l_segment", "l0", "c", "tau_class"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class TimeReport:
    mean_total: float
    std_total: float
    runs: int
    per_level_breakdown: tuple[float, ...] = ()
    samples: np.ndarray | None = field(default=None, repr=False, compare=False)


def tau_pair_afc(p: TimingParams) -> float:
    """Expected time for one elementary pair over an absorbing fiber segment."""
    return (5.0 * p.tau_op + 2.0 * p.tau_class) * math.exp(p.l_segment / p.l0)


def classical_time(distance_km: float, c: float = 3e5) -> float:
    return distance_km / c


def log2_group(group_size: int) -> int:
    l = group_size.bit_length() - 1
    if group_size < 2 or 2**l != group_size:
        raise ValueError(f"group size must be a power of two >= 2, got {group_size}")
    return l


def _span(group_size: int, level: int) -> int:
    return group_size ** (level - 1)


def loop_time_ab(group_size: int, level: int, k_max: int, p: TimingParams) -> float:
    l = log2_group(group_size)
    f = _span(group_size, level)
    connect = 3 * l * p.tau_op + f * (group_size - 1) * p.tau_class
    return connect + k_max * (3 * p.tau_op + f * group_size * p.tau_class)


def total_time_ab(group_size: int, k_max_per_level, p: TimingParams, tau_pair: float | None = None) -> float:
    """Total build-up time for schemes A and B, level by level."""
    t = tau_pair_afc(p) if tau_pair is None else tau_pair
    for m, k in enumerate(k_max_per_level, start=1):
        t += loop_time_ab(group_size, m, k, p)
    return t


def total_time_ab_closed(group_size: int, n_levels: int, k_max: int, p: TimingParams) -> float:
    """Closed form of :func:`total_time_ab` for the same ``k_max`` on every level."""
    l = log2_group(group_size)
    L = group_size
    geometric = (L**n_levels - 1) // (L - 1)
    return (
        n_levels * (3 * l + 3 * k_max) * p.tau_op
        + (L - 1 + k_max * L) * geometric * p.tau_class
        + tau_pair_afc(p)
    )


def estimate_time_c(group_size: int, costs_per_level, p: TimingParams) -> float:
    """Time of scheme C using the expected (M, S) per level and no waiting on stragglers."""
    l = log2_group(group_size)
    t = tau_pair_afc(p)
    for m, (pairs, steps) in enumerate(costs_per_level, start=1):
        f = _span(group_size, m)
        build = t + 3 * l * p.tau_op + f * (group_size - 1) * p.tau_class
        t = build * pairs + steps * (3 * p.tau_op + f * group_size * p.tau_class)
    return t


def _sample_level(prev: np.ndarray, group_size: int, level: int, probs, p: TimingParams,
                  count: int, rng: np.random.Generator) -> np.ndarray:
    l = log2_group(group_size)
    f = _span(group_size, level)
    connect = 3 * l * p.tau_op + f * (group_size - 1) * p.tau_class
    step = 3 * p.tau_op + f * group_size * p.tau_class
    k_max = len(probs)
    out = np.empty(count)

    def build() -> float:
        siblings = prev[rng.integers(0, prev.size, size=group_size)]
        return float(siblings.max()) + connect

    for i in range(count):
        t = build()
        k = 0
        while k < k_max:
            t += build() + step
            if rng.random() < probs[k]:
                k += 1
            else:
                k = 0
                t += build()
        out[i] = t
    return out


def simulate_time_c(group_size: int, p_even_per_level, p: TimingParams, runs: int = 300,
                    seed: int = 0, pool_size: int = DEFAULT_POOL) -> TimeReport:
    """Monte Carlo build-up time of scheme C.

    ``p_even_per_level[m-1]`` lists the success probabilities of the
    purification steps on level ``m``. Lower levels are represented by pools
    of ``pool_size`` independent samples and the ``2^l`` siblings of a
    connection are drawn from the pool below. The top level draws ``runs``
    samples. One root seed is split into one stream per level (level ``m``
    uses child ``m - 1``); the top level splits its stream once more per run,
    so each run is reproducible on its own.
    """
    if runs < 1:
        raise ValueError("runs must be >= 1")
    n = len(p_even_per_level)
    t0 = tau_pair_afc(p)
    if n == 0:
        return TimeReport(t0, 0.0, runs, (), np.full(runs, t0))
    log2_group(group_size)
    children = np.random.SeedSequence(seed).spawn(n)
    pool = np.array([t0])
    means = []
    for m, probs in enumerate(p_even_per_level, start=1):
        if m < n:
            rng = np.random.default_rng(children[m - 1])
            pool = _sample_level(pool, group_size, m, probs, p, pool_size, rng)
        else:
            run_seeds = children[m - 1].spawn(runs)
            pool = np.concatenate([
                _sample_level(pool, group_size, m, probs, p, 1, np.random.default_rng(s))
                for s in run_seeds
            ])
        means.append(float(pool.mean()))
    std = float(pool.std(ddof=1)) if runs > 1 else 0.0
    return TimeReport(float(pool.mean()), std, runs, tuple(means), pool)
