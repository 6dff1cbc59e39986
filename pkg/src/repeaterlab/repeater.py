"""
Nested entanglement purification over N = L^n segments.

Every level joins L pairs from the level below and purifies the result back
to the working fidelity. Schemes A and B consume M pairs per loop in
parallel (physical resources M^n per segment); scheme C re-creates its
auxiliary pair sequentially and stores one extra pair per level (1 + n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .bell import BellDiagonalState, epsilon_state, make_werner
from .connection import ConnectionStrategy, connect_chain, connect_chain_werner
from .noise import NoiseParams
from .purification import (
    FixpointReport,
    NonConvergence,
    TargetUnreachable,
    iterate_to_fixpoint,
    resources_ab,
    resources_c,
    scheme_a_fixpoints,
    scheme_b_fixpoints,
)
from .timing import TimeReport, TimingParams, simulate_time_c, total_time_ab

SCHEMES = ("A", "B", "C")
MAX_GROUP_SEARCH = 1024


class LoopFailure(RuntimeError):
    """The connect-purify loop does not close at some nesting level."""


def nesting_levels(n_segments: int, group_size: int) -> int:
    if group_size < 2:
        raise ValueError("group size must be >= 2")
    if n_segments < 1:
        raise ValueError("need at least one segment")
    n, size = 0, 1
    while size < n_segments:
        size *= group_size
        n += 1
    if size != n_segments:
        raise ValueError(f"{n_segments} segments is not a power of group size {group_size}")
    return n


@dataclass(frozen=True)
class RepeaterConfig:
    n_segments: int
    group_size: int = 2
    scheme: str = "B"
    working_fidelity: float = 0.96
    aux_shape: float = 1.0
    noise: NoiseParams = field(default_factory=NoiseParams)
    timing: TimingParams = field(default_factory=TimingParams)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not (0.25 < self.working_fidelity <= 1.0):
            raise ValueError("working fidelity must lie in (1/4, 1]")
        nesting_levels(self.n_segments, self.group_size)

    @property
    def nesting_levels(self) -> int:
        return nesting_levels(self.n_segments, self.group_size)

    def elementary_pair(self) -> BellDiagonalState:
        """Werner pairs for A; the ``aux_shape`` epsilon family for B and C."""
        if self.scheme == "A":
            return make_werner(self.working_fidelity)
        return epsilon_state(self.working_fidelity, self.aux_shape)


@dataclass(frozen=True)
class LevelReport:
    level: int
    f_connected: float
    f_purified: float
    k_max: int
    m: float
    s: float
    p_even: tuple[float, ...]


@dataclass(frozen=True)
class RepeaterReport:
    config: RepeaterConfig
    per_level: tuple[LevelReport, ...]
    total_resources: float
    physical_per_segment: float
    final_state: BellDiagonalState

    @property
    def m_per_level(self) -> list[float]:
        return [lv.m for lv in self.per_level]

    @property
    def k_max_per_level(self) -> list[int]:
        return [lv.k_max for lv in self.per_level]


@dataclass(frozen=True)
class LoopDiagnostics:
    f_connected: float
    f_min: float | None
    f_max: float | None
    feasible: bool
    max_group_size: int | None


def total_resources(group_size: int, m_per_level, n_levels: int) -> float:
    m_per_level = list(m_per_level)
    if len(m_per_level) != n_levels:
        raise ValueError("need one M per nesting level")
    r = 1.0
    for m in m_per_level:
        r *= group_size * m
    return r


def _connect_group(state: BellDiagonalState, group_size: int, noise: NoiseParams) -> BellDiagonalState:
    return connect_chain([state] * group_size, ConnectionStrategy.PARALLEL, noise)[0]


def _loop_closes(F: float, group_size: int, scheme: str, noise: NoiseParams, eps: float):
    """Returns (F_L, f_min, f_max, closes) for one connect-purify cycle."""
    if scheme == "A":
        f_l = connect_chain_werner(F, group_size, noise)
        fp = scheme_a_fixpoints(noise)
        ok = fp.purification_possible and f_l > fp.f_min and F < fp.f_max
        return f_l, fp.f_min, fp.f_max, ok
    if scheme == "B":
        connected = _connect_group(epsilon_state(F, eps), group_size, noise)
        fp: FixpointReport = scheme_b_fixpoints(noise)
        ok = fp.purification_possible and F < fp.f_max
        if ok:
            try:
                resources_ab("B", connected, F, noise)
            except TargetUnreachable:
                ok = False
        return connected.a, fp.f_min, fp.f_max, ok
    connected = _connect_group(epsilon_state(F, eps), group_size, noise)
    try:
        top, _ = iterate_to_fixpoint("C", connected, connected, noise)
        f_max = top.a
    except NonConvergence:
        f_max = None
    # scheme C gains fidelity only if its attractor lies above the aux pair
    ok = f_max is not None and f_max > connected.a and F < f_max
    return connected.a, connected.a, f_max, ok


def check_loop(F: float, group_size: int, scheme: str, noise: NoiseParams, eps: float = 1.0) -> LoopDiagnostics:
    """Whether one connection of ``group_size`` pairs can be purified back to ``F``.

    For scheme C the reported lower bound is the auxiliary fidelity itself.
    """
    f_l, f_min, f_max, ok = _loop_closes(F, group_size, scheme, noise, eps)
    best = None
    L = 2
    while L <= MAX_GROUP_SEARCH and _loop_closes(F, L, scheme, noise, eps)[3]:
        best = L
        L += 1
    return LoopDiagnostics(f_l, f_min, f_max, ok, best)


def run_nested(config: RepeaterConfig) -> RepeaterReport:
    F = config.working_fidelity
    L = config.group_size
    noise = config.noise
    state = config.elementary_pair()
    levels = []
    for level in range(1, config.nesting_levels + 1):
        connected = _connect_group(state, L, noise)
        try:
            if config.scheme == "C":
                res = resources_c(connected, F, noise)
            else:
                res = resources_ab(config.scheme, connected, F, noise)
        except TargetUnreachable as exc:
            raise LoopFailure(f"level {level}: {exc}") from exc
        state = res.final_state
        levels.append(LevelReport(level, connected.a, state.a, res.k_max, res.m, res.s, res.p_even))
    n = config.nesting_levels
    ms = [lv.m for lv in levels]
    r_total = total_resources(L, ms, n)
    if config.scheme == "C":
        physical = float(1 + n)
    else:
        physical = math.prod(ms)
    return RepeaterReport(config, tuple(levels), r_total, physical, state)


def build_time(report: RepeaterReport, runs: int = 300, seed: int = 0, pool_size: int | None = None) -> TimeReport:
    """Total build-up time: closed iteration for A/B, Monte Carlo for C."""
    cfg = report.config
    if cfg.scheme == "C":
        kwargs = {} if pool_size is None else {"pool_size": pool_size}
        return simulate_time_c(cfg.group_size, [lv.p_even for lv in report.per_level], cfg.timing,
                               runs=runs, seed=seed, **kwargs)
    if report.per_level:
        t = total_time_ab(cfg.group_size, report.k_max_per_level, cfg.timing)
    else:
        t = total_time_ab(2, [], cfg.timing)
    return TimeReport(t, 0.0, 1, ())


def polynomial_exponent(group_size: int, m: float) -> float:
    """Exponent of N in the total resources for uniform M."""
    return math.log(m, group_size) + 1.0


__all__ = [
    "LoopDiagnostics",
    "LoopFailure",
    "RepeaterConfig",
    "RepeaterReport",
    "build_time",
    "check_loop",
    "run_nested",
    "total_resources",
]
