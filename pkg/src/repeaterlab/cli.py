"""
Command-line front end. Every subcommand writes plot-ready CSV.

With ``--out PATH`` a sidecar ``PATH.meta`` records the full resolved
configuration; ``--config PATH.meta`` replays it bit-identically.

Exit codes: 0 success, 1 invalid configuration, 2 infeasible loop.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import math
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .bell import epsilon_state, make_werner
from .connection import connect_chain_werner
from .noise import NoiseParams
from .purification import (
    NonConvergence,
    TargetUnreachable,
    iterate_to_fixpoint,
    resources_ab,
    resources_c,
    scheme_a_fixpoints,
    scheme_a_step,
    scheme_b_fixpoints,
    scheme_b_step,
)
from .repeater import LoopFailure, RepeaterConfig, build_time, check_loop, run_nested
from .repeater import _connect_group
from .timing import TimingParams

SEED_ENV = "REPEATERLAB_SEED"
COMMANDS = ("fixpoints", "converge", "shape", "loop", "resources", "repeater", "table")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str = "repeater"
    scheme: str = "B"
    p1: float = 1.0
    p2: float = 1.0
    eta: float = 1.0
    errors: float | None = None
    segments: int | None = None
    group: int = 2
    levels: int | None = None
    working_fidelity: float = 0.96
    eps: float = 1.0
    f0: float = 0.7
    tau_op: float = 1e-5
    l_segment: float = 10.0
    l0: float = 10.0
    c: float = 3e5
    runs: int = 300
    seed: int = 0
    pool: int = 4096
    p: str = "0.95..1.0"
    f: str = "0.6..0.99"
    steps: int = 50
    tie_eta: bool = False
    error_levels: str = "0,0.0025,0.005,0.0075,0.01"
    out: str | None = None

    def noise(self) -> NoiseParams:
        if self.errors is not None:
            return NoiseParams.from_error(self.errors)
        return NoiseParams(self.p1, self.p2, self.eta)

    def timing(self) -> TimingParams:
        return TimingParams(self.tau_op, self.l_segment, self.l0, self.c)

    def to_text(self) -> str:
        lines = ["# repeaterlab run metadata"]
        for fd in fields(self):
            lines.append(f"{fd.name} = {_fmt(getattr(self, fd.name))}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        return cls(**parse_config_text(text))


# per-command defaults layered under the config file and flags
COMMAND_DEFAULTS = {
    "fixpoints": {"scheme": "A", "p": "0.95..1.0", "steps": 50},
    "converge": {"errors": 0.01, "f0": 0.7, "steps": 12},
    "shape": {"scheme": "C", "f0": 0.7, "steps": 30},
    "loop": {"scheme": "A", "p2": 0.97, "group": 3, "f": "0.6..0.99", "steps": 40},
    "resources": {"scheme": "B", "f": "0.90..0.99", "steps": 37},
    "repeater": {"scheme": "B", "errors": 0.005},
    "table": {"errors": 0.005, "working_fidelity": 0.96},
}

_FIELD_TYPES = {
    "command": str, "scheme": str, "p1": float, "p2": float, "eta": float, "errors": float,
    "segments": int, "group": int, "levels": int, "working_fidelity": float, "eps": float,
    "f0": float, "tau_op": float, "l_segment": float, "l0": float, "c": float, "runs": int,
    "seed": int, "pool": int, "p": str, "f": str, "steps": int, "tie_eta": bool,
    "error_levels": str, "out": str,
}


def _fmt(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    if raw == "none":
        return None
    kind = _FIELD_TYPES[key]
    if kind is bool:
        if raw not in ("true", "false"):
            raise ConfigError(f"{key}: expected true/false, got {raw!r}")
        return raw == "true"
    try:
        return kind(raw)
    except ValueError as exc:
        raise ConfigError(f"{key}: cannot parse {raw!r}") from exc


def parse_config_text(text: str) -> dict:
    values = {}
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key.startswith("result."):
            continue  # outputs recorded in a sidecar, not inputs
        key = key.replace("-", "_")
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {n}: unknown key {key!r}")
        values[key] = _parse_value(key, raw)
    return values


def parse_range(spec: str) -> tuple[float, float]:
    try:
        lo, hi = (float(x) for x in spec.split(".."))
    except ValueError as exc:
        raise ConfigError(f"range must look like 'lo..hi', got {spec!r}") from exc
    if not lo <= hi:
        raise ConfigError(f"empty range {spec!r}")
    return lo, hi


def grid(spec: str, steps: int) -> np.ndarray:
    lo, hi = parse_range(spec)
    if steps < 1:
        raise ConfigError("steps must be >= 1")
    return np.linspace(lo, hi, steps + 1)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else _fmt(v) for v in row])
    return buf.getvalue()


# ------------------------------------------------------------------ commands


def _fixpoint_row(scheme: str, cfg: ExperimentConfig, noise: NoiseParams):
    if scheme == "A":
        fp = scheme_a_fixpoints(noise)
    elif scheme == "B":
        fp = scheme_b_fixpoints(noise)
    else:
        aux = epsilon_state(cfg.working_fidelity, cfg.eps)
        try:
            top = iterate_to_fixpoint("C", aux, aux, noise)[0].a
        except NonConvergence:
            top = None
        return aux.a, top
    return fp.f_min, fp.f_max


def cmd_fixpoints(cfg: ExperimentConfig):
    """f_min / f_max against p2 (eta fixed, or tied to p2 with --tie-eta)."""
    rows = []
    for p in grid(cfg.p, cfg.steps):
        eta = p if cfg.tie_eta else cfg.eta
        rows.append((float(p), *_fixpoint_row(cfg.scheme, cfg, NoiseParams(cfg.p1, p, eta))))
    if cfg.scheme == "A" and not cfg.tie_eta:
        # breakdown point where the interval closes
        p_star = _scheme_a_threshold(cfg.eta)
        if p_star is not None:
            fp = scheme_a_fixpoints(NoiseParams(cfg.p1, p_star, cfg.eta))
            rows.append((p_star, fp.f_min, fp.f_max))
            rows.sort(key=lambda r: r[0])
    return ("p", "f_min", "f_max"), rows


def _scheme_a_threshold(eta: float) -> float | None:
    # discriminant of the fixpoint formula is linear in 1/p2^2
    g = eta * (eta - 1.0)
    const = 10.0 + 64 * eta**4 - 128 * eta**3 + 116 * eta**2 - 52 * eta
    coeff = 9.0 + 36.0 * g
    if const <= 0 or coeff <= 0:
        return None
    p = math.sqrt(coeff / const)
    return p if p <= 1.0 else None


def cmd_converge(cfg: ExperimentConfig):
    noise = cfg.noise()
    rows = []
    fa = cfg.f0
    sb = make_werner(cfg.f0)
    rows.append((0, "A", fa))
    rows.append((0, "B", sb.a))
    for k in range(1, cfg.steps + 1):
        fa, _ = scheme_a_step(fa, noise)
        sb, _ = scheme_b_step(sb, noise)
        rows.append((k, "A", fa))
        rows.append((k, "B", sb.a))
    return ("step", "scheme", "fidelity"), rows


def cmd_shape(cfg: ExperimentConfig):
    noise = cfg.noise()
    rows = []
    for eps in grid("0..1", cfg.steps):
        aux = epsilon_state(cfg.f0, float(eps))
        try:
            top = iterate_to_fixpoint("C", aux, aux, noise)[0].a
        except NonConvergence:
            top = None
        rows.append((float(eps), top))
    return ("eps", "fixpoint"), rows


def cmd_loop(cfg: ExperimentConfig):
    noise = cfg.noise()
    rows = []
    for F in grid(cfg.f, cfg.steps):
        F = float(F)
        d = check_loop(F, cfg.group, cfg.scheme, noise, cfg.eps)
        f_pur = scheme_a_step(F, noise)[0] if cfg.scheme == "A" else None
        rows.append((F, d.f_connected, f_pur, d.f_min, d.f_max, d.feasible, d.max_group_size))
    return ("F", "F_L", "F_purified", "f_min", "f_max", "feasible", "max_L"), rows


def _error_levels(spec: str) -> list[float]:
    try:
        return [float(x) for x in spec.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad error level list {spec!r}") from exc


def loop_resources(scheme: str, F: float, group: int, noise: NoiseParams, eps: float):
    """k_max and M of a single connect-purify loop at working fidelity F."""
    if scheme == "A":
        start = make_werner(F)
    else:
        start = epsilon_state(F, eps)
    connected = _connect_group(start, group, noise)
    if scheme == "C":
        res = resources_c(connected, F, noise)
    else:
        res = resources_ab(scheme, connected, F, noise)
    return res.k_max, res.m


def cmd_resources(cfg: ExperimentConfig):
    rows = []
    for x in _error_levels(cfg.error_levels):
        noise = NoiseParams.from_error(x)
        for F in grid(cfg.f, cfg.steps):
            F = float(F)
            try:
                k, m = loop_resources(cfg.scheme, F, cfg.group, noise, cfg.eps)
            except (TargetUnreachable, ValueError):
                k, m = None, None
            rows.append((x, F, k, m))
    return ("errors", "F", "k_max", "M"), rows


def _repeater_config(cfg: ExperimentConfig) -> RepeaterConfig:
    segments = cfg.segments
    if segments is None:
        segments = cfg.group ** (cfg.levels if cfg.levels is not None else 7)
    rc = RepeaterConfig(segments, cfg.group, cfg.scheme, cfg.working_fidelity, cfg.eps,
                        cfg.noise(), cfg.timing())
    if cfg.levels is not None and rc.nesting_levels != cfg.levels:
        raise ConfigError(f"{segments} segments with group {cfg.group} is not {cfg.levels} levels")
    return rc


def cmd_repeater(cfg: ExperimentConfig):
    report = run_nested(_repeater_config(cfg))
    t = build_time(report, runs=cfg.runs, seed=cfg.seed, pool_size=cfg.pool)
    rows = [(lv.level, lv.f_connected, lv.f_purified, lv.k_max, lv.m, lv.s) for lv in report.per_level]
    summary = {
        "nesting_levels": report.config.nesting_levels,
        "total_resources": report.total_resources,
        "physical_per_segment": report.physical_per_segment,
        "final_fidelity": report.final_state.a,
        "time_mean": t.mean_total,
        "time_std": t.std_total,
    }
    return ("level", "f_connected", "f_purified", "k_max", "M", "S"), rows, summary


def cmd_table(cfg: ExperimentConfig):
    rows = []
    for scheme in ("A", "B", "C"):
        for scale, n in (("continental", 7), ("intercontinental", 10)):
            sub = dataclasses.replace(cfg, scheme=scheme, segments=cfg.group**n, levels=None)
            report = run_nested(_repeater_config(sub))
            t = build_time(report, runs=cfg.runs, seed=cfg.seed, pool_size=cfg.pool)
            rows.append((scheme, scale, cfg.group**n, report.physical_per_segment, t.mean_total, t.std_total))
    return ("scheme", "scale", "N", "resources", "time", "time_std"), rows


HANDLERS = {
    "fixpoints": cmd_fixpoints,
    "converge": cmd_converge,
    "shape": cmd_shape,
    "loop": cmd_loop,
    "resources": cmd_resources,
    "repeater": cmd_repeater,
    "table": cmd_table,
}


# --------------------------------------------------------------------- argv


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _add_common(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    p.add_argument("--config", default=None, help="key = value file (e.g. a .meta sidecar)")
    p.add_argument("--scheme", choices=["A", "B", "C"], default=S)
    p.add_argument("--p1", type=float, default=S)
    p.add_argument("--p2", type=float, default=S)
    p.add_argument("--eta", type=float, default=S)
    p.add_argument("--errors", type=float, default=S, help="sets p1 = p2 = eta = 1 - x")
    p.add_argument("--segments", type=int, default=S)
    p.add_argument("--group", type=int, default=S)
    p.add_argument("--levels", type=int, default=S)
    p.add_argument("--working-fidelity", dest="working_fidelity", type=float, default=S)
    p.add_argument("--eps", type=float, default=S)
    p.add_argument("--f0", type=float, default=S)
    p.add_argument("--tau-op", dest="tau_op", type=float, default=S)
    p.add_argument("--l-segment", dest="l_segment", type=float, default=S)
    p.add_argument("--l0", type=float, default=S)
    p.add_argument("--c", type=float, default=S)
    p.add_argument("--runs", type=int, default=S)
    p.add_argument("--seed", type=int, default=S)
    p.add_argument("--pool", type=int, default=S)
    p.add_argument("--p", default=S, help="scan range lo..hi for p2")
    p.add_argument("--f", default=S, help="scan range lo..hi for the working fidelity")
    p.add_argument("--steps", type=int, default=S)
    p.add_argument("--tie-eta", dest="tie_eta", action="store_true", default=S)
    p.add_argument("--error-levels", dest="error_levels", default=S)
    p.add_argument("--out", default=S)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="repeaterlab", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        _add_common(sub.add_parser(name))
    return parser


def resolve_config(argv) -> ExperimentConfig:
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    values = dict(COMMAND_DEFAULTS[command])
    config_path = args.pop("config", None)
    if config_path is not None:
        try:
            text = Path(config_path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
        from_file = parse_config_text(text)
        from_file.pop("out", None)
        if from_file.get("command", command) != command:
            raise ConfigError(f"config is for {from_file['command']!r}, not {command!r}")
        values.update(from_file)
    # explicit gate parameters switch off a defaulted uniform error level
    if any(k in args for k in ("p1", "p2", "eta")) and "errors" not in args:
        values["errors"] = None
    values.update(args)
    values["command"] = command
    env_seed = os.environ.get(SEED_ENV)
    if env_seed is not None:
        try:
            values["seed"] = int(env_seed)
        except ValueError as exc:
            raise ConfigError(f"{SEED_ENV} must be an integer") from exc
    return ExperimentConfig(**values)


def run_experiment(argv=None) -> int:
    try:
        cfg = resolve_config(argv)
        result = HANDLERS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"repeaterlab: error: {exc}", file=sys.stderr)
        return 1
    except (LoopFailure, TargetUnreachable) as exc:
        print(f"repeaterlab: infeasible: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"repeaterlab: error: {exc}", file=sys.stderr)
        return 1
    header, rows, *rest = result
    text = _csv_text(header, rows)
    meta = cfg.to_text()
    if rest:
        meta += "".join(f"result.{k} = {_fmt(v)}\n" for k, v in rest[0].items())
        for k, v in rest[0].items():
            print(f"# {k} = {_fmt(v)}", file=sys.stderr)
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        out = Path(cfg.out)
        out.write_text(text, newline="\n")
        Path(str(out) + ".meta").write_text(meta)
    return 0


def main() -> None:
    sys.exit(run_experiment())
