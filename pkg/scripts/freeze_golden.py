"""Regenerate tests/data/golden.json from the density-matrix oracle.

The analytic maps are never called here, so the frozen values are an
independent reference for them. Run from the repository root:

    python scripts/freeze_golden.py
"""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import numpy as np

from repeaterlab.bell import epsilon_state, make_werner
from repeaterlab.noise import NoiseParams
from repeaterlab.oracle import oracle_connection, oracle_purification_step

DATA = Path(__file__).resolve().parents[1] / "tests" / "data"


def oracle_fixpoint(target, aux, noise, tol=1e-12, cap=10_000):
    s = target
    for n in range(1, cap + 1):
        nxt, _ = oracle_purification_step(s, aux, "B", noise)
        if np.max(np.abs(nxt.as_array() - s.as_array())) < tol:
            return nxt, n
        s = nxt
    raise RuntimeError("oracle iteration did not settle")


def oracle_costs(aux, f_target, noise):
    s, probs = aux, []
    while s.a < f_target:
        s, p = oracle_purification_step(s, aux, "B", noise)
        probs.append(p)
    m, steps = 1.0, 0.0
    for p in probs:
        m = (m + 1.0) / p
        steps = (steps + 1.0) / p
    return len(probs), m, steps, s


def main() -> None:
    golden = {}

    noise = NoiseParams(1.0, 0.99, 0.99)
    s, p = oracle_purification_step(make_werner(0.7), make_werner(0.7), "B", noise)
    golden["scheme_b_werner07_p099"] = {"state": list(s), "p_even": p}

    noise = NoiseParams(1.0, 0.96, 0.96)
    aux = epsilon_state(0.7, 1.0)
    s, p = oracle_purification_step(aux, aux, "B", noise)
    golden["scheme_c_eps07_p096"] = {"state": list(s), "p_even": p}
    top, n = oracle_fixpoint(aux, aux, noise)
    golden["scheme_c_fixpoint_eps07_p096"] = {"state": list(top), "steps": n}

    noise = NoiseParams(1.0, 0.995, 0.995)
    aux = epsilon_state(0.9, 1.0)
    top, _ = oracle_fixpoint(aux, aux, noise)
    target = top.a - 0.005
    k, m, steps, final = oracle_costs(aux, target, noise)
    golden["resources_c_eps09_p0995"] = {
        "f_target": target, "k_max": k, "m": m, "s": steps, "final_fidelity": final.a,
    }

    noise = NoiseParams(1.0, 0.97, 1.0)
    s, p = oracle_purification_step(make_werner(0.9), make_werner(0.9), "A", noise)
    golden["scheme_a_f09_p097"] = {"fidelity": s.a, "p_even": p}

    noise = NoiseParams(1.0, 0.995, 0.995)
    s = oracle_connection(make_werner(0.96), make_werner(0.96), noise)
    golden["connect_werner096_p0995"] = {"state": list(s)}

    DATA.mkdir(parents=True, exist_ok=True)
    (DATA / "golden.json").write_text(json.dumps(golden, indent=2, sort_keys=True) + "\n")

    # byte-exact CLI output
    csv = subprocess.run(
        [sys.executable, "-m", "repeaterlab", "fixpoints", "--scheme", "A", "--p", "0.95..1.0", "--steps", "10"],
        check=True, capture_output=True, text=True,
    ).stdout
    (DATA / "fixpoints_a.csv").write_text(csv, newline="\n")
    print(json.dumps(golden, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
