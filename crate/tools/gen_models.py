#!/usr/bin/env python3
"""Generate the shipped model files.

The four screening models mirror published system dimensions (states, modes,
expansion order, grid) but their coupling values are synthesized placeholders:
three strongly coupled modes plus a weak background, scaled per model so the
empirical step extrapolation lands near published Toffoli totals. The toy
models (rabi, displaced) are exact constructions used by tests and examples.
"""

import json
import random
import sys
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "crates" / "vibronic" / "models"

PLACEHOLDER_NOTE = (
    "Synthesized placeholder parameters: only the dimensions (states, modes, "
    "max_degree) mirror the published system; coupling values are NOT the "
    "physical ones."
)


def freq(rng, lo=0.02, hi=0.25):
    return round(rng.uniform(lo, hi), 6)


def lvc_model(name, n_states, n_modes, seed, diag_scale, offdiag_scale, strong=3,
              freq_lo=0.02, freq_hi=0.25):
    rng = random.Random(seed)
    modes = [freq(rng, freq_lo, freq_hi) for _ in range(n_modes)]
    couplings = []
    # Vertical energies on the diagonal.
    for j in range(n_states):
        couplings.append({"bra": j, "ket": j, "powers": [], "value": round(0.5 * j + 0.1, 6)})
    # Linear intrastate couplings: a few strong modes, weak background.
    for j in range(n_states):
        for r in range(n_modes):
            s = diag_scale if r < strong else diag_scale * 0.15
            v = round(rng.uniform(0.4, 1.0) * s * (-1 if rng.random() < 0.5 else 1), 8)
            couplings.append({"bra": j, "ket": j, "powers": [[r, 1]], "value": v})
    # Constant interstate couplings.
    for j in range(n_states):
        for i in range(j + 1, n_states):
            v = round(rng.uniform(0.5, 1.0) * offdiag_scale, 8)
            couplings.append({"bra": j, "ket": i, "powers": [], "value": v})
    return {
        "name": name,
        "description": PLACEHOLDER_NOTE,
        "states": n_states,
        "modes": modes,
        "unit": "eV",
        "max_degree": 1,
        "couplings": couplings,
    }


def qvc_model(name, n_states, n_modes, seed, diag_scale, offdiag_scale, quad_scale, strong=3,
              freq_lo=0.02, freq_hi=0.25):
    rng = random.Random(seed)
    modes = [freq(rng, freq_lo, freq_hi) for _ in range(n_modes)]
    couplings = []
    for j in range(n_states):
        couplings.append({"bra": j, "ket": j, "powers": [], "value": round(0.4 * j + 0.1, 6)})
    for j in range(n_states):
        for r in range(n_modes):
            s = diag_scale if r < strong else diag_scale * 0.15
            v = round(rng.uniform(0.4, 1.0) * s * (-1 if rng.random() < 0.5 else 1), 8)
            couplings.append({"bra": j, "ket": j, "powers": [[r, 1]], "value": v})
        for r in range(n_modes):
            s = quad_scale if r < strong else quad_scale * 0.15
            v = round(rng.uniform(0.3, 1.0) * s * (-1 if rng.random() < 0.5 else 1), 8)
            couplings.append({"bra": j, "ket": j, "powers": [[r, 2]], "value": v})
        for r in range(n_modes - 1):
            s = quad_scale if r < strong else quad_scale * 0.15
            v = round(rng.uniform(0.3, 1.0) * s * (-1 if rng.random() < 0.5 else 1), 8)
            couplings.append({"bra": j, "ket": j, "powers": [[r, 1], [r + 1, 1]], "value": v})
    for j in range(n_states):
        for i in range(j + 1, n_states):
            v = round(rng.uniform(0.5, 1.0) * offdiag_scale, 8)
            couplings.append({"bra": j, "ket": i, "powers": [], "value": v})
            for r in range(n_modes):
                s = offdiag_scale if r < strong else offdiag_scale * 0.15
                vv = round(rng.uniform(0.3, 1.0) * s * 0.5 * (-1 if rng.random() < 0.5 else 1), 8)
                couplings.append({"bra": j, "ket": i, "powers": [[r, 1]], "value": vv})
    return {
        "name": name,
        "description": PLACEHOLDER_NOTE,
        "states": n_states,
        "modes": modes,
        "unit": "eV",
        "max_degree": 2,
        "couplings": couplings,
    }


def rabi_model():
    return {
        "name": "rabi",
        "description": "Two states, constant interstate coupling: p1(t) = sin^2(lambda*t).",
        "states": 2,
        "modes": [0.2],
        "unit": "eV",
        "max_degree": 0,
        "couplings": [
            {"bra": 0, "ket": 1, "powers": [], "value": 0.05},
        ],
        "dipole": [[0.0, 1.0], [1.0, 0.0]],
    }


def displaced_model():
    # Ground block harmonic; excited block vertically offset and linearly
    # displaced. With dipole X the autocorrelation shows a vibronic
    # progression spaced by the mode frequency.
    return {
        "name": "displaced",
        "description": "Displaced-oscillator absorption toy: peak spacing equals the mode frequency.",
        "states": 2,
        "modes": [0.15],
        "unit": "eV",
        "max_degree": 1,
        "couplings": [
            {"bra": 1, "ket": 1, "powers": [], "value": 2.0},
            {"bra": 1, "ket": 1, "powers": [[0, 1]], "value": 0.12},
        ],
        "dipole": [[0.0, 1.0], [1.0, 0.0]],
    }


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    scales = json.loads(sys.argv[1]) if len(sys.argv) > 1 else {}

    def s(name, default):
        return scales.get(name, default)

    models = {
        "rabi.json": rabi_model(),
        "displaced.json": displaced_model(),
        "anth_c60_m11.json": lvc_model(
            "anth_c60_m11", 4, 11, 1101,
            diag_scale=s("m11_diag", 0.0075), offdiag_scale=s("m11_off", 0.00225),
            freq_lo=s("m11_freq_lo", 0.01), freq_hi=s("m11_freq_hi", 0.12),
        ),
        "anth_c60_m246.json": lvc_model(
            "anth_c60_m246", 4, 246, 1246,
            diag_scale=s("m246_diag", 0.016), offdiag_scale=s("m246_off", 0.005),
        ),
        "no4_anth.json": qvc_model(
            "no4_anth", 5, 19, 1519,
            diag_scale=s("anth_diag", 0.054), offdiag_scale=s("anth_off", 0.0169),
            quad_scale=s("anth_quad", 0.0068),
        ),
        "no4_anth_dimer.json": qvc_model(
            "no4_anth_dimer", 6, 21, 1621,
            diag_scale=s("dimer_diag", 0.0048), offdiag_scale=s("dimer_off", 0.0016),
            quad_scale=s("dimer_quad", 0.00064),
            freq_lo=s("dimer_freq_lo", 0.008), freq_hi=s("dimer_freq_hi", 0.06),
        ),
    }
    for fname, doc in models.items():
        path = OUT / fname
        path.write_text(json.dumps(doc, indent=1) + "\n")
        print(f"wrote {path} ({len(doc['couplings'])} couplings)")


if __name__ == "__main__":
    main()
