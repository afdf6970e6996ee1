#!/usr/bin/env python3
"""Photon numbers at the coupling thresholds of the bundled device, by hand.

    python3 threshold_ladder.py --write ../golden/threshold_ladder.json
    python3 threshold_ladder.py --check ../golden/threshold_ladder.json [--tool optomech --config device.json]

Works in Hz throughout (2 pi cancels in every ratio) with mpmath at 40 digits.
"""
import argparse
import json
import subprocess
import sys

import mpmath as mp

mp.mp.dps = 40

# bundled device
KAPPA = mp.mpf("1.1e6") + mp.mpf("25e3") + mp.mpf("75e3")
OMEGA = mp.mpf("9.696e6")
GAMMA = mp.mpf(31)
G0 = mp.mpf(167)
N_TH = mp.mpf(76)


def split(g):
    # Omega_s from Omega_pm = Re sqrt(W^2 - k^2/16 +- 2 W sqrt(g^2 - k^2/16))
    inner = mp.sqrt(mp.mpc(g * g - KAPPA**2 / 16))
    plus = mp.re(mp.sqrt(OMEGA**2 - KAPPA**2 / 16 + 2 * OMEGA * inner))
    minus = mp.re(mp.sqrt(OMEGA**2 - KAPPA**2 / 16 - 2 * OMEGA * inner))
    return plus - minus


def ladder():
    n_c1 = KAPPA * GAMMA / (4 * G0**2)            # 4 g^2 / (k G) = 1
    n_cq1 = n_c1 * N_TH                            # C / n_th = 1
    n_strong = (KAPPA / 4) ** 2 / G0**2            # 4 g = k
    g_crit = mp.sqrt(OMEGA**2 + KAPPA**2 / 4) / 2  # red sideband threshold
    g_us = mp.findroot(lambda g: split(g) - OMEGA / 5, (KAPPA / 4 * 1.0001, g_crit), solver="anderson")
    return {
        "photon_number_c1": float(n_c1),
        "photon_number_cq1": float(n_cq1),
        "photon_number_strong": float(n_strong),
        "photon_number_ultrastrong": float(g_us**2 / G0**2),
        "photon_number_critical": float(g_crit**2 / G0**2),
        "critical_coupling_hz": float(g_crit),
        "kerr_per_photon_hz": float(-2 * G0**2 / OMEGA),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--write")
    ap.add_argument("--check")
    ap.add_argument("--tool")
    ap.add_argument("--config")
    a = ap.parse_args()
    values = ladder()
    if a.write:
        with open(a.write, "w") as f:
            json.dump(values, f, indent=2, sort_keys=True)
            f.write("\n")
        return 0
    if not a.check:
        json.dump(values, sys.stdout, indent=2, sort_keys=True)
        print()
        return 0
    frozen = json.load(open(a.check))
    bad = 0
    for k, v in values.items():
        if abs(frozen[k] - v) > 1e-12 * abs(v):
            print(f"frozen {k} = {frozen[k]} but oracle gives {v}")
            bad += 1
    if a.tool:
        out = subprocess.run([a.tool, "regime", "--config", a.config], check=True,
                             capture_output=True, text=True).stdout
        report = dict(line.split(": ", 1) for line in out.splitlines() if ": " in line)
        for k in ("photon_number_c1", "photon_number_cq1", "photon_number_strong",
                  "photon_number_ultrastrong", "photon_number_critical", "critical_coupling_hz"):
            got = float(report[k])
            rel = abs(got - values[k]) / abs(values[k])
            ok = rel < 1e-9
            bad += 0 if ok else 1
            print(f"{k}: tool {got!r} oracle {values[k]!r} rel {rel:.2e} {'ok' if ok else 'MISMATCH'}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
