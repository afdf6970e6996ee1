#!/usr/bin/env python3
"""Golden tables for the regime diagram, eigenfrequency sweep and chi_m.

    python3 figures.py --write ../golden
    python3 figures.py --check ../golden

Straight from the formulas with mpmath (40 digits), quantities in Hz.
Nothing here calls the C++ code.
"""
import argparse
import csv
import math
import os
import sys

import mpmath as mp

mp.mp.dps = 40

KAPPA = mp.mpf("1.1e6") + mp.mpf("25e3") + mp.mpf("75e3")
OMEGA = mp.mpf("9.696e6")
GAMMA = mp.mpf(31)
G0 = mp.mpf(167)
N_MAX = mp.mpf("525974398.5083725")  # g = 3.83 MHz


def splitting(g, kappa, omega):
    inner = mp.sqrt(mp.mpc(g * g - kappa**2 / 16))
    plus = mp.re(mp.sqrt(omega**2 - kappa**2 / 16 + 2 * omega * inner))
    minus = mp.re(mp.sqrt(omega**2 - kappa**2 / 16 - 2 * omega * inner))
    return plus - minus


def ultrastrong_onset(kappa):
    # Omega = 1; bisection on Omega_s = 1/5 between 4g = k and the instability
    lo = kappa / 4
    hi = mp.sqrt(1 + kappa**2 / 4) / 2
    if hi <= lo or splitting(hi, kappa, 1) < mp.mpf(1) / 5:
        return math.nan
    for _ in range(200):
        mid = (lo + hi) / 2
        if splitting(mid, kappa, 1) < mp.mpf(1) / 5:
            lo = mid
        else:
            hi = mid
    return float((lo + hi) / 2)


def fig1(points=61, lo=mp.mpf("1e-3"), hi=mp.mpf(1)):
    rows = []
    for k in range(points):
        x = mp.e ** (mp.log(lo) + (mp.log(hi) - mp.log(lo)) * k / (points - 1))
        rows.append([float(x), float(x / 4), ultrastrong_onset(x), float(mp.sqrt(1 + x * x / 4) / 2)])
    return ["kappa_over_omega", "strong_g_over_omega", "ultrastrong_g_over_omega",
            "stability_g_over_omega"], rows


def quartic_roots(g, detuning):
    # ((l^2 - W^2 + i G l) / 2W)(l - D + i k/2)(l + D + i k/2) + 2 D g^2
    a = [mp.mpf(1), 1j * GAMMA, -OMEGA**2]                      # l^2 + iG l - W^2
    b = [mp.mpf(1), -detuning + 1j * KAPPA / 2]
    c = [mp.mpf(1), detuning + 1j * KAPPA / 2]

    def mul(p, q):
        out = [mp.mpc(0)] * (len(p) + len(q) - 1)
        for i, x in enumerate(p):
            for j, y in enumerate(q):
                out[i + j] += x * y
        return out

    poly = [x / (2 * OMEGA) for x in mul(mul(a, b), c)]
    poly[-1] += 2 * detuning * g * g
    return mp.polyroots(poly, maxsteps=400, extraprec=200)


def fig3b(points=481, g_max=mp.mpf("4.8e6")):
    rows = []
    for k in range(points):
        g = g_max * k / (points - 1)
        roots = quartic_roots(g, -OMEGA)
        re = sorted((mp.re(r) for r in roots), reverse=True)
        plus, minus = re[0], re[1]
        stable = max(mp.im(r) for r in roots) <= mp.mpf("1e-9") * OMEGA
        approx = 2 * mp.sqrt(g * g - KAPPA**2 / 16) if g > KAPPA / 4 else mp.mpf(0)
        rows.append([float(g), float(plus), float(minus), float(plus - minus), float(approx),
                     "true" if stable else "false"])
    return ["g_hz", "omega_plus_hz", "omega_minus_hz", "splitting_hz", "splitting_approx_hz",
            "stable"], rows


def chi_m(nu, g):
    # drive on the shifted red sideband, D = -W
    chi_x_inv = (nu * nu - OMEGA**2 + 1j * nu * GAMMA) / (2 * OMEGA)
    chi_a_plus = 1 / (nu - OMEGA + 1j * KAPPA / 2)         # chi_a(w_d + nu)
    chi_a_minus_conj = 1 / (-nu - OMEGA - 1j * KAPPA / 2)  # chi_a(w_d - nu)*
    return OMEGA / 2 / (chi_x_inv - g * g * chi_a_plus - g * g * chi_a_minus_conj)


def fig4(points=2001, half=2 * OMEGA):
    g = G0 * mp.sqrt(N_MAX)
    rows = []
    for k in range(points):
        nu = -half + 2 * half * k / (points - 1)
        v = chi_m(nu, g)
        rows.append([float(nu), float(mp.re(v)), float(mp.im(v)), float(abs(v))])
    return ["nu_hz", "re", "im", "abs"], rows


TABLES = {"fig1_boundaries.csv": fig1, "fig3b_eigen.csv": fig3b, "fig4_chi_m.csv": fig4}


def fmt(x):
    return x if isinstance(x, str) else repr(float(x))


def write(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(x) for x in r])


def close(a, b):
    if a in ("true", "false") or b in ("true", "false"):
        return a == b
    x, y = float(a), float(b)
    if math.isnan(x) or math.isnan(y):
        return math.isnan(x) and math.isnan(y)
    return abs(x - y) <= 1e-12 * max(abs(x), abs(y)) + 1e-300


def main():
    ap = argparse.ArgumentParser()
    g = ap.add_mutually_exclusive_group(required=True)
    g.add_argument("--write")
    g.add_argument("--check")
    a = ap.parse_args()
    bad = 0
    for name, fn in TABLES.items():
        header, rows = fn()
        if a.write:
            write(os.path.join(a.write, name), header, rows)
            continue
        with open(os.path.join(a.check, name)) as f:
            frozen = list(csv.reader(f))
        if frozen[0] != header or len(frozen) != len(rows) + 1:
            print(f"{name}: shape differs from oracle")
            bad += 1
            continue
        for i, (fr, r) in enumerate(zip(frozen[1:], rows)):
            if not all(close(x, fmt(y)) for x, y in zip(fr, r)):
                print(f"{name} row {i + 1}: frozen {fr} oracle {[fmt(y) for y in r]}")
                bad += 1
                break
        print(f"{name}: {'ok' if not bad else 'MISMATCH'}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
