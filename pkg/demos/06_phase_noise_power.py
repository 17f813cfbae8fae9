#!/usr/bin/env python3
"""Oscillator phase-noise versus power, and inverse bias design."""

import os

from gocdr import OscParams, kappa_min, required_iss, sigma_after, tradeoff_curve

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

params = OscParams(i_ss=400e-6, r_l=1000.0, delta_v=0.4, gamma=1.0, eta=1.0,
                   temperature=300.0, n_stages=4, v_dd=1.8)
rate = 2.5e9

print(f"reference stage (400 uA, 1 kOhm, 0.4 V swing): "
      f"kappa = {kappa_min(params):.4e} sqrt(s)")
print(f"jitter after 4.5 bit periods: "
      f"{sigma_after(kappa_min(params), 4.5 / rate) * rate:.5f} UI RMS")

sweep = [50e-6, 100e-6, 200e-6, 400e-6, 800e-6, 1.6e-3, 3.2e-3]
points = tradeoff_curve(params, sweep, data_rate=rate, cid=5, phi=0.5)
print(f"\n{'I_SS [uA]':>10}  {'power [mW]':>10}  {'kappa [sqrt(s)]':>15}  "
      f"{'sigma@CID5 [UI]':>15}")
for p in points:
    print(f"{p.i_ss*1e6:10.0f}  {p.power*1e3:10.3f}  {p.kappa:15.4e}  "
          f"{p.sigma_cid5_ui:15.5f}")

path = os.path.join(OUT, "phase_noise_tradeoff.csv")
with open(path, "w") as fh:
    fh.write("i_ss_a,power_w,kappa_sqrt_s,sigma_cid5_ui\n")
    for p in points:
        fh.write(f"{p.i_ss!r},{p.power!r},{p.kappa!r},{p.sigma_cid5_ui!r}\n")
print(f"\nwrote {path}")

target = 0.01  # UI RMS accumulated over a 5-bit run
i_need = required_iss(params, target, data_rate=rate)
print(f"\nbias meeting {target} UI RMS at CID=5: {i_need*1e6:.1f} uA "
      f"({4 * i_need * params.v_dd * 1e3:.2f} mW for the four-stage ring)")
