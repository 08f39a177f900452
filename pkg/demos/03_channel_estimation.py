"""Compare the channel estimators on one high-mobility frame.

The conventional Wiener filter assumes isotropic scattering: a Jakes time
correlation driven by the maximum Doppler only.  In the two-tap scenario
the true correlation is a two-phasor mixture parameterized by the per-tap
offsets, and feeding the filter that model (with estimated offsets) is
what buys the accuracy.

The script prints both correlation functions side by side and then the
per-estimator MSE/BER on Monte Carlo frames at the benchmark position.

Run:  python demos/03_channel_estimation.py
"""

import numpy as np

from hsrlink import default_config, find_p3db, run_drop, tap_dfos_at, tap_powers_at
from hsrlink.chanest import (
    corr_time_hsr,
    corr_time_legacy,
    hsr_correlation_model,
    legacy_correlation_model,
)
from hsrlink.channel import max_dfo

config = default_config()
geometry, grid = config.geometry, config.grid
x = find_p3db(geometry)
dfos = tap_dfos_at(x, geometry)
powers = tap_powers_at(x, geometry)

hsr = hsr_correlation_model(powers, config.tap_delays, dfos, grid)
legacy = legacy_correlation_model(powers, config.tap_delays, max_dfo(geometry), grid)

print(f"symbol-lag correlation at x = {x:.1f} m (normalized):")
print(" lag   two-tap model          isotropic (Jakes)")
r0 = corr_time_hsr(0, hsr).real
for lag in range(8):
    r_hsr = corr_time_hsr(lag, hsr) / r0
    r_leg = corr_time_legacy(lag, legacy)
    print(f"  {lag:2d}   {r_hsr.real:+.3f}{r_hsr.imag:+.3f}j   {r_leg:+18.3f}")
print("(by lag 7 the Jakes model says 'decorrelated' while the true channel")
print(" is strongly anti-correlated: that mismatch is the legacy filter's loss)")

print()
print("Monte Carlo over 50 frames at 30 dB SNR:")
acc = {name: {"mse": [], "ber": []} for name in config.estimators}
for d in range(50):
    drop = run_drop(config, 30.0, x, (11, 30.0, x, d))
    for name in config.estimators:
        acc[name]["mse"].append(drop["estimators"][name]["mse"])
        acc[name]["ber"].append(drop["estimators"][name]["ber"])
print(f"{'estimator':20s} {'MSE':>10s} {'BER':>10s}")
for name in config.estimators:
    mse_db = 10 * np.log10(np.mean(acc[name]["mse"]))
    ber = np.mean(acc[name]["ber"])
    print(f"{name:20s} {mse_db:8.2f} dB {ber:10.4f}")
