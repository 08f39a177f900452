"""Separate the two taps and read their Doppler offsets from pilot phases.

The taps overlap on every subcarrier but differ in delay, so their phase
signatures across the pilot subcarriers differ; a least-squares solve
against the delay basis splits them, and the per-symbol phase progression
of each split component is the tap's Doppler offset.

The script first shows exact recovery from leakage-free observations,
then the behaviour under noise, and finally the multiplication counts
against the exhaustive grid-search baseline.

Run:  python demos/02_dfo_estimation.py
"""

import numpy as np

from hsrlink import default_config, multiplication_count, run_drop
from hsrlink.dfo import build_delay_basis, estimate_dfos, separate_taps
from hsrlink.numerics import dirichlet_kernel

config = default_config()
grid, pilots = config.grid, config.pilots

# --- exact recovery from the separation model --------------------------------
f_true = np.array([600.0, -400.0])
delays = (0.0, 4.0)
gains = np.sqrt([0.6, 0.4]) * np.exp(1j * np.array([0.7, -2.1]))

basis = build_delay_basis(delays, pilots.subcarrier_indices, grid.n_fft)
components = np.empty((2, pilots.n_symbols), dtype=complex)
for q in range(2):
    f_norm = f_true[q] / grid.delta_f
    base = gains[q] / grid.n_fft * dirichlet_kernel(-f_norm, grid.n_fft)
    components[q] = base * np.exp(
        2j * np.pi / grid.n_fft * f_norm
        * np.asarray(pilots.symbol_indices) * (grid.n_fft + grid.cp_len)
    )
h_p = basis.matrix @ components

est = estimate_dfos(separate_taps(h_p, basis), pilots, grid)
print("noiseless recovery:")
print(f"  true: {f_true[0]:+8.3f} Hz, {f_true[1]:+8.3f} Hz")
print(f"  est : {est.f_hat[0]:+8.3f} Hz, {est.f_hat[1]:+8.3f} Hz")
print(f"  alias-free up to {est.alias_bound:.0f} Hz for the shortest pair spacing")

# --- behaviour under noise (end-to-end frames at the benchmark position) -----
print()
print("mean relative error vs SNR (20 frames each, data-bearing grid):")
position = 124.26
for snr in (10.0, 20.0, 30.0, 40.0):
    errs = [
        run_drop(config, snr, position, (7, snr, position, d))["dfo_rel_err"]
        for d in range(20)
    ]
    print(f"  {snr:5.1f} dB: {np.mean(errs):.4e}")
print("(the floor past ~35 dB is inter-carrier leakage from the data symbols)")

# --- complexity ---------------------------------------------------------------
print()
print("multiplications per resource block (m=2 pilot tones, n=4 pilot symbols):")
proposed = multiplication_count("proposed", 2, 4)
es = multiplication_count("es", 2, 4, f_max=900.0, step=2.0)
print(f"  closed-form separation: {proposed}")
print(f"  exhaustive search     : {es}")
print(f"  reduction             : {es / proposed:.1f}x")
