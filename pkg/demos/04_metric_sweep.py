"""Produce the benchmark CSV files the figure frontend consumes.

Runs two desk-scale sweeps -- SNR curves at the 3 dB power-difference
position and a throughput-vs-position sweep -- and writes both CSVs into
results/.  The same artifacts come from the CLI:

    hsrlink simulate --out results/snr_sweep.csv --drops 200
    hsrlink simulate --out results/tp_vs_position.csv --position sweep \
        --snr 20:20:1 --drops 50

Figures are rendered from the CSVs by the TypeScript frontend:

    cd frontend && npm run plots -- --in ../results/snr_sweep.csv \
        --fig mse --out ../results/fig_mse.svg

Run:  python demos/04_metric_sweep.py          (~2 minutes)
"""

import dataclasses
import pathlib
import time

from hsrlink import default_config, sweep, write_csv

out_dir = pathlib.Path(__file__).resolve().parent.parent / "results"
out_dir.mkdir(exist_ok=True)

config = default_config(
    drops=200, snr_db=(0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0)
)
t0 = time.time()
records = sweep(config)
write_csv(records, out_dir / "snr_sweep.csv")
print(f"snr_sweep.csv: {len(records)} records in {time.time() - t0:.0f} s")

position_config = dataclasses.replace(
    config, snr_db=(20.0,), position="sweep", sweep_points=13, drops=50
)
t0 = time.time()
records = sweep(position_config)
write_csv(records, out_dir / "tp_vs_position.csv")
print(f"tp_vs_position.csv: {len(records)} records in {time.time() - t0:.0f} s")

print()
print("render the four figure kinds with the frontend, e.g.:")
print("  node frontend/dist/cli.js --in results/snr_sweep.csv --fig dfo_err "
      "--out results/fig_dfo_err.svg")
