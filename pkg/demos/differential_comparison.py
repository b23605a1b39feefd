"""
Differential clock comparison from end to end
=============================================

Runs the shipped two-ensemble Ramsey comparison (common random laser phase,
shot noise from 500 atoms per ensemble), extracts the differential phase
window by window with the ellipse fit, converts to fractional frequency,
and checks the resulting instability against the quantum projection noise
floor.
"""

import json
import os

import numpy as np

from erasure_sensing import (
    ComparisonConfig,
    allan_deviation,
    crb_floor,
    ellipse_phase_jackknife,
    phase_series_from_cycles,
    phase_series_to_fractional_frequency,
    run_comparison,
    valid_pairs,
)

HERE = os.path.dirname(os.path.abspath(__file__))
CONFIG = os.path.join(HERE, os.pardir, "data", "example_comparison.json")

with open(CONFIG) as fh:
    cfg = ComparisonConfig.from_dict(json.load(fh))
print(f"config: N0 = {cfg.n0}, cycles = {cfg.cycles}, "
      f"phi_d = {cfg.phi_d:.6f}, channel = {cfg.noise.kind.value} q = {cfg.noise.q}")

# simulate and fit one window to see the raw ingredients
results = run_comparison(cfg, threads=4)
pairs = valid_pairs(results)
phi_hat, jk = ellipse_phase_jackknife(pairs[:100])
print(f"first window: phi_d = {phi_hat:.5f} +/- {jk:.5f} "
      f"(true {cfg.phi_d:.5f})")

# phase series -> fractional frequency -> Allan deviation
window = 100
series = phase_series_from_cycles(pairs, window)
y = phase_series_to_fractional_frequency(series - series.mean(), cfg.t_c, cfg.f0)
res = allan_deviation(y, cycle_time=window * cfg.cycle_time)

floor = crb_floor(cfg.n0, cfg.t_c, window * cfg.cycle_time, cfg.f0,
                  differential=True)
print(f"\n{'tau (s)':>9} {'sigma_y':>12} {'error':>11} {'vs floor':>9}")
for tau, sig, err in zip(res.taus, res.sigmas, res.errors):
    scaled_floor = floor * np.sqrt(window * cfg.cycle_time / tau)
    print(f"{tau:9.0f} {sig:12.3e} {err:11.2e} {sig / scaled_floor:9.2f}x")

print(f"\none-window instability {res.sigmas[0]:.3e} vs projection floor "
      f"{floor:.3e} ({res.sigmas[0] / floor:.2f}x): the ellipse readout is a"
      "\nlittle inefficient, but the white-noise averaging slope survives.")
