"""
Pulse-area and delay sweep
==========================

Larger drive amplitude widens the gap around the dark branch. A small grid
over amplitude and pulse delay shows how the transfer efficiency responds.
"""

from optostirap import PulseSchedule, SweepAxis, SystemParams, best_point, run_sweep

axes = [SweepAxis("A", (50.0, 150.0, 350.0, 700.0)), SweepAxis("tau", (0.5, 1.0, 2.0))]
result = run_sweep(SystemParams(), PulseSchedule(), axes, n_points=301)

print("    A   tau       eta   peak n_aM   min gap")
for r in result.records:
    print(f"{r.values[0]:5.0f} {r.values[1]:5.1f} {r.eta:9.2e} {r.peak_n_aM:11.2e} {r.min_gap:9.4f}")
print("best (A, tau):", best_point(result))
