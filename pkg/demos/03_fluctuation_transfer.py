"""
Membrane fluctuation transfer
=============================

Propagate the second moments of the five fluctuation modes, starting with one
quantum of fluctuation in the first membrane, and compare the adaptive
integrator with the piecewise matrix-exponential oracle.
"""

import numpy as np

from optostirap import PulseSchedule, SystemParams, initial_moments, propagator_oracle, simulate

schedule = PulseSchedule()
for label, params in (("with decay", SystemParams()), ("decay-free", SystemParams.decay_free())):
    res = simulate(params, schedule, with_spectrum=False)
    occ = res.moments.occupancies
    print(f"{label}: eta = {res.eta:.4f}, peak n_aM = {res.peak_n_aM:.4f}, "
          f"runtime {res.runtime:.2f}s")
    for i in range(0, len(occ), 100):
        print(f"  t={res.moments.times[i]:6.1f}  " + "  ".join(f"{x:.4f}" for x in occ[i]))

# independent check of the integrator
res = simulate(SystemParams(), schedule, with_spectrum=False)
N0 = initial_moments([0, 0, 0, 1, 0])
for steps in (1024, 2048, 4096):
    orc = propagator_oracle(SystemParams(), schedule, res.meanfield, N0, steps=steps)
    print(f"oracle {steps:5d} steps: max deviation {np.abs(orc.occupancies - res.moments.occupancies).max():.2e}")
