"""
Pulse schedule and intracavity mean fields
==========================================

Two delayed Gaussian drives act on the outer sub-cavities. The right pulse
comes first. The middle drive is chosen so that, without decay, the middle
cavity stays empty.
"""

import numpy as np

from optostirap import PulseSchedule, SystemParams, quasistatic_trajectory
from optostirap.model import drives

schedule = PulseSchedule()  # A = 350, T = 3, tau = 1, window [-15, 15]
t = schedule.grid(13)

# drive amplitudes (Omega_L, Omega_M, Omega_R) on a coarse grid
for ti, (oL, oM, oR) in zip(t, drives(SystemParams(), schedule, t).T):
    print(f"t={ti:6.1f}  Omega_L={oL:9.3f}  Omega_M={oM:9.3f}  Omega_R={oR:9.3f}")

# without decay the middle amplitude cancels exactly
lossless = quasistatic_trajectory(SystemParams.decay_free(), schedule, t)
print("\nmax |alpha_M| without decay:", np.abs(lossless.alpha_M).max())

# with cavity decay it does not, and the fields pick up a phase
lossy = quasistatic_trajectory(SystemParams(), schedule, t)
mid = len(t) // 2
print("t = 0 with decay: alpha =", np.round(lossy.amplitudes[mid, :3], 3))
print("|alpha_M| / |alpha_L| =", abs(lossy.alpha_M[mid]) / abs(lossy.alpha_L[mid]))
