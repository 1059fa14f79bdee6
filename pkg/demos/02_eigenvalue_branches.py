"""
Eigenvalue branches and the dark mode
=====================================

Without decay the coupling matrix is real symmetric. One eigenvalue stays at
zero for the whole schedule; its eigenvector moves from the first membrane to
the second.
"""

import numpy as np

from optostirap import (PulseSchedule, SystemParams, analytic_eigenvalues, dark_mode,
                        decay_shift, quasistatic_trajectory, spectral_trajectory)

params, schedule = SystemParams.decay_free(), PulseSchedule()
mft = quasistatic_trajectory(params, schedule, schedule.grid(601))
spec = spectral_trajectory(params, schedule, mft, shift_params=SystemParams())
order = spec.report_order()

print("   t    dark      l2       l3       l4       l5      gap")
for i in range(0, len(spec), 50):
    vals = spec.eigenvalues[i, order].real
    print(f"{spec.times[i]:5.1f} " + " ".join(f"{v:8.4f}" for v in vals) + f" {spec.gap[i]:8.4f}")

i0 = int(np.argmin(np.abs(spec.times)))
print("\nclosed form at t=0:", np.round(analytic_eigenvalues(params, mft[i0]).real, 4))
print("adiabatic gap:", round(spec.adiabatic_gap(), 4))

# dark-mode content on (b1, b2) across the pulse sequence
for t in (-6.0, -1.0, 0.0, 1.0, 6.0):
    i = int(np.argmin(np.abs(spec.times - t)))
    psi = dark_mode(params, mft[i], allow_degenerate=True)
    print(f"t={t:5.1f}  |b1|^2={abs(psi[3])**2:.3f}  |b2|^2={abs(psi[4])**2:.3f}  "
          f"|aM|^2={abs(psi[1])**2:.3f}")

print("\nfirst-order decay shift at t=0:", decay_shift(SystemParams(), mft[i0], normalized=False))
