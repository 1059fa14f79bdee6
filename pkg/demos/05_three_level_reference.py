"""
Three-level reference system
============================

The Lambda system with pump and Stokes fields has a zero-eigenvalue state
with no weight on the excited level. Off two-photon resonance the eigenvalue
moves away from zero.
"""

import numpy as np

from optostirap import three_level_dark_state
from optostirap.spectral import three_level_hamiltonian

for op, os_ in ((0.0, 1.0), (1.0, 1.0), (1.0, 0.2), (0.3, 2.0)):
    psi, val = three_level_dark_state(op, os_)
    residual = np.linalg.norm(three_level_hamiltonian(op, os_, 0.0, 0.0) @ psi)
    print(f"Omega_P={op:.1f} Omega_S={os_:.1f}  state={np.round(psi, 4)}  "
          f"eigenvalue={val}  |H psi|={residual:.1e}")

# counter-intuitive sequence: Stokes first, then pump
t = np.linspace(-6, 6, 7)
for ti in t:
    op, os_ = np.exp(-((ti - 1) / 2) ** 2), np.exp(-((ti + 1) / 2) ** 2)
    psi, _ = three_level_dark_state(op, os_)
    print(f"t={ti:5.1f}  population |1>={psi[0]**2:.3f}  |3>={psi[2]**2:.3f}")

for d in (0.0, 0.1, 0.5):
    _, val = three_level_dark_state(1.0, 1.0, 0.5, 0.5 - d)
    print(f"two-photon detuning {d:.1f}: eigenvalue {val:+.4f}")
