"""
Ground-state fidelity of a single ion
=====================================

A trapped ion starts in its motional ground state and is pushed around by a
fluctuating electric field with exponential correlation time T.  The chance
that it is still in the ground state after a time t follows from two
ensemble moments of the coherent amplitude.
"""

import numpy as np

from ionheat import fidelity_from_moments, moments_exponential
from ionheat.figures import local_maxima

t = np.linspace(0, 25, 11)

###############################################################################
# Fast noise compared with the trap period (omega0 T = 1) heats steadily.
# Larger omega0 tau1 means a weaker field and slower loss.

for tau1 in (1.0, 8.5, 41.0, 128.5):
    F = fidelity_from_moments(moments_exponential(1.0, tau1, t))
    print(f"omega0 tau1 = {tau1:6.1f}:", np.array2string(F, precision=3))

###############################################################################
# Slow noise (omega0 T much larger than one) is nearly a static push.  The
# ion is displaced and then swings back through the origin, so the
# fidelity partly recovers once per trap period.

t = np.linspace(0, 25, 500)
F = fidelity_from_moments(moments_exponential(16.0, 128.5, t))
peaks = local_maxima(F)
print("\nomega0 T = 16, omega0 tau1 = 128.5")
print("revival times (omega0 t):", np.round(t[peaks], 2))
print("fidelity at the revivals:", np.round(F[peaks], 3))

###############################################################################
# At long times every curve decays like tau1 / t.

m = moments_exponential(1.0, 41.0, [1e3, 1e4])
print("\nF * t / tau1 at omega0 t = 1e3, 1e4:",
      np.round(fidelity_from_moments(m) * np.array([1e3, 1e4]) / 41.0, 4))
