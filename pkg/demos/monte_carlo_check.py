"""
Checking the closed forms with sampled noise
============================================

Drive the ion with explicit noise realizations, average over the ensemble,
and compare with the exact moments.  Results do not depend on how many
threads are used.
"""

import numpy as np

from ionheat import Ensemble, ensemble_fidelity, ensemble_moments
from ionheat.analytics import fidelity_from_moments, moments_exponential

times = np.array([1.0, 5.0, 10.0, 20.0])
ens = Ensemble(omega0T=1.0, omega0tau1=8.5)

est = ensemble_moments(ens, times, R=5000, seed=42, workers=2)
exact = moments_exponential(1.0, 8.5, times)
print(" omega0 t    m (MC)        m (exact)")
for t, m, se, mx in zip(times, est.mean["nbar"][0], est.stderr["nbar"][0], exact.m):
    print(f"{t:8.1f}  {m:.4f} +- {se:.4f}   {mx:.4f}")

###############################################################################
# The fidelity averaged directly over realizations agrees with the
# Gaussian formula applied to the exact moments.

fid = ensemble_fidelity(ens, times, R=5000, seed=42)
print("\nF (MC):   ", np.round(fid.mean["fidelity"], 4))
print("F (exact):", np.round(fidelity_from_moments(exact), 4))
