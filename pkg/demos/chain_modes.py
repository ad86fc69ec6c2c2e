"""
Which modes of an ion chain does noise heat?
============================================

N ions in a linear trap share N axial normal modes.  A field that is the
same at every ion only pushes the centre of mass; a field that is
independent at each ion heats every mode.
"""

import numpy as np

from ionheat import build_chain, mercury_trap
from ionheat.analytics import mode_heating_times, tau_N, tau_N_incoherent
from ionheat.noise import gamma_matrix
from ionheat.trap import ExponentialDistance

chain = build_chain(5)
print("equilibrium positions (units of the trap length):", np.round(chain.positions, 4))
print("mode frequencies / omega0:", np.round(chain.frequencies, 4))

###############################################################################
# Heating time of each mode in units of the single-ion time tau1.

trap = mercury_trap()
for name, gamma in [("coherent", np.ones((5, 5))),
                    ("incoherent", np.eye(5)),
                    ("exponential, 5 um", gamma_matrix(chain, trap, ExponentialDistance(5e-6)))]:
    times = mode_heating_times(chain, gamma, 1.0)
    print(f"{name:>18}:", ", ".join(f"{x:.3f}" for x in times))

###############################################################################
# The whole chain heats N times faster than one ion under coherent noise
# and somewhat more slowly when the ions see independent fields.

for n in (1, 2, 5, 10):
    c = build_chain(n)
    print(f"N = {n:2d}: coherent {tau_N(c, np.ones((n, n)), 1.0):.4f}, "
          f"incoherent {tau_N_incoherent(c, 1.0):.4f}")
