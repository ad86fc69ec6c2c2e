"""
How hot would a thermal field have to be?
=========================================

Blackbody radiation at temperature theta has a correlation time far
shorter than a trap period, so its heating time falls as theta^-3.
Turning an observed heating time around gives an effective temperature.
"""

from ionheat import mercury_trap
from ionheat.analytics import thermal_tau1, thermal_theta

trap = mercury_trap()
for theta in (4.0, 77.0, 300.0):
    print(f"theta = {theta:5.0f} K -> tau1 = {thermal_tau1(trap, theta):.3e} s")

###############################################################################
# A heating time of 135 ms in the mercury trap corresponds to about 17.5 K
# when the formula is evaluated directly.  The often quoted figure for the
# same data is 4.6 K; the discrepancy is discussed in the README.

print(f"\ntau1 = 0.135 s -> theta = {thermal_theta(trap, 0.135):.3f} K")
