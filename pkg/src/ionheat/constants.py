"""Physical constants (CODATA 2018, SI units)."""

HBAR = 1.054571817e-34  # J s
C_LIGHT = 299792458.0  # m / s
EPSILON0 = 8.8541878128e-12  # F / m
K_BOLTZMANN = 1.380649e-23  # J / K
STEFAN_BOLTZMANN = 5.670374419e-8  # W / (m^2 K^4)
E_CHARGE = 1.602176634e-19  # C
AMU = 1.66053906660e-27  # kg

# 199Hg+ reference trap used for the order-of-magnitude thermal estimate
MERCURY_MASS_KG = 3.29e-25
MERCURY_FREQ_HZ = 4.66e6
