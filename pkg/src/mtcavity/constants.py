"""Physical constants (CODATA 2018 where exact) and unit conversions."""

ELEMENTARY_CHARGE = 1.602176634e-19  # C
HBAR_SI = 1.054571817e-34  # J s
HBAR_CGS = 1.054571817e-27  # erg s
DEBYE = 3.33564e-30  # C m per debye

# 1 statvolt/cm expressed in V/m
STATVOLT_PER_CM_TO_V_PER_M = 2.99792458e4

NM = 1e-9
ANGSTROM = 1e-10
M3_TO_CM3 = 1e6
