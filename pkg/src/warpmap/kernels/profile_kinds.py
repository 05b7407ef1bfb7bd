"""Integer codes for the radial-profile formulas the compiled kernels know.

The Cython module mirrors these values in C switch tables; keep the two
in sync (tests/test_kernels.py checks every kind pointwise against the
Python profiles).
"""

P_CONST = 0          # p0
P_POWER = 1          # p0 * R**p1
P_SIN2 = 2           # sin(R)**2
P_COS2_SCALED = 3    # cos(R/p0)**2
P_SINH2 = 4          # sinh(R)**2
P_COSH2 = 5          # cosh(R)**2
P_ELLIPSOID_A = 6    # p0*sin(R)**2 + cos(R)**2   (p0 = c**2)
P_TANH2_SCALED = 7   # p0 * tanh(R)**2
P_SCHWARZ_A = 8      # 1 / (1 - p0/R)             (p0 = 2M)
P_SCHWARZ_B = 9      # 1 - p0/R
P_TORUS_B = 10       # (p0 + p1*cos(R))**2
P_ONE_PLUS_R2 = 11   # 1 + R**2

ALL_KINDS = tuple(range(12))
