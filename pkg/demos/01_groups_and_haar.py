"""The three shipped groups and their Haar quadrature.

Walks through the group algebra (law, inverse, modular function) and shows
that the grid quadrature reproduces analytic Haar integrals, including the
non-unimodular da/a^2 measure of the affine group.
"""

import numpy as np

from wamalgam import (
    AxbGrid,
    AxbGroup,
    Euclidean,
    IntegerLattice,
    LatticeGrid,
    SampledFunction,
    UniformGrid,
    element,
    haar_integral,
    translate,
)

# --- group algebra on ax+b -------------------------------------------------

G = AxbGroup(1)
g = element(G, 1.0, 2.0)
h = element(G, 3.0, 4.0)
print("ax+b law      (1,2)*(3,4) =", G.multiply(g, h))
print("ax+b inverse  (3,4)^-1    =", G.inverse(h))
print("modular       (0,2)       =", G.modular(element(G, 0.0, 2.0)))

# --- counting measure on the lattice ---------------------------------------

Z = IntegerLattice(1)
zgrid = LatticeGrid(Z, -5, 5)
F = SampledFunction.sample(zgrid, lambda i: ((i >= 0) & (i <= 2)).astype(float))
print("\ncounting measure of {0,1,2} =", haar_integral(F))

# --- Lebesgue measure on the line -------------------------------------------

E = Euclidean(1)
egrid = UniformGrid(E, -2, 2, 4000)
box = SampledFunction.sample(egrid, lambda x: ((x >= 0) & (x <= 1)).astype(float))
print("unit box on R              =", haar_integral(box))

# --- the affine Haar measure da/a^2 dx --------------------------------------

agrid = AxbGrid(G, -1, 2, 600, 0.4, 4.0, 3000)
rect = SampledFunction.sample(
    agrid, lambda x, a: ((x >= 0) & (x <= 1) & (a >= 1) & (a <= np.e)).astype(float))
print("[0,1] x [1,e] on ax+b      =", haar_integral(rect),
      " (analytic 1 - 1/e =", 1 - np.exp(-1), ")")

# --- left invariance and the right-translation identity ---------------------

bump = SampledFunction.sample(
    agrid, lambda x, a: np.exp(-((x - 0.5) ** 2 + np.log(a) ** 2) / 0.05))
gg = np.array([0.3, 1.2])
print("\nleft invariance error      =",
      abs(haar_integral(translate(bump, gg, "left")) - haar_integral(bump)))
rhs = haar_integral(bump) / G.modular(gg)
print("right translation identity =",
      abs(haar_integral(translate(bump, gg, "right")) - rhs),
      " (haar(R_g F) = modular(g)^{-1} haar(F))")
