"""Two-sided certificates for translation-operator norms.

A finite test family certifies lower bounds; sequence-space comparisons
over translated windows certify uppers (up to the recorded equivalence
bracket). On the affine group the upper envelope follows the
(1+|y|)^(alpha/p) shape predicted by the doubling exponent.
"""

import numpy as np

from wamalgam import (
    AmalgamSpace,
    AxbGrid,
    AxbGroup,
    AxbWindow,
    BoxWindow,
    Euclidean,
    MixedLpq,
    UniformGrid,
    WeightedLp,
    build_axb_lattice,
    build_bupu,
    calibrate_equivalence_bracket,
    check_doubling,
    estimate_translation_operator_norm,
    euclidean_lattice,
    generator,
    shifted_power_weight,
)
from wamalgam.families import gaussian_bump_sum

# --- weighted space on the line ------------------------------------------------

E = Euclidean(1)
grid = UniformGrid(E, -16, 16, 1024)
X = euclidean_lattice(grid, 1.0)
w = shifted_power_weight(1.0)
space = AmalgamSpace("linf", WeightedLp(1.0, w), BoxWindow.centered(0.5, 1))

rng = generator(7)
family = [gaussian_bump_sum(rng, center_range=(-6, 6)).sample(grid)
          for _ in range(8)]
bracket = calibrate_equivalence_bracket(
    space, build_bupu(X, BoxWindow.centered(1.0, 1), grid=grid), family)
print(f"equivalence bracket C* = {bracket:.3f}")

print("\nright translations on W(Linf, L^1_(1+|x|)):")
print("   y    lower    upper    (submultiplicative bound 1+|y|)")
for y in (0.5, 1.0, 2.0, 4.0):
    ob = estimate_translation_operator_norm(
        space, [y], "right", grid=grid, test_family=family, well_spread=X,
        rng=generator(5), bracket_constant=bracket)
    print(f"  {y:4.1f}  {ob.lower:6.3f}  {ob.upper:7.3f}    {1 + y}")

# --- the affine group: the doubling exponent shapes the envelope ----------------

G = AxbGroup(1)
agrid = AxbGrid(G, -16.0, 16.0, 512, 0.05, 1.25, 32)
lattice = build_axb_lattice(0.5, 2.0, j_range=(2, 2), grid=agrid, x_extent=2.0)
v = shifted_power_weight(1.0)
cert = check_doubling(v, [0.0, 1.5, -3.0], [0.25, 0.5, 1.0, 2.0, 4.0, 8.0])
aspace = AmalgamSpace("linf", MixedLpq(1.0, 1.0, v, n=1), AxbWindow(0.5, 1.5))

print(f"\nax+b, v = (1+|x|): worst-case doubling exponent "
      f"{cert['alpha_max']:.3f}")
print("   y    sequence ratio   (1+y)^alpha")
ys = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0]
ratios = []
for y in ys:
    ob = estimate_translation_operator_norm(
        aspace, [y, 1.0], "right", grid=agrid, well_spread=lattice,
        rng=generator(9), coeff_count=8, bracket_constant=1.0)
    ratios.append(ob.sequence_ratio)
    print(f"  {y:4.0f}  {ob.sequence_ratio:14.3f}   "
          f"{(1 + y) ** cert['alpha_max']:10.3f}")
slope = np.polyfit(np.log1p(ys), np.log(ratios), 1)[0]
print(f"fitted log-log slope {slope:.3f} vs certified exponent "
      f"{cert['alpha_max']:.3f}")
