"""Mixed-norm spaces on the affine group and the new convolution relation.

Builds the ball-integral weight table over a geometric lattice, evaluates
the closed-form discrete mixed norm, contrasts the non-invariance of the
weighted space itself with the window stability of its amalgam, and runs
the convolution relation with the right-translation bound weight.
"""

import numpy as np

from wamalgam import (
    AxbGrid,
    AxbGroup,
    AxbWindow,
    DiscreteSequence,
    MixedLpq,
    build_axb_lattice,
    check_doubling,
    compute_ball_weights,
    constant_weight,
    generator,
    lpq_discrete_norm,
    right_translation_bound,
    sequence_norm,
    shifted_power_weight,
    verify_axb_convolution,
)
from wamalgam.families import axb_bump_sum

G = AxbGroup(1)
grid = AxbGrid(G, -6.0, 6.0, 80, 0.125, 8.0, 48)
lattice = build_axb_lattice(0.5, 2.0, j_range=(-2, 2), grid=grid, x_extent=6.0)

# --- ball-integral weights over the lattice ----------------------------------

table = compute_ball_weights(constant_weight(1.0), lattice)
print("v = 1: ball weights equal 2 a_j; max deviation =",
      np.abs(table.values - 2 * lattice.points[:, -1]).max())

rng = generator(11)
lam = np.abs(rng.standard_normal(len(lattice)))
print("closed-form l^{p,q} norm (p=q=1)  =", lpq_discrete_norm(lam, table, 1, 1))
seq = DiscreteSequence(lam, lattice, MixedLpq(1, 1, None, n=1), AxbWindow(1, 2))
print("same norm through grid quadrature =", sequence_norm(seq, grid))

# --- the right-translation bound ---------------------------------------------

v = shifted_power_weight(2.0)
cert = check_doubling(v, [0.0, 1.5, -3.0], [0.5, 1.0, 2.0])
print(f"\nv = (1+|x|)^2 doubles with c = {cert['c']:.2f}, "
      f"alpha = {cert['alpha']:.2f}")
for y, b in ((0.0, 1.0), (0.0, 2.0), (3.0, 1.0)):
    print(f"  bound w({y},{b}) =",
          right_translation_bound([y], b, 1.0, 1.0, cert["alpha"], 1))

# --- the space is not translation invariant, its amalgam is -------------------

sup_quota = []
for A in (1.0, 8.0, 64.0):
    xs = np.linspace(-6, 6, 200)
    sup_quota.append(float(np.max(v((xs + A)[:, None]) / v(xs[:, None]))))
print("\nsup_x v(x + a)/v(x) for a = 1, 8, 64:",
      [round(s, 1) for s in sup_quota], "(unbounded in a: no majorant)")

# --- the new convolution relation ----------------------------------------------

left = [axb_bump_sum(rng) for _ in range(4)]
right = [axb_bump_sum(rng) for _ in range(4)]
report = verify_axb_convolution(constant_weight(1.0), 1.0, 1.0, left, right,
                                grid=grid, levels=2)
print("\nW(Linf, L^{1,1}(v)) * W(Linf, L^1_w) -> W(Linf, L^{1,1}(v)):")
print("  C_emp per level:", [round(c, 4) for c in report.refinement_trace],
      " passed:", report.passed)
