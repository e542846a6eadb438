"""Weight certification: submultiplicativity and the doubling condition.

The doubling classifier certifies the polynomial zoo with fitted (c, alpha)
constants, and rejects the exponential weight through sustained growth of
the t=2 ball ratio along radius octaves.
"""

import numpy as np

from wamalgam import (
    Euclidean,
    check_doubling,
    check_submultiplicative,
    constant_weight,
    exponential_weight,
    power_weight,
    shifted_power_weight,
)

E = Euclidean(1)
samples = np.linspace(-12, 12, 121)

print("submultiplicative?")
for w in (shifted_power_weight(2.0), exponential_weight(),
          shifted_power_weight(-1.0)):
    rec = check_submultiplicative(w, E, samples)
    tail = "" if rec["passed"] else f"  counterexample {rec['counterexample']}"
    print(f"  {w.name:15s} s={w.params.get('s', '-')!s:5s}:",
          rec["passed"], tail)

print("\ndoubling classifier (centers 0, 1.5, -3; radii 0.5..4):")
centers = [0.0, 1.5, -3.0]
radii = [0.5, 1.0, 2.0, 4.0]
for w in (constant_weight(1.0), power_weight(0.5), power_weight(1.0),
          shifted_power_weight(2.0), shifted_power_weight(-2.0)):
    rec = check_doubling(w, centers, radii)
    print(f"  {w.name:15s} {w.params}: pass, c = {rec['c']:.3f}, "
          f"alpha = {rec['alpha']:.3f}")

rec = check_doubling(exponential_weight(), [0.0, 2.0], [1.0, 2.0])
wit = rec["witness"]
print(f"  exponential    : FAIL, log-ratio growth along octaves "
      f"{[round(g, 2) for g in wit['growth_factors']]}")

print("\nfitted alpha equals the dimension for v = 1:")
for n in (1, 2):
    rec = check_doubling(constant_weight(1.0), [np.zeros(n)], radii)
    print(f"  n = {n}: alpha = {rec['alpha']:.4f}")
