"""Mixed-norm machinery specific to the affine ax+b group.

Covers the closed-form discrete norm for (L^{p,q}(v))_d over affine
lattices (inner weighted l^p over spatial indices with ball integrals of
the weight, outer l^q over scale levels with the scale-cell Haar factor),
the right-translation operator bound for doubling weights, and the
resulting convolution relation verifier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .amalgam import AmalgamSpace
from .components import (
    DEFAULT_OVERFLOW_GUARD,
    WeightedLp,
    MixedLpq,
    WeightFunction,
    ball_integral,
    check_doubling,
)
from .convolution import space_norm, verify_embedding
from .errors import IndexMismatchError, InvalidExponentError, WeightDomainError
from .windows import AxbWindow


@dataclass
class BallWeightTable:
    """Ball integrals of a spatial weight over an affine lattice.

    Entry i is the integral of the weight over the ball centered at the
    spatial part of lattice point i with radius ``radius_scale`` times the
    point's scale coordinate.
    """

    lattice: object
    values: np.ndarray
    source: WeightFunction
    radius_scale: float = 1.0

    def __post_init__(self):
        if len(self.values) != len(self.lattice):
            raise IndexMismatchError("table length does not match the lattice")
        if np.any(self.values <= 0):
            raise WeightDomainError("ball integrals must be positive")

    @property
    def scales(self):
        return self.lattice.points[:, -1]

    @property
    def levels(self):
        """Sorted distinct scale values (the j-levels)."""
        return np.unique(self.scales)


def compute_ball_weights(weight, lattice, radius_scale=1.0, cells_per_radius=64):
    """Tabulate ``int_{ball(x_i, radius_scale * a_i)} v`` over the lattice."""
    pts = lattice.points
    vals = np.empty(len(pts))
    for i, p in enumerate(pts):
        vals[i] = ball_integral(weight, p[:-1], radius_scale * p[-1],
                                cells_per_radius)
        if not np.isfinite(vals[i]) or vals[i] <= 0:
            raise WeightDomainError(
                f"weight not integrable on ball({p[:-1]}, {radius_scale * p[-1]})"
            )
    return BallWeightTable(lattice, vals, weight, radius_scale)


def lpq_discrete_norm(coefficients, table, p, q, n=1):
    """Closed-form discrete mixed norm over an affine lattice.

    ``( sum_j ( sum_k |c_{k,j}|^p w_{k,j} )^{q/p} a_j^{-n} )^{1/q}`` with
    the supremum over levels when q is infinite.
    """
    if not (0 < p < math.inf):
        raise InvalidExponentError("p must lie in (0, inf)")
    if not (q > 0):
        raise InvalidExponentError("q must be positive")
    coefficients = np.asarray(coefficients)
    if coefficients.shape[0] != len(table.values):
        raise IndexMismatchError("coefficients do not match the ball-weight table")
    scales = table.scales
    inner = {}
    for c, w, a in zip(np.abs(coefficients), table.values, scales):
        inner[a] = inner.get(a, 0.0) + float(c) ** p * w
    if q == math.inf:
        return max(v ** (1.0 / p) for v in inner.values())
    total = sum(v ** (q / p) * a ** (-float(n)) for a, v in inner.items())
    return total ** (1.0 / q)


def right_translation_bound(y, b, p, q, alpha, n=1):
    """Weight dominating the measure-action norm on W(L^inf, L^{p,q}(v)).

    ``b^{n(1+1/q)} (1 + |y|/b)^{alpha/p}`` where alpha is a certified
    doubling exponent of v; at the identity the bound is one.
    """
    if b <= 0:
        raise InvalidExponentError("scale coordinate must be positive")
    y_norm = np.linalg.norm(np.atleast_1d(np.asarray(y, dtype=float)))
    inv_q = 0.0 if q == math.inf else 1.0 / q
    return float(b ** (n * (1.0 + inv_q)) * (1.0 + y_norm / b) ** (alpha / p))


def translation_bound_weight(p, q, alpha, n=1):
    """The bound packaged as a group-domain weight on ax+b coordinates."""

    def evaluate(pts):
        pts = np.asarray(pts, dtype=float)
        y = pts[..., :-1]
        b = pts[..., -1]
        y_norm = np.linalg.norm(y, axis=-1)
        inv_q = 0.0 if q == math.inf else 1.0 / q
        return b ** (n * (1.0 + inv_q)) * (1.0 + y_norm / b) ** (alpha / p)

    return WeightFunction("right-translation-bound", evaluate, domain="group",
                          params={"p": p, "q": q, "alpha": alpha, "n": n})


def verify_axb_convolution(weight, p, q, left_specs, right_specs, *, grid,
                           window=None, alpha=None,
                           doubling_centers=(0.0, 1.5, -3.0),
                           doubling_radii=(0.5, 1.0, 2.0),
                           levels=2, growth_tolerance=0.25,
                           overflow_guard=DEFAULT_OVERFLOW_GUARD,
                           right_weight=None):
    """Verify W(L^inf, L^{p,q}(v)) * W(L^inf, L^r_w) into W(L^inf, L^{p,q}(v)).

    ``r = min(1, p, q)`` and w is the right-translation bound with the
    certified doubling exponent of v (certification runs here when no
    alpha is supplied). ``right_weight`` overrides w for negative-control
    sweeps.
    """
    n = grid.group.n
    if alpha is None:
        rec = check_doubling(weight, [np.full(n, c) for c in doubling_centers],
                             doubling_radii)
        if not rec["passed"]:
            raise WeightDomainError("weight failed doubling certification")
        alpha = rec["alpha"]
    r = min(1.0, p, q)
    w = right_weight if right_weight is not None else translation_bound_weight(
        p, q, alpha, n)
    window = window if window is not None else AxbWindow(0.5, 1.5)
    target_space = AmalgamSpace("linf", MixedLpq(p, q, weight, n=n), window)
    right_space = AmalgamSpace("linf", WeightedLp(r, w), window)
    report = verify_embedding(
        "axb_relation", left_specs, right_specs, grid=grid,
        target_norm=space_norm(target_space, overflow_guard),
        left_norm=space_norm(target_space, overflow_guard),
        right_norm=space_norm(right_space, overflow_guard),
        levels=levels, growth_tolerance=growth_tolerance,
        family=f"axb p={p} q={q} v={weight.name} alpha={alpha:.4g}",
        overflow_guard=overflow_guard,
    )
    return report
