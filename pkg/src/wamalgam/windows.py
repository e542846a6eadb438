"""Relatively compact neighborhood descriptors and their group translates.

Two concrete shapes cover all three groups: closed coordinate boxes on the
Euclidean group and the integer lattice (acting by addition), and the
canonical affine neighborhoods ``ball(0, r) x (1/beta, beta)`` on the ax+b
group (acting by the group law, so a translate of the scale interval is
again a scale interval and the spatial ball dilates with the base scale).
Boundaries count as inside throughout; midpoint grids never place a point
on a generic boundary, so indicator assemblies stay exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidElementError
from .groups import AxbGroup, Euclidean, IntegerLattice

_TOL = 1e-9


@dataclass(frozen=True)
class BoxWindow:
    """Closed box ``prod_k [lo_k, hi_k]`` around the identity of R^n or Z^n."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        if lo.shape != hi.shape:
            raise DimensionMismatchError("box bounds differ in dimension")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise InvalidElementError("windows must be relatively compact")
        if np.any(hi < lo):
            raise InvalidElementError("box window has hi < lo")

    @classmethod
    def centered(cls, radius, n=1):
        r = np.broadcast_to(np.asarray(radius, dtype=float), (n,))
        return cls(tuple(-r), tuple(r))

    @classmethod
    def interval(cls, lo, hi):
        return cls((float(lo),), (float(hi),))

    @classmethod
    def origin(cls, n=1):
        return cls((0.0,) * n, (0.0,) * n)

    def contains(self, group, base, queries):
        """Mask of ``queries`` lying in ``base . window`` (vectorized)."""
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        base = np.asarray(base, dtype=float)
        rel = np.asarray(queries, dtype=float) - base
        if rel.shape[-1] != len(self.lo):
            raise DimensionMismatchError("window dimension does not match points")
        scale = np.maximum(np.abs(lo), np.abs(hi)) + 1.0
        return np.all(
            (rel >= lo - _TOL * scale) & (rel <= hi + _TOL * scale), axis=-1
        )

    def key(self):
        return ("box", self.lo, self.hi)

    def descriptor(self):
        return {"shape": "box", "lo": list(self.lo), "hi": list(self.hi)}


@dataclass(frozen=True)
class AxbWindow:
    """Affine neighborhood ``ball(0, radius) x (1/beta, beta)`` on ax+b.

    The translate by a base point (x, a) is ``ball(x, a*radius) x (a/beta,
    a*beta)``: membership tests stay separable in (x, log a).
    """

    radius: float
    beta: float

    def __post_init__(self):
        if self.radius <= 0 or self.beta <= 1:
            raise InvalidElementError("need radius > 0 and beta > 1")

    def contains(self, group, base, queries):
        base = np.asarray(base, dtype=float)
        q = np.asarray(queries, dtype=float)
        bx, ba = base[..., :-1], base[..., -1]
        qx, qa = q[..., :-1], q[..., -1]
        dist = np.linalg.norm(qx - bx, axis=-1)
        in_ball = dist <= self.radius * ba * (1 + _TOL)
        lg = np.abs(np.log(qa) - np.log(ba))
        in_scales = lg <= np.log(self.beta) * (1 + _TOL)
        return in_ball & in_scales

    def key(self):
        return ("axb", self.radius, self.beta)

    def descriptor(self):
        return {"shape": "axb", "radius": self.radius, "beta": self.beta}


@dataclass(frozen=True)
class AxbCoverWindow:
    """Scale-linked cover set: ``ball(x, a * radius_mult) x a*(s_lo, s_hi)``.

    Contains the right translate ``(x,a) . U(r, beta) . (y, b)`` when built
    with ``radius_mult = beta |y| + r`` and ``(s_lo, s_hi) = b (1/beta,
    beta)``; the inflated ball keeps its center, which is what makes the
    doubling bound applicable cell by cell.
    """

    radius_mult: float
    scale_lo: float
    scale_hi: float

    @classmethod
    def for_right_translate(cls, window, g):
        y = np.asarray(g[:-1], dtype=float)
        b = float(g[-1])
        return cls(window.beta * float(np.linalg.norm(y)) + window.radius,
                   b / window.beta, b * window.beta)

    def contains(self, group, base, queries):
        base = np.asarray(base, dtype=float)
        q = np.asarray(queries, dtype=float)
        bx, ba = base[..., :-1], base[..., -1]
        qx, qa = q[..., :-1], q[..., -1]
        dist = np.linalg.norm(qx - bx, axis=-1)
        in_ball = dist <= self.radius_mult * ba * (1 + _TOL)
        ratio = qa / ba
        in_scales = (ratio >= self.scale_lo * (1 - _TOL)) & (
            ratio <= self.scale_hi * (1 + _TOL))
        return in_ball & in_scales

    def key(self):
        return ("axb-cover", self.radius_mult, self.scale_lo, self.scale_hi)

    def descriptor(self):
        return {"shape": "axb-cover", "radius_mult": self.radius_mult,
                "scale_lo": self.scale_lo, "scale_hi": self.scale_hi}


@dataclass(frozen=True)
class RightTranslatedWindow:
    """Window ``U . g``: membership reduces to ``q g^{-1} in base . U``."""

    base_window: object
    g: tuple

    def contains(self, group, base, queries):
        ginv = group.inverse(np.asarray(self.g, dtype=float))
        moved = group.multiply(np.asarray(queries, dtype=float), ginv)
        return self.base_window.contains(group, base, moved)

    def key(self):
        return ("rtrans", self.base_window.key(), self.g)

    def descriptor(self):
        return {
            "shape": "right-translate",
            "base": self.base_window.descriptor(),
            "g": list(self.g),
        }


def right_translate(window, g):
    return RightTranslatedWindow(window, tuple(np.asarray(g, dtype=float)))


def window_for(group, radius=None, beta=None, lo=None, hi=None):
    """Convenience constructor dispatching on the group kind."""
    if isinstance(group, AxbGroup):
        return AxbWindow(radius=float(radius), beta=float(beta))
    if lo is not None:
        return BoxWindow(tuple(np.atleast_1d(lo).astype(float)),
                         tuple(np.atleast_1d(hi).astype(float)))
    return BoxWindow.centered(radius, group.n)


def window_mask(window, grid, base):
    """Boolean mask over a grid for membership in ``base . window``."""
    pts = grid.points()
    return window.contains(grid.group, np.asarray(base, dtype=float), pts).reshape(grid.shape)


def window_haar_measure(window, grid, base=None):
    """Quadrature Haar measure of ``base . window`` (defaults to identity)."""
    if base is None:
        base = grid.group.identity
    mask = window_mask(window, grid, base)
    return float(np.sum(grid.weights * mask))


def box_index_offsets(window, grid):
    """Index-offset ranges of a box window on a uniform/lattice grid.

    Returns per-axis (lo_offset, hi_offset) such that grid index j belongs
    to the translate based at grid index i exactly when
    ``lo_k <= j_k - i_k <= hi_k`` for every axis k.
    """
    los, his = [], []
    for k, step in enumerate(np.atleast_1d(grid.steps)):
        lo_off = int(np.ceil(window.lo[k] / step - _TOL))
        hi_off = int(np.floor(window.hi[k] / step + _TOL))
        if hi_off < lo_off:
            raise InvalidElementError(
                f"window axis {k} spans no grid offsets at spacing {step}; "
                "refine the grid or widen the window"
            )
        los.append(lo_off)
        his.append(hi_off)
    return los, his


def cover_by_translates(big, small, group):
    """Translates ``y_j`` with ``big`` contained in the union of ``small . y_j``.

    Implemented for boxes on abelian groups: tile the big box by copies of
    the small box. Used for window-robustness bounds.
    """
    if not isinstance(group, (Euclidean, IntegerLattice)):
        raise InvalidElementError("covering helper supports abelian box windows only")
    lo_b, hi_b = np.asarray(big.lo), np.asarray(big.hi)
    lo_s, hi_s = np.asarray(small.lo), np.asarray(small.hi)
    width_s = hi_s - lo_s
    if np.any(width_s <= 0):
        raise InvalidElementError("small window must have positive volume")
    counts = np.maximum(1, np.ceil((hi_b - lo_b) / width_s - _TOL).astype(int))
    axes = []
    for k in range(len(counts)):
        # bases chosen so translates small + y tile [lo_b, hi_b] on axis k
        starts = lo_b[k] + np.arange(counts[k]) * width_s[k]
        starts = np.minimum(starts, hi_b[k] - width_s[k])
        axes.append(starts - lo_s[k])
    mesh = np.meshgrid(*axes, indexing="ij")
    offsets = np.stack([m.ravel() for m in mesh], axis=-1)
    if isinstance(group, IntegerLattice):
        offsets = np.round(offsets)
    return offsets
