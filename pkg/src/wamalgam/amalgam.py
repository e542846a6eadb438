"""Control functions, Wiener amalgam quasi-norms, and translation operators.

The control function of F for a window Q and local component B tabulates
``x -> ||F restricted to x.Q||_B`` over the grid; the amalgam quasi-norm
feeds it to a global component. Local components are L-infinity, L^1
(against Haar measure) and M (total variation; measures enter as finitely
many atoms plus an optional density). Fast paths exploit that box windows
on uniform grids and affine windows on (x, log a) grids act by sliding
index stencils; everything else falls back to per-point membership masks.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .components import (
    DEFAULT_OVERFLOW_GUARD,
    OVERFLOW,
    DiscreteSequence,
    is_overflow,
    quasi_norm,
    sequence_norm,
)
from .errors import (
    CoverageWarning,
    DimensionMismatchError,
    EmptyGridError,
    InvalidElementError,
)
from .groups import AxbGrid, LatticeGrid, SampledFunction, UniformGrid, haar_integral
from .windows import (
    AxbCoverWindow,
    AxbWindow,
    BoxWindow,
    box_index_offsets,
    right_translate,
)

_TOL = 1e-9

LOCAL_COMPONENTS = ("linf", "l1", "m")


def normalize_local(tag):
    t = str(tag).lower().replace("^", "").replace(" ", "")
    aliases = {"linf": "linf", "linfty": "linf", "loo": "linf",
               "l1": "l1", "lone": "l1", "m": "m", "measure": "m"}
    if t not in aliases:
        raise InvalidElementError(f"unknown local component {tag!r}")
    return aliases[t]


@dataclass
class DiscreteMeasure:
    """Complex Radon measure with finitely many atoms and optional density."""

    group: object
    atoms: list = field(default_factory=list)  # (point, mass) pairs
    density: SampledFunction | None = None
    grid: object = None  # ambient grid for atom-only measures

    def __post_init__(self):
        self.atoms = [
            (self.group.check_element(np.asarray(p, dtype=float)), complex(m))
            for p, m in self.atoms
        ]
        if self.grid is None and self.density is not None:
            self.grid = self.density.grid

    def total_variation(self):
        tv = sum(abs(m) for _, m in self.atoms)
        if self.density is not None:
            tv += haar_integral(abs(self.density))
        return tv


@dataclass
class AmalgamSpace:
    """W(B, Y, Q): local component tag, global component, and window."""

    local: str
    global_component: object
    window: object

    def __post_init__(self):
        self.local = normalize_local(self.local)

    @property
    def p_exponent(self):
        return self.global_component.p_exponent

    def norm(self, F, overflow_guard=DEFAULT_OVERFLOW_GUARD):
        return amalgam_norm(F, self.window, self.local, self.global_component,
                            overflow_guard=overflow_guard)

    def describe(self):
        return f"W({self.local},{self.global_component.describe()})"


# ---------------------------------------------------------------------------
# Sliding-stencil primitives


def _sliding_max(values, axis, lo, hi):
    """max over index offsets [lo, hi] along axis, zero-padded outside."""
    m = values.shape[axis]
    length = hi - lo + 1
    pad_l, pad_r = max(0, -lo), max(0, hi)
    padding = [(0, 0)] * values.ndim
    padding[axis] = (pad_l, pad_r)
    V = np.pad(values, padding)
    if values.size * length <= 4_000_000:
        S = np.lib.stride_tricks.sliding_window_view(V, length, axis=axis)
        sl = [slice(None)] * S.ndim
        sl[axis] = slice(lo + pad_l, lo + pad_l + m)
        return S[tuple(sl)].max(axis=-1)
    out = None
    for d in range(length):
        sl = [slice(None)] * V.ndim
        sl[axis] = slice(lo + pad_l + d, lo + pad_l + d + m)
        piece = V[tuple(sl)]
        out = piece.copy() if out is None else np.maximum(out, piece)
    return out


def _sliding_sum(values, axis, lo, hi):
    """sum over index offsets [lo, hi] along axis, zero-padded outside."""
    m = values.shape[axis]
    pad_l, pad_r = max(0, -lo), max(0, hi)
    padding = [(0, 0)] * values.ndim
    padding[axis] = (pad_l, pad_r)
    V = np.pad(values, padding)
    cs = np.cumsum(V, axis=axis)
    zeros_shape = list(cs.shape)
    zeros_shape[axis] = 1
    cs = np.concatenate([np.zeros(zeros_shape), cs], axis=axis)
    upper = [slice(None)] * cs.ndim
    lower = [slice(None)] * cs.ndim
    upper[axis] = slice(hi + pad_l + 1, hi + pad_l + 1 + m)
    lower[axis] = slice(lo + pad_l, lo + pad_l + m)
    return cs[tuple(upper)] - cs[tuple(lower)]


# ---------------------------------------------------------------------------
# Control function


def control_function(F, window, local="linf"):
    """Tabulate the local-component norm of F over every window translate.

    For measures with local component M this is the total variation
    ``|mu|(x.Q)`` at every grid point x.
    """
    local = normalize_local(local)
    if isinstance(F, DiscreteMeasure):
        if local != "m":
            raise InvalidElementError("measures carry the M local component")
        return _measure_control(F, window)
    grid = F.grid
    absF = np.abs(F.values)
    if isinstance(grid, (UniformGrid, LatticeGrid)) and isinstance(window, BoxWindow):
        los, his = box_index_offsets(window, grid)
        if local == "linf":
            out = absF
            for ax, (lo, hi) in enumerate(zip(los, his)):
                out = _sliding_max(out, ax, lo, hi)
            return SampledFunction(grid, out)
        # l1 and m coincide on functions: integrate |F| over the translate
        out = absF * grid.weights
        for ax, (lo, hi) in enumerate(zip(los, his)):
            out = _sliding_sum(out, ax, lo, hi)
        return SampledFunction(grid, out)
    if isinstance(grid, AxbGrid) and isinstance(window, AxbWindow) and grid.group.n == 1:
        return _axb_control(F, window, local)
    return _generic_control(F, window, local)


def _axb_control(F, window, local):
    """Separable two-stage control on (x, log a) grids, dimension one."""
    grid = F.grid
    absF = np.abs(F.values)  # shape (nx, na)
    d_u = int(np.floor(np.log(window.beta) / grid.u_step * (1 + _TOL) + _TOL))
    a_axis = grid.axes[-1]
    hx = float(grid.x_steps[0])
    if local == "linf":
        staged = _sliding_max(absF, 1, -d_u, d_u)
        out = np.empty_like(staged)
        for j, a in enumerate(a_axis):
            d_x = int(np.floor(window.radius * a / hx * (1 + _TOL) + _TOL))
            out[:, j] = _sliding_max(staged[:, j], 0, -d_x, d_x)
        return SampledFunction(grid, out)
    row_w = grid.u_step * a_axis ** (-float(grid.group.n))
    staged = _sliding_sum(absF * row_w, 1, -d_u, d_u)
    out = np.empty_like(staged)
    for j, a in enumerate(a_axis):
        d_x = int(np.floor(window.radius * a / hx * (1 + _TOL) + _TOL))
        out[:, j] = _sliding_sum(staged[:, j], 0, -d_x, d_x)
    return SampledFunction(grid, out * hx)


def _generic_control(F, window, local):
    """Per-point membership fallback; quadratic in grid size."""
    grid = F.grid
    pts = grid.points()
    if len(pts) > 20000:
        raise EmptyGridError(
            "generic control path refuses grids beyond 20k points; "
            "use a box/affine window on a matching grid"
        )
    absF = np.abs(F.values).ravel()
    w = grid.weights.ravel()
    out = np.empty(len(pts))
    for i, x in enumerate(pts):
        mask = window.contains(grid.group, x, pts)
        if local == "linf":
            out[i] = absF[mask].max(initial=0.0)
        else:
            out[i] = float(np.sum(absF[mask] * w[mask]))
    return SampledFunction(grid, out.reshape(grid.shape))


def _measure_control(mu, window):
    if mu.density is not None:
        grid = mu.density.grid
        out = control_function(mu.density, window, "l1").values.copy()
    else:
        if not mu.atoms:
            raise EmptyGridError("measure has neither atoms nor density")
        if mu.grid is None:
            raise EmptyGridError("atom-only measures need an attached grid")
        grid = mu.grid
        out = np.zeros(grid.shape)
    for z, mass in mu.atoms:
        out += abs(mass) * _atom_region(grid, window, z)
    return SampledFunction(grid, out)


def _atom_region(grid, window, z):
    """Indicator over grid points x of ``z in x . window``."""
    if isinstance(window, BoxWindow):
        lo = np.asarray(window.lo)
        hi = np.asarray(window.hi)
        pts = grid.points()
        rel = z - pts
        scale = np.maximum(np.abs(lo), np.abs(hi)) + 1.0
        mask = np.all((rel >= lo - _TOL * scale) & (rel <= hi + _TOL * scale), axis=-1)
        return mask.reshape(grid.shape).astype(float)
    if isinstance(window, AxbWindow):
        pts = grid.points()
        mask = window.contains(grid.group, pts, z)
        return mask.reshape(grid.shape).astype(float)
    raise InvalidElementError(f"unsupported window type {type(window).__name__}")


# ---------------------------------------------------------------------------
# Amalgam norms


def amalgam_norm(F, window, local, component, overflow_guard=DEFAULT_OVERFLOW_GUARD):
    """Quasi-norm of F in W(local, component, window)."""
    control = control_function(F, window, local)
    if normalize_local(local) == "linf" and np.max(control.values, initial=0.0) > overflow_guard:
        return OVERFLOW
    return quasi_norm(component, control, overflow_guard)


def local_norms_bupu(F, bupu, local):
    """Per-member local norms ``||F psi_i||_B``."""
    local = normalize_local(local)
    if isinstance(F, DiscreteMeasure):
        if local != "m":
            raise InvalidElementError("measures carry the M local component")
        out = np.zeros(len(bupu))
        for i in range(len(bupu)):
            for z, mass in F.atoms:
                out[i] += abs(mass) * float(bupu.member_value_at(i, z[None, :])[0])
            if F.density is not None:
                member = bupu.member(i)
                out[i] += haar_integral(abs(F.density) * member.values)
        return out
    if F.grid is not bupu.grid and F.grid.shape != bupu.grid.shape:
        raise DimensionMismatchError("function and BUPU live on different grids")
    flat = np.abs(F.values).ravel()
    w = F.grid.weights.ravel()
    out = np.empty(len(bupu))
    for i, (idx, vals) in enumerate(zip(bupu.member_indices, bupu.member_values)):
        if idx.size == 0:
            out[i] = 0.0
            continue
        piece = flat[idx] * vals
        out[i] = piece.max() if local == "linf" else float(np.sum(piece * w[idx]))
    return out


def local_norms_indicator(F, X, window, local):
    """Per-point local norms ``||F chi_{x_i . window}||_B``."""
    local = normalize_local(local)
    grid = F.grid
    masks = X.cell_masks(window, grid)
    flat = np.abs(F.values).ravel()
    w = grid.weights.ravel()
    out = np.empty(len(X))
    for i, idx in enumerate(masks):
        if idx.size == 0:
            out[i] = 0.0
        elif local == "linf":
            out[i] = flat[idx].max()
        else:
            out[i] = float(np.sum(flat[idx] * w[idx]))
    return out


def discrete_amalgam_norm(F, bupu, local, component, window=None,
                          variant="bupu", overflow_guard=DEFAULT_OVERFLOW_GUARD):
    """Equivalent discrete quasi-norm through a BUPU (or indicator system).

    Computes the Y_d(X) norm of the member-wise local norms; ``window``
    defaults to the BUPU's size window.
    """
    window = window if window is not None else bupu.size_window
    if variant == "bupu":
        coeffs = local_norms_bupu(F, bupu, local)
    elif variant == "indicator":
        coeffs = local_norms_indicator(F, bupu.base_set, window, local)
    else:
        raise InvalidElementError(f"unknown discrete variant {variant!r}")
    grid = F.grid if not isinstance(F, DiscreteMeasure) else bupu.grid
    seq = DiscreteSequence(coeffs, bupu.base_set, component, window)
    return sequence_norm(seq, grid, overflow_guard)


# ---------------------------------------------------------------------------
# Translations and involutions


def translate(F, g, direction="left", coverage_warn=1e-6):
    """Translate a sampled function or discrete measure.

    Directions: "left" is L_g F = F(g^{-1} .), "right" is R_g F = F(. g),
    and "measure" is the measure action A_g = modular(g^{-1}) R_{g^{-1}}.
    Off-grid values are linearly interpolated (in log-scale coordinates on
    ax+b, exactly on the integer lattice).
    """
    direction = _normalize_direction(direction)
    if isinstance(F, DiscreteMeasure):
        return _translate_measure(F, g, direction)
    grid = F.grid
    group = grid.group
    g = group.check_element(np.asarray(g, dtype=float))
    pts = grid.points()
    if direction == "left":
        args = group.multiply(group.inverse(g), pts)
        factor = 1.0
    elif direction == "right":
        args = group.multiply(pts, g)
        factor = 1.0
    else:  # measure action on a density
        ginv = group.inverse(g)
        args = group.multiply(pts, ginv)
        factor = float(group.modular(ginv))
    vals = factor * F.eval_at(args).reshape(grid.shape)
    out = SampledFunction(grid, vals)
    _warn_coverage(F, out, coverage_warn)
    return out


def _normalize_direction(direction):
    d = str(direction).lower()
    aliases = {"l": "left", "left": "left", "r": "right", "right": "right",
               "a": "measure", "measure": "measure"}
    if d not in aliases:
        raise InvalidElementError(f"unknown translation direction {direction!r}")
    return aliases[d]


def _translate_measure(mu, g, direction):
    group = mu.group
    g = group.check_element(np.asarray(g, dtype=float))
    if direction != "measure":
        raise InvalidElementError("measures translate through the measure action")
    atoms = [(group.multiply(z, g), m) for z, m in mu.atoms]
    density = None
    if mu.density is not None:
        density = translate(mu.density, g, "measure")
    return DiscreteMeasure(group, atoms, density, grid=mu.grid)


def _warn_coverage(before, after, threshold):
    mass_before = float(np.sum(np.abs(before.values) * before.grid.weights))
    if mass_before <= 0:
        return
    mass_after = float(np.sum(np.abs(after.values) * after.grid.weights))
    if mass_after < threshold * mass_before:
        warnings.warn(
            f"translation pushed the support off the window "
            f"(kept mass fraction {mass_after / mass_before:.2e})",
            CoverageWarning,
            stacklevel=3,
        )


def involution(F, kind="reverse"):
    """Involutions: reverse F(x^{-1}), its conjugate, and the adjoint
    ``modular(x^{-1}) conj(F(x^{-1}))`` that absorbs the Haar module."""
    kinds = {"reverse": "reverse", "vee": "reverse",
             "conj_reverse": "conj_reverse", "nabla": "conj_reverse",
             "adjoint": "adjoint", "star": "adjoint"}
    k = kinds.get(str(kind).lower())
    if k is None:
        raise InvalidElementError(f"unknown involution {kind!r}")
    grid = F.grid
    group = grid.group
    pts = grid.points()
    inv = group.inverse(pts)
    vals = F.eval_at(inv).reshape(grid.shape)
    if k in ("conj_reverse", "adjoint"):
        vals = np.conj(vals)
    if k == "adjoint":
        vals = vals * group.modular(inv).reshape(grid.shape)
    return SampledFunction(grid, vals)


# ---------------------------------------------------------------------------
# Translation-operator-norm certificates


@dataclass
class OperatorNormBound:
    """Two-sided certificate for a translation operator norm.

    ``lower`` is a max ratio over a finite test family (always a valid
    lower bound); ``upper`` is the sequence-space route times the recorded
    discrete-equivalence bracket, an upper certificate only up to that
    empirical bracket.
    """

    lower: float
    upper: float
    sequence_ratio: float
    bracket: float
    direction: str
    g: tuple

    def as_record(self):
        return {
            "lower": self.lower,
            "upper": self.upper,
            "sequence_ratio": self.sequence_ratio,
            "bracket": self.bracket,
            "direction": self.direction,
            "g": list(self.g),
        }


def _unclipped_cells(X, window, grid):
    """Cells that stay clear of the outermost ring of the truncation window."""
    masks = X.cell_masks(window, grid)
    shape = np.array(grid.shape)
    ok = np.zeros(len(masks), dtype=bool)
    for i, flat in enumerate(masks):
        if flat.size == 0:
            continue
        idx = np.stack(np.unravel_index(flat, grid.shape), axis=-1)
        ok[i] = bool(np.all(idx >= 1) and np.all(idx <= shape - 2))
    return ok


def calibrate_equivalence_bracket(space, bupu, family, overflow_guard=DEFAULT_OVERFLOW_GUARD):
    """Empirical discrete/continuous equivalence constant over a family."""
    worst = 1.0
    for F in family:
        cont = amalgam_norm(F, space.window, space.local, space.global_component,
                            overflow_guard)
        disc = discrete_amalgam_norm(F, bupu, space.local, space.global_component,
                                     overflow_guard=overflow_guard)
        if is_overflow(cont) or is_overflow(disc) or cont <= 0 or disc <= 0:
            continue
        worst = max(worst, disc / cont, cont / disc)
    return worst


def estimate_translation_operator_norm(space, g, direction, *, grid,
                                       test_family=(), well_spread=None,
                                       coeff_count=32, rng=None,
                                       bracket_constant=1.0,
                                       overflow_guard=DEFAULT_OVERFLOW_GUARD):
    """Certify ``|||T_g|W(B,Y)|||`` by a (lower, upper) interval.

    The lower bound maximizes norm ratios over the test family. The upper
    bound compares sequence norms over translated windows (right/measure
    directions) or translated point sets (left), maximized over random
    nonnegative coefficient vectors, and scales by the squared equivalence
    bracket (one factor per switch between continuous and discrete norms).
    """
    direction = _normalize_direction(direction)
    if not test_family and well_spread is None:
        raise EmptyGridError("estimator needs a test family or a well-spread set")
    group = grid.group
    g = group.check_element(np.asarray(g, dtype=float))

    lower = 0.0
    for F in test_family:
        base = amalgam_norm(F, space.window, space.local, space.global_component,
                            overflow_guard)
        moved = translate(F, g, "left" if direction == "left" else direction,
                          coverage_warn=0.0)
        shifted = amalgam_norm(moved, space.window, space.local,
                               space.global_component, overflow_guard)
        if is_overflow(base) or is_overflow(shifted) or base <= 0:
            continue
        lower = max(lower, shifted / base)

    ratio = 0.0
    if well_spread is not None:
        rng = np.random.default_rng(0) if rng is None else rng
        modular_factor = 1.0
        if direction == "left":
            # the norm of L_g is governed by how much cheaper the cells of
            # the pulled-back set g^{-1}X measure the same coefficients
            base_X, base_U = well_spread.translated(group.inverse(g),
                                                    side="left"), space.window
            moved_X = well_spread
            moved_U = space.window
        else:
            gg = g if direction == "right" else group.inverse(g)
            if direction == "measure":
                modular_factor = float(group.modular(group.inverse(g)))
            base_X, base_U = well_spread, space.window
            moved_X = well_spread
            if isinstance(space.window, AxbWindow):
                # cover the translated cell by the same-center inflated set,
                # the form the doubling bound controls
                moved_U = AxbCoverWindow.for_right_translate(space.window, gg)
            else:
                moved_U = right_translate(space.window, gg)
        # cells clipped by the truncation window would fake ratios that the
        # whole-space norms do not have; scan interior coefficients only
        ok = _unclipped_cells(base_X, base_U, grid) & _unclipped_cells(
            moved_X, moved_U, grid)
        vectors = [np.abs(rng.standard_normal(len(well_spread))) * ok
                   for _ in range(coeff_count)]
        # one-hot vectors extremize per-cell ratios for solid norms
        vectors.extend(row for row in np.eye(len(well_spread))[ok])
        for lam in vectors:
            num = sequence_norm(
                DiscreteSequence(lam, moved_X, space.global_component, moved_U),
                grid, overflow_guard)
            den = sequence_norm(
                DiscreteSequence(lam, base_X, space.global_component, base_U),
                grid, overflow_guard)
            if is_overflow(num) or is_overflow(den) or den <= 0:
                continue
            ratio = max(ratio, num / den)
        ratio *= modular_factor
    upper = bracket_constant**2 * ratio if ratio > 0 else np.inf
    upper = max(upper, lower)
    return OperatorNormBound(lower=lower, upper=float(upper),
                             sequence_ratio=float(ratio),
                             bracket=float(bracket_constant),
                             direction=direction, g=tuple(g.tolist()))
