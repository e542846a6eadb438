"""Affine-group specialization: discrete mixed norms, bounds, convolution."""

import math
import warnings

import numpy as np
import pytest

from wamalgam import (
    AmalgamSpace,
    AxbGrid,
    AxbWindow,
    DiscreteSequence,
    MixedLpq,
    SampledFunction,
    WeightedLp,
    amalgam_norm,
    build_axb_lattice,
    check_doubling,
    compute_ball_weights,
    constant_weight,
    estimate_translation_operator_norm,
    exponential_weight,
    generator,
    is_overflow,
    lpq_discrete_norm,
    power_weight,
    quasi_norm,
    right_translation_bound,
    sequence_norm,
    shifted_power_weight,
    translation_bound_weight,
    verify_axb_convolution,
)
from wamalgam.errors import IndexMismatchError, WeightDomainError
from wamalgam.families import axb_bump_sum


@pytest.fixture(scope="module")
def lattice(axb_grid):
    return build_axb_lattice(0.5, 2.0, j_range=(-2, 2), grid=axb_grid,
                             x_extent=6.0)


def _level_index(X, k, j):
    return [i for i, (kk, jj) in enumerate(X.labels) if kk == (k,) and jj == j][0]


# ---------------------------------------------------------------------------
# Ball-weight tables


def test_ball_weights_volume(lattice):
    table = compute_ball_weights(constant_weight(1.0), lattice)
    assert np.allclose(table.values, 2.0 * lattice.points[:, -1], rtol=1e-6)


def test_ball_weights_shifted_power_analytic():
    X = build_axb_lattice(1.0, 2.0, k_range=(0, 0), j_range=(0, 0), n=1)
    table = compute_ball_weights(shifted_power_weight(1.0), X)
    # int_{-a}^{a} (1 + |y|) dy = 2a + a^2 at a = 1
    assert table.values[0] == pytest.approx(3.0, rel=1e-6)


def test_ball_weights_power_positive_interval():
    a = 0.25
    X = build_axb_lattice(3 * a, 2.0, k_range=(1, 1), j_range=(0, 0), n=1)
    X.points[0, -1] = a
    table = compute_ball_weights(power_weight(1.0), X)
    assert table.values[0] == pytest.approx(6 * a**2, rel=1e-4)


def test_ball_weights_index_mismatch(lattice):
    table = compute_ball_weights(constant_weight(1.0), lattice)
    with pytest.raises(IndexMismatchError):
        lpq_discrete_norm(np.ones(3), table, 1, 1)


# ---------------------------------------------------------------------------
# Discrete mixed norm


def test_lpq_single_coefficient(lattice):
    table = compute_ball_weights(constant_weight(1.0), lattice)
    lam = np.zeros(len(lattice))
    lam[_level_index(lattice, 0, 0)] = 1.0
    assert lpq_discrete_norm(lam, table, 1, 1) == pytest.approx(2.0, rel=1e-9)


def test_lpq_two_coefficients(lattice):
    table = compute_ball_weights(constant_weight(1.0), lattice)
    lam = np.zeros(len(lattice))
    lam[_level_index(lattice, 0, 0)] = 1.0
    lam[_level_index(lattice, 1, 0)] = 1.0
    assert lpq_discrete_norm(lam, table, 1, 1) == pytest.approx(4.0, rel=1e-9)


def test_lpq_sup_over_levels(lattice):
    table = compute_ball_weights(constant_weight(1.0), lattice)
    lam = np.zeros(len(lattice))
    lam[_level_index(lattice, 0, 0)] = 1.0   # level a = 1, inner = 2
    lam[_level_index(lattice, 0, 1)] = 1.0   # level a = 1/2, inner = 1
    assert lpq_discrete_norm(lam, table, 1.0, math.inf) == pytest.approx(2.0)


def test_lpq_matches_sequence_norm_bracket(axb_grid, lattice):
    """Both routes compute (L^{p,q}(v))_d; ratios stay in one bracket."""
    rng = generator(81)
    table = compute_ball_weights(constant_weight(1.0), lattice)
    Y = MixedLpq(1.0, 1.0, None, n=1)
    U = AxbWindow(1.0, 2.0)
    ratios = []
    for _ in range(50):
        lam = np.abs(rng.standard_normal(len(lattice)))
        direct = lpq_discrete_norm(lam, table, 1.0, 1.0)
        through_grid = sequence_norm(DiscreteSequence(lam, lattice, Y, U),
                                     axb_grid)
        ratios.append(through_grid / direct)
    ratios = np.asarray(ratios)
    assert ratios.max() / ratios.min() <= 4.0


# ---------------------------------------------------------------------------
# Right-translation bound


def test_translation_bound_identity():
    assert right_translation_bound([0.0], 1.0, 1, 1, 1.0) == pytest.approx(1.0)


def test_translation_bound_direct_substitutions():
    assert right_translation_bound([0.0], 2.0, 1, 1, 1.0, 1) == pytest.approx(4.0)
    assert right_translation_bound([3.0], 1.0, 0.5, 2.0, 1.0, 1) == pytest.approx(16.0)


def test_translation_bound_weight_matches_scalar():
    w = translation_bound_weight(1.0, 2.0, 1.5, 1)
    pts = np.array([[0.5, 2.0], [-3.0, 0.25]])
    for pt in pts:
        assert w(pt[None, :])[0] == pytest.approx(
            right_translation_bound(pt[:-1], pt[-1], 1.0, 2.0, 1.5, 1))


def test_estimator_upper_tracks_doubling_slope(axb):
    """log upper vs log(1+|y|) slope stays within 15% of alpha/p.

    A wide single-level lattice keeps every inflated cell inside the
    truncation window up to y = 32; the anchor exponent is the certified
    doubling exponent of the weight.
    """
    v = shifted_power_weight(1.0)
    rec = check_doubling(v, [0.0, 1.5, -3.0], [0.25, 0.5, 1.0, 2.0, 4.0, 8.0])
    # the cover ratio follows the worst-case exponent, not the average fit
    alpha = rec["alpha_max"]
    p = 1.0
    grid = AxbGrid(axb, -16.0, 16.0, 512, 0.05, 1.25, 32)
    X = build_axb_lattice(0.5, 2.0, j_range=(2, 2), grid=grid, x_extent=2.0)
    space = AmalgamSpace("linf", MixedLpq(p, 1.0, v, n=1), AxbWindow(0.5, 1.5))
    ys = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0]
    uppers = []
    for y in ys:
        ob = estimate_translation_operator_norm(
            space, [y, 1.0], "right", grid=grid, well_spread=X,
            rng=generator(9), coeff_count=8, bracket_constant=1.0)
        uppers.append(ob.sequence_ratio)
    xs = np.log1p(np.asarray(ys))
    slope = np.polyfit(xs, np.log(uppers), 1)[0]
    assert abs(slope - alpha / p) <= 0.15 * (alpha / p)


def test_estimator_scale_direction_tracks_b_power(axb_grid, lattice):
    """Pure dilations (0, b): sequence ratio scales like b^{-n/q}."""
    q = 1.0
    space = AmalgamSpace("linf", MixedLpq(1.0, q, None, n=1), AxbWindow(0.5, 1.5))
    ratios = []
    bs = [1.0, 2.0]
    for b in bs:
        ob = estimate_translation_operator_norm(
            space, [0.0, b], "right", grid=axb_grid, well_spread=lattice,
            rng=generator(10), coeff_count=8, bracket_constant=1.0)
        ratios.append(ob.sequence_ratio)
    got = ratios[1] / ratios[0]
    assert got == pytest.approx(2.0 ** (-1.0 / q), rel=0.35)


# ---------------------------------------------------------------------------
# Window drift of the discrete norm (the doubling mechanism)


def _window_drift(weight, p, q, axb_grid, lattice, n_coeffs=20):
    rng = generator(82)
    Y = MixedLpq(p, q, weight, n=1)
    U1, U2 = AxbWindow(1.0, 2.0), AxbWindow(2.0, 4.0)
    drift = []
    for _ in range(n_coeffs):
        lam = np.abs(rng.standard_normal(len(lattice)))
        n1 = sequence_norm(DiscreteSequence(lam, lattice, Y, U1), axb_grid)
        n2 = sequence_norm(DiscreteSequence(lam, lattice, Y, U2), axb_grid)
        drift.append(n2 / n1)
    return np.asarray(drift)


@pytest.mark.parametrize("weight,p,q", [
    (None, 1.0, 1.0),
    (shifted_power_weight(2.0), 1.0, 1.0),
    (shifted_power_weight(2.0), 0.5, 1.0),
])
def test_window_drift_bounded_by_doubling_factor(axb_grid, lattice, weight, p, q):
    v = weight if weight is not None else constant_weight(1.0)
    rec = check_doubling(v, [0.0, 1.5, -3.0], [0.25, 0.5, 1.0, 2.0])
    assert rec["passed"]
    c, alpha = rec["c"], rec["alpha"]
    drift = _window_drift(weight, p, q, axb_grid, lattice)
    # ball factor (c (s/r)^alpha)^{1/p} and scale-interval factor in 1/q
    beta_factor = ((4.0 - 1.0 / 4.0) / (2.0 - 1.0 / 2.0)) ** (1.0 / q)
    bound = (c * 2.0**alpha) ** (1.0 / p) * beta_factor
    assert drift.max() <= bound * (1 + 1e-6)
    assert drift.min() >= 1.0 - 1e-6  # windows are nested


def test_window_drift_blows_up_for_exponential_weight(axb):
    """Non-doubling weights lose window independence along the scale ladder.

    For e^{|x|} the per-cell drift between U(1,2) and U(2,4) behaves like
    the ball-doubling ratio at radius a, so the same octave growth rule
    that rejects the weight in check_doubling fires here.
    """
    v = exponential_weight()
    Y = MixedLpq(1.0, 1.0, v, n=1)
    U1, U2 = AxbWindow(1.0, 2.0), AxbWindow(2.0, 4.0)
    grid = AxbGrid(axb, -40.0, 40.0, 640, 1.0 / 16.0, 64.0, 64)
    drifts = []
    for scale in (1.0, 2.0, 4.0, 8.0):
        X = build_axb_lattice(0.5, 2.0, k_range=(0, 0), j_range=(0, 0), n=1,
                              grid=grid)
        X.points[0, -1] = scale
        lam = np.ones(1)
        n1 = sequence_norm(DiscreteSequence(lam, X, Y, U1), grid)
        n2 = sequence_norm(DiscreteSequence(lam, X, Y, U2), grid)
        drifts.append(n2 / n1)
    growth = np.diff(np.log(np.log(np.asarray(drifts))))
    # sustained growth of the log-drift, the check_doubling rejection shape
    assert np.all(np.asarray(drifts)[1:] / np.asarray(drifts)[:-1] > 1.5)
    assert np.all(growth > 0.0)


def test_weight_quotient_unbounded_but_amalgam_window_stable(axb_grid):
    """v(x + a y)/v(x) is unbounded over a for fixed y (no submultiplicative
    majorant), while the W(Linf, L^{p,q}(v)) window equivalence still holds."""
    v = shifted_power_weight(2.0)
    y = 1.0
    sup_per_a = []
    for A in (1.0, 4.0, 16.0, 64.0):
        xs = np.linspace(-8, 8, 400)
        sup_per_a.append(float(np.max(v((xs + A * y)[:, None]) / v(xs[:, None]))))
    assert all(np.diff(sup_per_a) > 0)
    assert sup_per_a[-1] >= 100.0  # no bound in a: grows without saturation

    rng = generator(83)
    space1 = AmalgamSpace("linf", MixedLpq(1.0, 1.0, v, n=1), AxbWindow(0.5, 1.5))
    space2 = AmalgamSpace("linf", MixedLpq(1.0, 1.0, v, n=1), AxbWindow(1.0, 2.0))
    ratios = []
    for _ in range(8):
        F = axb_bump_sum(rng).sample(axb_grid)
        n1 = amalgam_norm(F, space1.window, "linf", space1.global_component)
        n2 = amalgam_norm(F, space2.window, "linf", space2.global_component)
        ratios.append(n2 / n1)
    ratios = np.asarray(ratios)
    assert ratios.max() / ratios.min() <= 4.0


# ---------------------------------------------------------------------------
# The new convolution relation


def test_axb_convolution_relation_constant_weight(axb_grid):
    rng = generator(84)
    left = [axb_bump_sum(rng) for _ in range(4)]
    right = [axb_bump_sum(rng) for _ in range(4)]
    report = verify_axb_convolution(constant_weight(1.0), 1.0, 1.0, left, right,
                                    grid=axb_grid, levels=2)
    assert report.passed
    assert np.isfinite(report.c_emp)
    t = report.refinement_trace
    assert abs(t[1] - t[0]) <= 0.25 * t[0]


def test_axb_convolution_negative_control(axb_grid):
    """Dropping the translation-bound weight must inflate the constant as
    right factors are pushed outward; the weighted run stays flat."""
    v = shifted_power_weight(2.0)
    rec = check_doubling(v, [0.0, 1.5, -3.0], [0.5, 1.0, 2.0])
    alpha = rec["alpha"]
    shifts = [0.0, 2.0, 4.0]
    c_weighted, c_flat = [], []
    for shift in shifts:
        rng = generator(85)
        left = [axb_bump_sum(rng, x_range=(-1.0, 1.0)) for _ in range(3)]
        right = [axb_bump_sum(rng, x_range=(shift - 0.5, shift + 0.5))
                 for _ in range(3)]
        rep_w = verify_axb_convolution(v, 1.0, 1.0, left, right, grid=axb_grid,
                                       levels=1, alpha=alpha)
        rep_f = verify_axb_convolution(v, 1.0, 1.0, left, right, grid=axb_grid,
                                       levels=1, alpha=alpha,
                                       right_weight=constant_weight(1.0))
        c_weighted.append(rep_w.c_emp)
        c_flat.append(rep_f.c_emp)
    assert c_flat[-1] / c_flat[0] >= 2.0 * c_weighted[-1] / c_weighted[0]


def test_axb_convolution_requires_doubling_weight(axb_grid):
    with pytest.raises(WeightDomainError):
        verify_axb_convolution(exponential_weight(), 1.0, 1.0, [], [],
                               grid=axb_grid)


def test_measure_action_estimator_matches_bound_shape(axb_grid, lattice):
    """The measure-action certificate at pure dilations scales like the
    right-translation bound b^{n(1+1/q)}."""
    space = AmalgamSpace("linf", MixedLpq(1.0, 1.0, None, n=1),
                         AxbWindow(0.5, 1.5))
    vals = {}
    for b in (1.0, 2.0):
        ob = estimate_translation_operator_norm(
            space, [0.0, b], "measure", grid=axb_grid, well_spread=lattice,
            rng=generator(17), coeff_count=8, bracket_constant=1.0)
        vals[b] = ob.sequence_ratio
    want = (right_translation_bound([0.0], 2.0, 1, 1, 1.0, 1)
            / right_translation_bound([0.0], 1.0, 1, 1, 1.0, 1))
    assert vals[2.0] / vals[1.0] == pytest.approx(want, rel=0.05)
