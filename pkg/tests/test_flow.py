import numpy as np
import pytest

from liouvol.action import liouville_action
from liouvol.curves import circle_curve, ellipse_curve, polynomial_curve
from liouvol.errors import DomainError
from liouvol.flow import (BeltramiField, DistanceBoundParams, beltrami_step,
                          distance_bound, gradient_field, roundness_deficit,
                          run_flow)
from liouvol.mapping import conformal_map_pair
from liouvol.series import LaurentMap


def test_gradient_field_circle_is_zero(grid):
    field = gradient_field(LaurentMap(1.0), grid)
    w = 1.5 + 0.5j
    assert field(np.array([w]))[0] == 0
    assert field.sup_norm == 0
    assert field.wp_norm_sq == 0


def test_gradient_field_ellipse(grid, ellipse_maps):
    _, g = ellipse_maps
    field = gradient_field(g, grid)
    assert field.sup_norm <= 6.0 + 1e-9
    assert field.sup_norm > 0.1
    assert field.wp_norm_sq > 0


def test_gradient_wp_norm_matches_pairing(grid, ellipse_maps):
    from liouvol.action import first_variation_action
    _, g = ellipse_maps
    field = gradient_field(g, grid)
    pairing = first_variation_action(g, field, grid)
    assert abs(-pairing - field.wp_norm_sq) < 0.01 * field.wp_norm_sq


def test_beltrami_step_zero_field_or_time(grid, ellipse, ellipse_maps):
    _, g = ellipse_maps
    zero = BeltramiField(lambda w: np.zeros_like(w), 0.0, 0.0, g)
    moved = beltrami_step(ellipse, zero, 0.37, exterior=g, grid=grid,
                          order=64)
    # same curve as a point set (the refit may reparametrize the boundary)
    pts = moved.boundary(512)
    radial_gap = np.abs(pts) - 1.2 / np.sqrt(
        np.cos(np.angle(pts)) ** 2 + 1.44 * np.sin(np.angle(pts)) ** 2)
    assert np.max(np.abs(radial_gap)) < 1e-5
    same = beltrami_step(ellipse, gradient_field(g, grid), 0.0, exterior=g,
                         grid=grid)
    assert same is ellipse


def test_beltrami_step_regime_guard(grid, ellipse, ellipse_maps):
    _, g = ellipse_maps
    field = gradient_field(g, grid)
    with pytest.raises(DomainError):
        beltrami_step(ellipse, field, 1.0, exterior=g, grid=grid)


def test_beltrami_step_first_order_decrease(grid, ellipse, ellipse_maps):
    f, g = ellipse_maps
    field = gradient_field(g, grid)
    s0 = liouville_action(f, g, grid).total
    t = 1e-3
    moved = beltrami_step(ellipse, field, t, exterior=g, grid=grid, order=96)
    fm, gm = conformal_map_pair(moved, order=96, tol=1e-8)
    drop = liouville_action(fm, gm, grid).total - s0
    predicted = -t * field.wp_norm_sq
    assert abs(drop - predicted) < 0.1 * abs(predicted)


def test_beltrami_step_detects_self_intersection(grid, ellipse, ellipse_maps):
    from liouvol.errors import DeformationError
    _, g = ellipse_maps
    zero = BeltramiField(lambda w: np.zeros_like(w), 0.5, 0.0, g)
    z = ellipse.boundary(256)
    # engineered displacement pinching half the curve through the other
    fdot = -12.0 * z * (np.cos(np.angle(z)) > 0)
    with pytest.raises(DeformationError):
        beltrami_step(ellipse, zero, 0.15, exterior=g, grid=grid,
                      precomputed=(z, fdot))


def test_flow_circle_start_is_stationary(grid):
    states = run_flow(circle_curve(), max_steps=5, grid=grid, order=64)
    assert len(states) == 1
    assert states[0].action < 1e-9
    # one explicit step moves nothing
    g = LaurentMap(1.0)
    field = gradient_field(g, grid)
    moved = beltrami_step(circle_curve(), field, 1e-2, exterior=g, grid=grid,
                          order=64)
    assert np.max(np.abs(moved.series.coeffs[:2]
                         - np.array([0, 1]))) < 1e-9
    assert np.max(np.abs(moved.series.coeffs[2:])) < 1e-9


def test_first_order_slope_decay_along_gradient(grid, ellipse, ellipse_maps):
    f, g = ellipse_maps
    field = gradient_field(g, grid)
    s0 = liouville_action(f, g, grid).total
    errors = []
    for t in (1e-3, 5e-4, 2.5e-4):
        moved = beltrami_step(ellipse, field, t, exterior=g, grid=grid,
                              order=96)
        fm, gm = conformal_map_pair(moved, order=96, tol=1e-8)
        slope = (liouville_action(fm, gm, grid).total - s0) / t
        errors.append(abs(slope + field.wp_norm_sq))
    assert all(b <= 0.65 * a for a, b in zip(errors, errors[1:]))


def test_flow_wobble_roundness_decreases(grid):
    states = run_flow(polynomial_curve(0.0, 0.08), max_steps=30, grid=grid,
                      order=96)
    acts = [s.action for s in states]
    assert all(b <= a for a, b in zip(acts, acts[1:]))
    rough = [s.roundness for s in states]
    assert all(b <= a + 1e-12 for a, b in zip(rough[3:], rough[4:]))
    assert states[-1].action < 0.1 * states[0].action


def test_flow_energy_accounting(grid):
    states = run_flow(ellipse_curve(1.2, 1.0), max_steps=60, grid=grid,
                      order=96)
    acts = [s.action for s in states]
    assert all(b <= a for a, b in zip(acts, acts[1:]))
    drop = acts[0] - acts[-1]
    cumulative = sum(s.step_size * prev.grad_wp_norm_sq
                     for prev, s in zip(states, states[1:]))
    assert abs(cumulative - drop) <= 0.15 * drop
    # Nehari bound along the whole trajectory
    for s in states:
        f, g = conformal_map_pair(s.curve, order=96, tol=1e-7)
        assert gradient_field(g, grid).sup_norm <= 6.0 + 1e-9


def test_roundness_deficit_zero_on_circle():
    # floor set by the 4096-gon discretization of the length
    assert abs(roundness_deficit(circle_curve())) < 1e-6
    assert roundness_deficit(ellipse_curve(1.2, 1.0)) > 1e-3


def test_distance_bound_values():
    params = DistanceBoundParams(0.5, 2.0)
    assert distance_bound(0.0, params) == pytest.approx(1.0)   # K * c
    assert distance_bound(1.0, params) == pytest.approx(3.0)
    bounds = [distance_bound(s, params) for s in (0.0, 0.5, 1.0, 2.0)]
    assert all(b > a for a, b in zip(bounds, bounds[1:]))
    with pytest.raises(DomainError):
        DistanceBoundParams(-1.0, 2.0)
    with pytest.raises(DomainError):
        distance_bound(-0.1, params)
