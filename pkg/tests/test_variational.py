"""Jacobi lengths, the generating function, and discrete actions of cycles."""

import math

import numpy as np
import pytest
from scipy.integrate import quad, solve_ivp

from refbilliard import (PerturbationProfile, circular_shift, discrete_action,
                         generating_function, inner_arc_fixed_ends,
                         inner_distance, jacobi_length, maupertuis_product,
                         outer_distance, outer_propagate, outer_transit,
                         potential, shift_inverse_all)
from refbilliard.errors import RangeEmpty


def test_jacobi_length_outer_against_time_quadrature(fig1, circle):
    arc = outer_transit(0.3, 0.8, circle, fig1)

    def integrand(t):
        z, v = outer_propagate(arc.p0, arc.v0, t, fig1)
        return abs(v) * math.sqrt(potential(z, "outer", fig1))

    oracle = quad(integrand, 0.0, arc.duration, epsabs=1e-13,
                  epsrel=1e-13, limit=200)[0]
    assert jacobi_length(arc, fig1) == pytest.approx(oracle, abs=1e-9)


def test_jacobi_length_inner_against_ode_quadrature(fig1, circle):
    arc = inner_arc_fixed_ends(0.0, 2.2, circle, fig1, branch="direct")
    mu = fig1.mass_mu

    def rhs(_, y):
        r3 = (y[0] ** 2 + y[1] ** 2) ** 1.5
        return [y[2], y[3], -mu * y[0] / r3, -mu * y[1] / r3]

    sol = solve_ivp(rhs, (0.0, arc.duration),
                    [arc.p0.real, arc.p0.imag, arc.v0.real, arc.v0.imag],
                    rtol=1e-12, atol=1e-14, dense_output=True)

    def integrand(t):
        x, y, vx, vy = sol.sol(t)
        return math.hypot(vx, vy) * math.sqrt(
            fig1.kepler_energy + mu / math.hypot(x, y))

    oracle = quad(integrand, 0.0, arc.duration, epsabs=1e-13,
                  epsrel=1e-13, limit=200)[0]
    assert jacobi_length(arc, fig1) == pytest.approx(oracle, abs=1e-8)


def test_length_squared_equals_twice_maupertuis(fig1, circle):
    # zero-energy arcs attain the Cauchy-Schwarz bound L^2 = 2 M
    outer = outer_transit(0.5, 0.6, circle, fig1)
    inner = inner_arc_fixed_ends(0.1, 1.8, circle, fig1, branch="winding")
    collision = inner_arc_fixed_ends(0.4, 0.4, circle, fig1)
    for arc in (outer, inner, collision):
        L = jacobi_length(arc, fig1)
        M = maupertuis_product(arc, fig1)
        assert L * L == pytest.approx(2.0 * M, rel=1e-9)


def test_distances_are_symmetric_and_positive(fig1, circle):
    dE = outer_distance(0.2, 1.1, circle, fig1)
    dI = inner_distance(0.2, 1.1, circle, fig1)
    assert dE > 0 and dI > 0
    assert outer_distance(1.1, 0.2, circle, fig1) == pytest.approx(
        dE, abs=1e-11)
    assert inner_distance(1.1, 0.2, circle, fig1) == pytest.approx(
        dI, abs=1e-11)


def test_shift_inverse_all_finds_every_family(fig1, light_mass):
    # fig1 twist folds, so one shift value is reached by two action families
    delta = circular_shift(1.2, fig1).total
    roots = shift_inverse_all(delta, fig1)
    assert len(roots) == 2
    assert any(abs(r - 1.2) < 1e-10 for r in roots)
    for r in roots:
        assert circular_shift(r, fig1).total == pytest.approx(delta, abs=1e-11)
    # the one-third-turn retrograde families of the light-mass well
    pair = shift_inverse_all(-2.0 * math.pi / 3.0, light_mass)
    assert len(pair) == 2
    assert pair[0] == pytest.approx(0.2157091846599272, abs=1e-9)
    assert pair[1] == pytest.approx(1.3080960254174632, abs=1e-9)


def test_generating_function_exact_on_circle(fig1, circle):
    I = 0.8
    shift = circular_shift(I, fig1)
    ev = generating_function(0.0, shift.total, circle, fig1, action_hint=I)
    assert ev.action_I0 == pytest.approx(I, abs=1e-10)
    assert ev.action_I1 == pytest.approx(I, abs=1e-10)
    # the stationary intermediate angle is the exterior landing point
    assert ev.xi_mid == pytest.approx(shift.f_val, abs=1e-10)
    # S equals the sum of the two link lengths through that point
    total_len = (outer_distance(0.0, shift.f_val, circle, fig1) +
                 inner_distance(shift.f_val, shift.total, circle, fig1,
                                lifted_sweep=shift.g_val + 2.0 * math.pi))
    assert ev.S_value == pytest.approx(total_len, abs=1e-9)


def test_generating_function_derivative_identities(fig1, circle):
    I = 0.8
    delta = circular_shift(I, fig1).total
    h = 1e-6

    def S(x0, x1):
        return generating_function(x0, x1, circle, fig1, action_hint=I,
                                   with_twist=False).S_value

    ev = generating_function(0.0, delta, circle, fig1, action_hint=I,
                             with_twist=False)
    dS0 = (S(h, delta) - S(-h, delta)) / (2 * h)
    dS1 = (S(0.0, delta + h) - S(0.0, delta - h)) / (2 * h)
    assert dS0 == pytest.approx(-ev.action_I0, abs=1e-7)
    assert dS1 == pytest.approx(ev.action_I1, abs=1e-7)


def test_generating_function_nondegeneracy_diagnostics(fig1, circle):
    I = 0.8
    delta = circular_shift(I, fig1).total
    ev = generating_function(0.0, delta, circle, fig1, action_hint=I)
    prof = circular_shift(ev.action_I0, fig1)
    # d^2 S / d xi_mid^2 = (f' + g')/(f' g') on the integrable map
    assert ev.nondeg_S == pytest.approx(
        (prof.f_prime + prof.g_prime) / (prof.f_prime * prof.g_prime),
        abs=1e-6)
    # mixed derivative -dI0/dxi1 = -1/(f' + g')
    assert ev.nondeg_twist == pytest.approx(
        -1.0 / prof.total_prime, abs=1e-6)


def test_generating_function_default_picks_largest_family(fig1, circle):
    delta = circular_shift(0.8, fig1).total
    ev = generating_function(0.0, delta, circle, fig1)
    others = shift_inverse_all(delta, fig1)
    assert ev.action_I0 == pytest.approx(max(others, key=abs), abs=1e-9)


def test_generating_function_unreachable_shift(fig1, circle):
    with pytest.raises(RangeEmpty):
        generating_function(0.0, -7.0, circle, fig1)


def test_discrete_action_gradient_vanishes_on_periodic_orbit(fig1, circle):
    roots = shift_inverse_all(2.0 * math.pi / 4.0, fig1)
    I_star = max(roots, key=abs)
    xs = [0.25 + k * math.pi / 2.0 for k in range(4)]
    W, grad = discrete_action(xs, 1, 4, circle, fig1, action_hint=I_star)
    assert W > 0
    assert np.max(np.abs(grad)) < 1e-11


def test_discrete_action_gradient_matches_finite_differences(fig1, circle):
    roots = shift_inverse_all(2.0 * math.pi / 4.0, fig1)
    I_star = max(roots, key=abs)
    xs = np.array([0.05, -0.03 + math.pi / 2, 0.02 + math.pi,
                   3 * math.pi / 2])
    W, grad = discrete_action(xs, 1, 4, circle, fig1, action_hint=I_star)
    h = 1e-6
    for k in range(4):
        xp = xs.copy()
        xp[k] += h
        xm = xs.copy()
        xm[k] -= h
        Wp, _ = discrete_action(xp, 1, 4, circle, fig1, action_hint=I_star)
        Wm, _ = discrete_action(xm, 1, 4, circle, fig1, action_hint=I_star)
        assert grad[k] == pytest.approx((Wp - Wm) / (2 * h), abs=1e-6)


def test_discrete_action_collision_cycle(fig1, circle):
    # (0, 1): radial bounce through the centre, stationary by symmetry
    W, grad = discrete_action([0.3], 0, 1, circle, fig1)
    assert W > 0
    assert abs(grad[0]) < 1e-12


def test_discrete_action_on_perturbed_boundary(fig1):
    prof = PerturbationProfile.cos_profile(2, 0.01)
    roots = shift_inverse_all(2.0 * math.pi / 4.0, fig1)
    I_star = max(roots, key=abs)
    xs = np.array([0.0, math.pi / 2, math.pi, 3 * math.pi / 2])
    W, grad = discrete_action(xs, 1, 4, prof, fig1, action_hint=I_star)
    h = 1e-6
    xp = xs.copy()
    xp[2] += h
    xm = xs.copy()
    xm[2] -= h
    Wp, _ = discrete_action(xp, 1, 4, prof, fig1, action_hint=I_star)
    Wm, _ = discrete_action(xm, 1, 4, prof, fig1, action_hint=I_star)
    assert grad[2] == pytest.approx((Wp - Wm) / (2 * h), abs=1e-6)
