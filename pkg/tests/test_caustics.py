"""Tangent circles of the integrable orbits and their perturbed envelopes."""

import math

import numpy as np
import pytest

from refbilliard import (PerturbationProfile, circular_caustic_radii,
                         envelope_equations, iterate, outer_propagate,
                         outgoing_state, outgoing_velocity, perturbed_caustic,
                         tangency_check)
from refbilliard.errors import (DegenerateEnvelope, OutOfActionRange)


def test_circular_radii_match_sampled_trajectory(fig1, circle):
    I0 = 1.0
    R_E, R_I = circular_caustic_radii(I0, fig1)
    tr = iterate(outgoing_state(0.0, I0, circle, fig1), 3, circle, fig1,
                 method="geometric")
    outer = next(a for a in tr.arcs if a.region == "outer")
    inner = next(a for a in tr.arcs if a.region == "inner")
    # oracle: extremal radius by dense sampling of the flows themselves
    ts = np.linspace(0.0, outer.duration, 20001)
    zs, _ = outer_propagate(outer.p0, outer.v0, ts, fig1)
    assert np.max(np.abs(zs)) == pytest.approx(R_E, abs=1e-6)
    us = np.linspace(0.0, 1.0, 20001)
    r_in = np.array([abs(inner.point(u)) for u in us])
    assert np.min(r_in) == pytest.approx(R_I, abs=1e-6)


def test_circular_radii_closed_forms(fig1):
    R_E, R_I = circular_caustic_radii(1.0, fig1)
    assert R_E == pytest.approx(math.sqrt(2.5 + math.sqrt(4.25)), abs=1e-12)
    # p = 2/mu = 1, e = sqrt(1 + 4*4.5/4) = sqrt(5.5)
    assert R_I == pytest.approx(1.0 / (1.0 + math.sqrt(5.5)), abs=1e-12)


def test_circular_radii_reject_radial_and_bound(fig1):
    with pytest.raises(OutOfActionRange):
        circular_caustic_radii(0.0, fig1)
    with pytest.raises(OutOfActionRange):
        circular_caustic_radii(fig1.action_bound_Ic, fig1)


def test_envelope_equations_vanish_on_circular_caustics(fig1, circle):
    I0 = 0.9
    R_E, R_I = circular_caustic_radii(I0, fig1)
    state = outgoing_state(0.3, I0, circle, fig1)
    v0 = outgoing_velocity(state, circle, fig1)
    from refbilliard import outer_conic_of
    conic = outer_conic_of(complex(math.cos(0.3), math.sin(0.3)), v0, fig1)
    # the outer ellipse touches the circle of radius R_E on its major axis
    pt = (R_E * math.cos(conic.tilt_angle), R_E * math.sin(conic.tilt_angle))
    G, dG = envelope_equations(0.3, pt, I0, "outer", circle, fig1)
    assert abs(G) < 1e-10
    assert abs(dG) < 1e-7


def test_envelope_equations_reject_radial_family(fig1, circle):
    with pytest.raises(DegenerateEnvelope):
        envelope_equations(0.0, (1.0, 0.0), 0.0, "outer", circle, fig1)
    with pytest.raises(ValueError):
        envelope_equations(0.0, (1.0, 0.0), 0.5, "sideways", circle, fig1)


def test_unperturbed_envelopes_recover_tangent_circles(fig1, circle):
    I0 = 1.0
    R_E, R_I = circular_caustic_radii(I0, fig1)
    for kind, R in (("outer", R_E), ("inner", R_I)):
        c = perturbed_caustic(I0, kind, circle, fig1, n_base=128)
        radii = np.hypot(c.samples[:, 1], c.samples[:, 2])
        assert np.max(np.abs(radii - R)) < 1e-9
        assert c.circular_radius == pytest.approx(R, abs=1e-12)
        assert c.max_envelope_residual < 1e-8
        # closed grid: endpoints at zeta = 0 and 2 pi, same point
        assert c.samples[0, 0] == 0.0
        assert c.samples[-1, 0] == pytest.approx(2.0 * math.pi, abs=1e-12)
        gap = math.hypot(c.samples[-1, 1] - c.samples[0, 1],
                         c.samples[-1, 2] - c.samples[0, 2])
        assert gap < 1e-6


def test_perturbed_envelope_stays_near_circle(fig1):
    prof = PerturbationProfile.cos_profile(2, 1e-3)
    I0 = 1.0
    R_E, R_I = circular_caustic_radii(I0, fig1)
    for kind, R in (("outer", R_E), ("inner", R_I)):
        c = perturbed_caustic(I0, kind, prof, fig1, n_base=128)
        radii = np.hypot(c.samples[:, 1], c.samples[:, 2])
        # deformation is of the order of the boundary perturbation
        assert np.max(np.abs(radii - R)) < 0.05 * R
        assert np.max(np.abs(radii - R)) > 1e-6
        assert c.max_envelope_residual < 1e-8
        gap = math.hypot(c.samples[-1, 1] - c.samples[0, 1],
                         c.samples[-1, 2] - c.samples[0, 2])
        assert gap < 1e-6


def test_tangency_of_integrable_orbits(fig1, circle):
    I0 = 1.0
    tr = iterate(outgoing_state(0.2, I0, circle, fig1), 40, circle, fig1,
                 method="geometric")
    for kind in ("outer", "inner"):
        c = perturbed_caustic(I0, kind, circle, fig1, n_base=128)
        assert tangency_check(tr, c) < 1e-9


def test_tangency_check_requires_geometric_arcs(fig1, circle):
    c = perturbed_caustic(1.0, "outer", circle, fig1, n_base=64)
    tr = iterate(outgoing_state(0.2, 1.0, circle, fig1), 5, circle, fig1)
    with pytest.raises(ValueError):
        tangency_check(tr, c)
