"""Harmonic-oscillator arcs outside the domain.

Outside the boundary the zero-energy motion follows z'' = -om z with
om = stiffness_om, i.e. an elliptic arc centred at the origin, traversed in
closed form.  This module provides the propagation, the polar-angle shift of
a full exterior arc as a function of launch angle (and its derivative and
inverse), the transit map from a boundary point, and the two-point boundary
problem for an exterior arc with prescribed endpoints.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from ._util import extend_and_find, first_crossing, wrap_pi
from .arcs import ArcSegment, OuterConic
from .boundary import PerturbationProfile, boundary
from .errors import (AntipodalEndpoints, DomainError, EnergyMismatch,
                     ShootingDiverged, TangentialCrossing)
from .params import PhysParams, _as_complex, potential


def outer_propagate(p0, v0, s, params: PhysParams):
    """Closed-form oscillator flow: positions and velocities at times ``s``.

    Returns ``(z, v)`` with the same shape as ``s`` (complex).  The pair
    ``(p0, v0)`` must satisfy the zero-energy relation |v|^2/2 = V_E(p0).
    """
    p0 = _as_complex(p0)
    v0 = _as_complex(v0)
    _check_outer_energy(p0, v0, params)
    w = params.omega
    s = np.asarray(s, dtype=float)
    z = p0 * np.cos(w * s) + v0 * np.sin(w * s) / w
    v = -p0 * w * np.sin(w * s) + v0 * np.cos(w * s)
    if np.ndim(z):
        return z, v
    return complex(z), complex(v)


def _check_outer_energy(p0: complex, v0: complex, params: PhysParams) -> None:
    ve = potential(p0, "outer", params)
    if ve <= 0.0:
        raise DomainError(
            f"point at radius {abs(p0):.6g} lies beyond the braking radius "
            f"{params.brake_radius:.6g}; no exterior motion there")
    err = abs(0.5 * abs(v0) ** 2 - ve)
    if err > 1e-9 * max(ve, 1.0):
        raise EnergyMismatch(
            f"|v|^2/2 differs from the exterior potential by {err:.3g}")


def outer_shift(alpha: float, params: PhysParams) -> float:
    """Polar-angle advance of one exterior arc launched at angle ``alpha``.

    ``alpha`` is measured from the outward normal of the unit circle toward
    the tangent, alpha in [-pi/2, pi/2].  Odd in alpha; tends to +-pi at the
    tangential limits.
    """
    if abs(alpha) > math.pi / 2 + 1e-15:
        raise DomainError("launch angle must lie in [-pi/2, pi/2]")
    if alpha == 0.0:
        return 0.0
    a = min(abs(alpha), math.pi / 2)
    if math.pi / 2 - a < 1e-15:
        return math.copysign(math.pi, alpha)
    K = 2.0 * params.energy_E - params.stiffness_om
    s2, c2 = math.sin(2 * a), math.cos(2 * a)
    x = (params.stiffness_om / K + c2) / s2
    theta = math.pi / 2 - math.atan(x)
    return math.copysign(theta, alpha)


def outer_shift_prime(alpha: float, params: PhysParams) -> float:
    """d(outer_shift)/d(alpha); even, positive, equal to (2E-om)/E at 0."""
    if abs(alpha) > math.pi / 2 + 1e-15:
        raise DomainError("launch angle must lie in [-pi/2, pi/2]")
    K = 2.0 * params.energy_E - params.stiffness_om
    om = params.stiffness_om
    c = math.cos(2 * alpha)
    return 2.0 * K * (K + om * c) / (K * K + om * om + 2.0 * K * om * c)


def outer_shift_inverse(theta: float, params: PhysParams) -> float:
    """Launch angle whose exterior arc advances the polar angle by ``theta``.

    The shift is an odd, strictly increasing bijection (-pi/2, pi/2) ->
    (-pi, pi), so the inverse exists for |theta| < pi.
    """
    if abs(theta) >= math.pi:
        raise DomainError("exterior arcs advance the angle by less than pi")
    if theta == 0.0:
        return 0.0
    t = abs(theta)
    a = brentq(lambda al: outer_shift(al, params) - t,
               1e-300, math.pi / 2 - 1e-15, xtol=1e-15, rtol=8.9e-16)
    return math.copysign(a, theta)


def outer_conic_of(p0, v0, params: PhysParams) -> OuterConic:
    """Oscillator ellipse through ``(p0, v0)`` (axes, tilt, degeneracy).

    The squared semi-axes are (E +- sqrt((E - om |p0|^2)^2 + om (p0.v0)^2))/om
    and the tilt is the major-axis direction, obtained from the rank-2 moment
    matrix p0 p0^T + q0 q0^T with q0 = v0/omega.  Radial arcs (zero angular
    momentum) collapse to a segment; they are flagged ``degenerate`` and keep
    the ray direction as tilt.
    """
    p0 = _as_complex(p0)
    v0 = _as_complex(v0)
    _check_outer_energy(p0, v0, params)
    E, om = params.energy_E, params.stiffness_om
    w = params.omega
    r2 = abs(p0) ** 2
    dot = p0.real * v0.real + p0.imag * v0.imag
    k_out = p0.real * v0.imag - p0.imag * v0.real
    disc = math.hypot(E - om * r2, math.sqrt(om) * dot)
    a_sq = (E + disc) / om
    b_sq = max((E - disc) / om, 0.0)
    scale = abs(p0) * abs(v0)
    if abs(k_out) <= 1e-12 * max(scale, 1.0):
        return OuterConic(semi_major_sq=a_sq, semi_minor_sq=0.0,
                          tilt_angle=math.atan2(p0.imag, p0.real) % math.pi,
                          degenerate=True)
    q0 = v0 / w
    S = np.array([[p0.real ** 2 + q0.real ** 2,
                   p0.real * p0.imag + q0.real * q0.imag],
                  [p0.real * p0.imag + q0.real * q0.imag,
                   p0.imag ** 2 + q0.imag ** 2]])
    vals, vecs = np.linalg.eigh(S)
    major = vecs[:, int(np.argmax(vals))]
    tilt = math.atan2(major[1], major[0]) % math.pi
    return OuterConic(semi_major_sq=a_sq, semi_minor_sq=b_sq,
                      tilt_angle=tilt, degenerate=False)


def outer_transit(xi0: float, alpha: float, profile: PerturbationProfile,
                  params: PhysParams) -> ArcSegment:
    """Exterior arc from boundary angle ``xi0`` back to its first re-entry.

    ``alpha`` is the launch angle from the outward unit normal toward the
    unit tangent.  Returns the :class:`ArcSegment` carrying endpoints,
    kinetic duration, lifted polar sweep and the supporting ellipse.
    """
    if abs(alpha) > math.pi / 2 - 1e-9:
        raise TangentialCrossing(
            "exterior launch is tangential; the transit is not defined")
    geom = boundary(xi0, profile)
    p0 = geom.point_c
    ve = potential(p0, "outer", params)
    if ve <= 0.0:
        raise DomainError(
            f"boundary radius {abs(p0):.6g} exceeds the braking radius")
    speed = math.sqrt(2.0 * ve)
    v0 = speed * (math.cos(alpha) * geom.normal_c +
                  math.sin(alpha) * geom.tangent_c)
    w = params.omega

    if profile.is_circle and abs(abs(p0) - 1.0) < 1e-12:
        om = params.stiffness_om
        B1 = (om * abs(p0) ** 2 - abs(v0) ** 2) / (2.0 * om)
        B2 = (p0.real * v0.real + p0.imag * v0.imag) / w
        s1 = -math.atan2(-B2, B1) / w
        sweep = outer_shift(alpha, params)
    else:
        def height(s):
            z = p0 * np.cos(w * s) + v0 * np.sin(w * s) / w
            return np.abs(z) - profile.radius(np.angle(z))

        s1 = first_crossing(height, np.linspace(0.0, 2 * math.pi / w * (1 + 1e-6), 4097),
                            inside_sign=+1.0)
        if s1 is None:
            s1 = extend_and_find(height, 0.0, 4 * math.pi / w, 8193, +1.0,
                                 max_doublings=2)
        zs, _ = outer_propagate(p0, v0, np.linspace(0.0, s1, 512), params)
        ang = np.unwrap(np.angle(zs))
        sweep = float(ang[-1] - ang[0])

    z1, v1 = outer_propagate(p0, v0, s1, params)
    xi1 = wrap_pi(math.atan2(z1.imag, z1.real))
    conic = outer_conic_of(p0, v0, params)
    conic = OuterConic(semi_major_sq=conic.semi_major_sq,
                       semi_minor_sq=conic.semi_minor_sq,
                       tilt_angle=conic.tilt_angle, duration_T=s1,
                       endpoints=(p0, z1), degenerate=conic.degenerate)
    return ArcSegment(region="outer", chart="global", p0=p0, v0=v0, p1=z1,
                      v1=v1, duration=s1, sweep=sweep, xi0=wrap_pi(xi0),
                      xi1=xi1, conic=conic, par=(w, s1), params=params)


def outer_arc_fixed_ends(xi0: float, xi1: float,
                         profile: PerturbationProfile, params: PhysParams,
                         lifted_delta: float | None = None) -> ArcSegment:
    """Exterior arc joining boundary angles ``xi0`` -> ``xi1``.

    ``lifted_delta`` fixes the signed polar advance when it differs from the
    wrapped difference xi1 - xi0.  On the circle this inverts the shift in
    closed form; otherwise the launch angle is found by a secant iteration on
    the transit's sweep.
    """
    delta = wrap_pi(xi1 - xi0) if lifted_delta is None else float(lifted_delta)
    if abs(delta) >= math.pi - 1e-9:
        raise AntipodalEndpoints(
            "exterior arcs cannot advance the polar angle by +-pi")
    alpha = outer_shift_inverse(delta, params)
    if profile.is_circle:
        return outer_transit(xi0, alpha, profile, params)

    def resid(a):
        return outer_transit(xi0, a, profile, params).sweep - delta

    lim = math.pi / 2 - 1e-9
    r = resid(alpha)
    for _ in range(40):
        if abs(r) < 1e-12:
            return outer_transit(xi0, alpha, profile, params)
        h = 1e-7
        slope = (resid(min(alpha + h, lim)) - r) / (min(alpha + h, lim) - alpha)
        if slope == 0.0 or not math.isfinite(slope):
            raise ShootingDiverged("flat residual in exterior arc shooting")
        alpha = float(np.clip(alpha - r / slope, -lim, lim))
        r = resid(alpha)
    raise ShootingDiverged(
        f"exterior two-point problem did not converge (residual {r:.3g})")
