"""Keplerian arcs inside the domain.

Inside the boundary the zero-energy motion is a Kepler hyperbola branch with
(positive) two-body energy E + h.  Arcs are propagated in closed form, either
in the polar conic chart or — near collision — in the Levi-Civita chart
w^2 = z, where the flow is a linear hyperbolic oscillator and passes smoothly
through the origin.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from ._util import extend_and_find, first_crossing, wrap_pi
from .arcs import ArcSegment, InnerConic
from .boundary import PerturbationProfile, boundary
from .errors import (AntipodalEndpoints, DomainError, EnergyMismatch,
                     ShootingDiverged, SingularityError, WindingChanged)
from .params import PhysParams, _as_complex, potential

#: pericenter radius below which transits switch to the Levi-Civita chart
PERICENTER_THRESHOLD = 1e-3


def kepler_elements(z0, v0, params: PhysParams) -> InnerConic:
    """Orbital elements of the interior hyperbola through ``(z0, v0)``.

    Uses the Laplace-Runge-Lenz vector, so the eccentricity and pericenter
    direction stay accurate down to zero angular momentum (radial rays have
    e = 1 exactly and are flagged ``is_collision``).
    """
    z0 = _as_complex(z0)
    v0 = _as_complex(v0)
    r = abs(z0)
    if r == 0.0:
        raise SingularityError("orbital elements are undefined at the centre")
    _check_inner_energy(z0, v0, params)
    mu = params.mass_mu
    k = z0.real * v0.imag - z0.imag * v0.real
    # e_vec = ((|v|^2 - mu/r) z - (z.v) v) / mu
    dot = z0.real * v0.real + z0.imag * v0.imag
    evec = ((abs(v0) ** 2 - mu / r) * z0 - dot * v0) / mu
    e = abs(evec)
    p = k * k / mu
    collision = abs(k) <= 1e-12 * max(r * abs(v0), 1.0)
    if collision:
        th_peri = cmath.phase(-z0)
        e = 1.0
        p = 0.0
    else:
        th_peri = cmath.phase(evec)
    return InnerConic(ang_momentum_k=k, semilatus_p=p, eccentricity_e=e,
                      pericenter_r=p / (1.0 + e), pericenter_angle=th_peri,
                      winding=0, is_collision=collision)


def _check_inner_energy(z0: complex, v0: complex, params: PhysParams) -> None:
    vi = potential(z0, "inner", params)
    err = abs(0.5 * abs(v0) ** 2 - vi)
    if err > 1e-9 * max(vi, 1.0):
        raise EnergyMismatch(
            f"|v|^2/2 differs from the interior potential by {err:.3g}")


def inner_shift(beta0: float, params: PhysParams) -> float:
    """Lifted polar-angle shift of one interior arc entering at angle ``beta0``.

    ``beta0`` is measured from the inward normal of the unit circle toward
    the tangent.  Odd in beta0, continuous on (0, pi/2] with limit 0 at 0+
    and -2*pi at pi/2; the geometric polar advance of the arc is this shift
    plus 2*pi*sign(beta0).
    """
    if abs(beta0) > math.pi / 2 + 1e-15:
        raise DomainError("entry angle must lie in [-pi/2, pi/2]")
    if beta0 == 0.0:
        return 0.0
    Eh = params.kepler_energy
    mu = params.mass_mu
    s2 = math.sin(beta0) ** 2
    num = 2.0 * (Eh + mu) * s2 - mu
    den = math.sqrt(4.0 * Eh * (Eh + mu) * s2 + mu * mu)
    # theta = 2 acos(num/den) - 2 pi, via half-angle forms that avoid the
    # precision loss of acos near +-1 (beta0 near 0 or pi/2); uses
    # den^2 - num^2 = 4 (Eh+mu)^2 s2 (1-s2) exactly
    G = 4.0 * (Eh + mu) ** 2 * s2 * (1.0 - s2)
    if num <= 0.0:
        theta = -4.0 * math.asin(min(
            math.sqrt(G / (2.0 * den * (den - num))), 1.0))
    else:
        theta = 4.0 * math.asin(min(
            math.sqrt(G / (2.0 * den * (den + num))), 1.0)) - 2.0 * math.pi
    return math.copysign(theta, -beta0) if theta != 0.0 else 0.0


def levi_civita_propagate(z0, v0, params: PhysParams,
                          profile: PerturbationProfile | None = None,
                          pericenter_threshold: float = PERICENTER_THRESHOLD,
                          force_chart: str | None = None) -> ArcSegment:
    """Interior transit from boundary state ``(z0, v0)`` to its first exit.

    Selects the polar conic chart, or the Levi-Civita chart when the
    pericenter radius falls below ``pericenter_threshold`` (or the angular
    momentum vanishes); ``force_chart`` ("closed" or "lc") overrides the
    choice.  Returns the :class:`ArcSegment` with endpoints, kinetic
    duration, lifted polar sweep and orbital elements.
    """
    profile = profile or PerturbationProfile.circle()
    z0 = _as_complex(z0)
    v0 = _as_complex(v0)
    conic = kepler_elements(z0, v0, params)
    chart = force_chart or (
        "lc" if (conic.is_collision or conic.pericenter_r < pericenter_threshold)
        else "closed")
    if chart not in ("closed", "lc"):
        raise ValueError(f"unknown chart {chart!r}")
    if chart == "closed" and conic.is_collision:
        raise DomainError("radial rays require the Levi-Civita chart")
    if chart == "closed":
        return _transit_closed(z0, v0, conic, profile, params)
    return _transit_lc(z0, v0, conic, profile, params)


def _transit_closed(z0: complex, v0: complex, conic: InnerConic,
                    profile: PerturbationProfile,
                    params: PhysParams) -> ArcSegment:
    k, e, p = conic.ang_momentum_k, conic.eccentricity_e, conic.semilatus_p
    sgn = 1.0 if k > 0 else -1.0
    r0 = abs(z0)
    rdot0 = (z0.real * v0.real + z0.imag * v0.imag) / r0
    f0 = _true_anomaly(r0, rdot0, k, p)
    th_peri = cmath.phase(z0) - sgn * f0
    f_asym = math.acos(-1.0 / e)

    if profile.is_circle and abs(r0 - 1.0) < 1e-12 and rdot0 < 0.0:
        f1 = -f0
    else:
        def gap(f):
            r = p / (1.0 + e * np.cos(f))
            return r - profile.radius(th_peri + sgn * f)

        f1 = first_crossing(gap, np.linspace(f0, f_asym - 1e-9, 2048),
                            inside_sign=-1.0)
        if f1 is None:
            raise DomainError("interior arc escapes without re-crossing "
                              "the boundary (boundary not star-shaped?)")

    r1 = p / (1.0 + e * math.cos(f1))
    th1 = th_peri + sgn * f1
    z1 = r1 * cmath.exp(1j * th1)
    rdot1 = e * math.sin(f1) * abs(k) / p
    v1 = (rdot1 + 1j * k / r1) * cmath.exp(1j * th1)
    sweep = sgn * (f1 - f0)
    dur = _kepler_time(f1, e, params) - _kepler_time(f0, e, params)
    xi0 = wrap_pi(cmath.phase(z0))
    xi1 = wrap_pi(th1)
    wind = int(round((sweep - wrap_pi(xi1 - xi0)) / (2.0 * math.pi)))
    conic = InnerConic(ang_momentum_k=k, semilatus_p=p, eccentricity_e=e,
                       pericenter_r=conic.pericenter_r,
                       pericenter_angle=th_peri, winding=wind,
                       is_collision=False)
    return ArcSegment(region="inner", chart="closed", p0=z0, v0=v0, p1=z1,
                      v1=v1, duration=dur, sweep=sweep, xi0=xi0, xi1=xi1,
                      conic=conic, par=(e, p, th_peri, sgn, f0, f1),
                      params=params)


def _true_anomaly(r: float, rdot: float, k: float, p: float) -> float:
    """True anomaly from the radial state: e sin f = p rdot/|k|, e cos f =
    p/r - 1.  The atan2 form stays accurate near f = +-pi (almost-radial
    arcs), where the acos of the cosine alone loses half the precision."""
    return math.atan2(p * rdot / abs(k), p / r - 1.0)


def _kepler_time(f: float, e: float, params: PhysParams) -> float:
    """Time from pericenter to true anomaly ``f`` on the hyperbola branch."""
    mu = params.mass_mu
    a = mu / (2.0 * params.kepler_energy)
    n_mean = math.sqrt(mu / a ** 3)
    sh = math.sqrt(e * e - 1.0) * math.sin(f) / (1.0 + e * math.cos(f))
    H = math.asinh(sh)
    return (e * math.sinh(H) - H) / n_mean


def _transit_lc(z0: complex, v0: complex, conic: InnerConic,
                profile: PerturbationProfile,
                params: PhysParams) -> ArcSegment:
    Om = math.sqrt(params.lc_Omega_sq)
    w0 = cmath.sqrt(z0)
    wd0 = v0 * w0.conjugate()
    A = 0.5 * (abs(w0) ** 2 + abs(wd0) ** 2 / Om ** 2)
    B = (w0.conjugate() * wd0).real / Om
    C = 0.5 * (abs(w0) ** 2 - abs(wd0) ** 2 / Om ** 2)

    r0 = abs(z0)
    rdot0 = (z0.real * v0.real + z0.imag * v0.imag) / r0
    if profile.is_circle and abs(r0 - 1.0) < 1e-12 and rdot0 < 0.0:
        tau1 = -math.atanh(B / A) / Om
    else:
        def gap(tau):
            w = w0 * np.cosh(Om * tau) + wd0 * np.sinh(Om * tau) / Om
            return np.abs(w) ** 2 - profile.radius(2.0 * np.angle(w))

        rho_max = float(np.max(profile.radius(
            np.linspace(-math.pi, math.pi, 1024))))
        x_max = (math.acosh(max((rho_max - C) / math.sqrt(A * A - B * B), 1.0))
                 + abs(math.atanh(B / A)) + 0.5)
        tau1 = first_crossing(gap, np.linspace(0.0, x_max / (2.0 * Om), 2048),
                              inside_sign=-1.0)
        if tau1 is None:
            tau1 = extend_and_find(gap, 0.0, x_max / Om, 4096, -1.0)

    ch, sh = math.cosh(Om * tau1), math.sinh(Om * tau1)
    w1 = w0 * ch + wd0 * sh / Om
    wd1 = w0 * Om * sh + wd0 * ch
    z1 = w1 * w1
    v1 = wd1 * w1 / abs(w1) ** 2
    x = 2.0 * Om * tau1
    dur = (A * math.sinh(x) + B * (math.cosh(x) - 1.0)) / Om + 2.0 * C * tau1

    xi0 = wrap_pi(cmath.phase(z0))
    xi1 = wrap_pi(cmath.phase(z1))
    if conic.is_collision:
        sweep = 0.0
        wind = 0
    else:
        k, p = conic.ang_momentum_k, conic.semilatus_p
        sgn = 1.0 if k > 0 else -1.0
        f0 = _true_anomaly(r0, rdot0, k, p)
        r1 = abs(z1)
        rdot1 = (z1.real * v1.real + z1.imag * v1.imag) / r1
        f1 = _true_anomaly(r1, rdot1, k, p)
        sweep = sgn * (f1 - f0)
        wind = int(round((sweep - wrap_pi(xi1 - xi0)) / (2.0 * math.pi)))
    conic = InnerConic(ang_momentum_k=conic.ang_momentum_k,
                       semilatus_p=conic.semilatus_p,
                       eccentricity_e=conic.eccentricity_e,
                       pericenter_r=conic.pericenter_r,
                       pericenter_angle=conic.pericenter_angle,
                       winding=wind, is_collision=conic.is_collision)
    return ArcSegment(region="inner", chart="lc", p0=z0, v0=v0, p1=z1, v1=v1,
                      duration=dur, sweep=sweep, xi0=xi0, xi1=xi1,
                      conic=conic, par=(w0, wd0, Om, tau1), params=params)


def inner_arc_fixed_ends(xi0: float, xi1: float,
                         profile: PerturbationProfile, params: PhysParams,
                         branch: str = "winding",
                         lifted_sweep: float | None = None) -> ArcSegment:
    """Interior arc joining boundary angles ``xi0`` -> ``xi1``.

    ``branch`` picks the chord: "direct" sweeps the short way (|advance| <
    pi), "winding" the long way around the centre.  When the wrapped
    difference is +-pi the two coincide and the orientation is ambiguous;
    pass ``lifted_sweep`` (the signed polar advance, |sweep| in (0, 2*pi))
    to resolve it — it overrides ``branch`` entirely.  Coinciding endpoints
    give the radial collision ray.
    """
    delta = wrap_pi(xi1 - xi0)
    if lifted_sweep is not None:
        sw = float(lifted_sweep)
        if abs(sw) >= 2.0 * math.pi or \
                abs(wrap_pi(sw - delta)) > 1e-9:
            raise DomainError(
                "lifted_sweep must match the endpoints modulo 2*pi and "
                "satisfy |sweep| < 2*pi")
    elif abs(abs(delta) - math.pi) < 1e-9:
        raise AntipodalEndpoints(
            "antipodal endpoints: pass lifted_sweep to fix the orientation")
    elif branch == "direct":
        sw = delta
    elif branch == "winding":
        sw = delta - math.copysign(2.0 * math.pi, delta) if delta != 0.0 \
            else 0.0
    else:
        raise ValueError(f"unknown branch {branch!r}")

    geom = boundary(xi0, profile)
    speed = math.sqrt(2.0 * potential(geom.point_c, "inner", params))
    if abs(sw) < 1e-12:
        vin = -speed * geom.point_c / abs(geom.point_c)
        return levi_civita_propagate(geom.point_c, vin, params, profile)

    beta = _chord_entry_angle(sw, params)
    if profile.is_circle:
        arc = _launch(geom, beta, speed, profile, params)
        return arc

    target_wind = int(round((sw - delta) / (2.0 * math.pi)))
    lim = math.pi / 2 - 1e-9

    def resid(b):
        return _launch(geom, b, speed, profile, params).sweep - sw

    r = resid(beta)
    for _ in range(40):
        if abs(r) < 1e-11:
            arc = _launch(geom, beta, speed, profile, params)
            if arc.conic.winding != target_wind:
                raise WindingChanged(
                    f"converged arc winds {arc.conic.winding} times, "
                    f"expected {target_wind}")
            return arc
        h = 1e-7
        slope = (resid(min(beta + h, lim)) - r) / (min(beta + h, lim) - beta)
        if slope == 0.0 or not math.isfinite(slope):
            raise ShootingDiverged("flat residual in interior arc shooting")
        beta = float(np.clip(beta - r / slope, -lim, lim))
        r = resid(beta)
    raise ShootingDiverged(
        f"interior two-point problem did not converge (residual {r:.3g})")


def _launch(geom, beta: float, speed: float, profile: PerturbationProfile,
            params: PhysParams) -> ArcSegment:
    vin = speed * (-math.cos(beta) * geom.normal_c +
                   math.sin(beta) * geom.tangent_c)
    return levi_civita_propagate(geom.point_c, vin, params, profile)


def _chord_entry_angle(sweep: float, params: PhysParams) -> float:
    """Entry angle (from the inward normal) of the unit-circle chord whose
    interior arc advances the polar angle by ``sweep``."""
    mu = params.mass_mu
    a = mu / (2.0 * params.kepler_energy)
    c = math.cos(abs(sweep) / 2.0)
    e = (c + math.sqrt(c * c + 4.0 * a * (1.0 + a))) / (2.0 * a)
    k = math.copysign(math.sqrt((e * e - 1.0) * mu * mu /
                                (2.0 * params.kepler_energy)), sweep)
    sinb = k / params.inner_speed_unit
    if abs(sinb) > 1.0:
        raise DomainError("requested sweep is not reachable at this energy")
    return math.asin(sinb)


def transversality_bound(params: PhysParams, chord_x0: float) -> float:
    """Lower bound on |cos| of the angle between a winding interior arc and
    the unit circle, as a function of the chord half-angle cosine ``x0``.

    ``x0 = cos(delta/2)`` where delta is the wrapped endpoint separation;
    the bound is uniform over the winding branch and tends to 1 as the
    chord closes up.
    """
    if not -1.0 < chord_x0 <= 1.0:
        raise DomainError("chord half-angle cosine must lie in (-1, 1]")
    a = params.mass_mu / (2.0 * params.kepler_energy)
    root = math.sqrt(4.0 * a * a + 4.0 * a + chord_x0 * chord_x0)
    e0 = (-chord_x0 + root) / (2.0 * a)
    return e0 * math.sqrt((2.0 * a + chord_x0 * (chord_x0 + root)) /
                          (2.0 + 4.0 * a))
