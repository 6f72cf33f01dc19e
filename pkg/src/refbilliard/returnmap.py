"""The first return map on the interface in (xi, action) coordinates.

On the circle the map is an integrable shift (xi, I) -> (xi + f(I) + g(I), I)
with explicit f (exterior) and g (interior) contributions and closed-form
derivatives.  On perturbed domains the map is composed geometrically: an
exterior oscillator arc, Snell refraction inward, an interior Kepler arc,
and Snell refraction outward.  The action I = (1/sqrt(2)) v . gamma'(xi) is
conserved by refraction and makes the map area preserving.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np
from scipy.optimize import brentq

from ._util import wrap_pi
from .arcs import ArcSegment
from .boundary import BoundaryGeometry, PerturbationProfile, boundary
from .errors import (NoFixedPoint, OutOfActionRange, TangentialCrossing,
                     TotalReflectionTermination)
from .inner import levi_civita_propagate
from .outer import outer_transit
from .params import PhysParams, potential
from .refraction import refract_in, refract_out


@dataclass(frozen=True)
class BoundaryState:
    """Point of the section: boundary angle, canonical action, launch angle.

    ``alpha`` is the exterior angle from the outward normal toward the unit
    tangent; ``direction`` records whether the ray leaves ("outgoing") or
    approaches ("incoming") the boundary.
    """

    xi: float
    action_I: float
    alpha: float
    direction: str = "outgoing"


@dataclass(frozen=True)
class ShiftProfile:
    """Exterior/interior shift split of the circular return map at one action."""

    f_val: float
    g_val: float
    total: float
    f_prime: float
    g_prime: float
    total_prime: float


@dataclass(frozen=True)
class MapResult:
    """One application of the return map.

    ``delta_xi`` is the lifted angular advance (continuation of the circular
    shift f + g), and ``arcs`` holds the traversed (outer, inner) segments on
    the geometric path (empty on the closed-form circle path).
    """

    state: BoundaryState
    delta_xi: float
    arcs: Tuple[ArcSegment, ...] = ()


def action_of_velocity(xi: float, v, profile: PerturbationProfile,
                       params: PhysParams) -> float:
    """Canonical action I = (1/sqrt(2)) v . gamma'(xi) of a boundary velocity."""
    geom = boundary(xi, profile)
    v = complex(v[0], v[1]) if not isinstance(v, complex) else v
    tang = geom.tangent_c * geom.metric
    return (v.real * tang.real + v.imag * tang.imag) / math.sqrt(2.0)


def outgoing_state(xi: float, action_I: float, profile: PerturbationProfile,
                   params: PhysParams) -> BoundaryState:
    """Outgoing :class:`BoundaryState` at ``(xi, I)``; validates the action bound."""
    geom = boundary(xi, profile)
    ve = potential(geom.point_c, "outer", params)
    bound = math.sqrt(ve) * geom.metric
    s = action_I / bound
    if abs(s) >= 1.0:
        raise OutOfActionRange(
            f"|I| = {abs(action_I):.6g} exceeds the local bound {bound:.6g}")
    return BoundaryState(xi=wrap_pi(xi), action_I=action_I,
                         alpha=math.asin(s), direction="outgoing")


def outgoing_velocity(state: BoundaryState, profile: PerturbationProfile,
                      params: PhysParams) -> complex:
    """Exterior velocity realizing ``state`` at its boundary point."""
    geom = boundary(state.xi, profile)
    speed = math.sqrt(2.0 * potential(geom.point_c, "outer", params))
    return speed * (math.cos(state.alpha) * geom.normal_c +
                    math.sin(state.alpha) * geom.tangent_c)


# -- circular closed form ------------------------------------------------------


def circular_shift(action_I: float, params: PhysParams) -> ShiftProfile:
    """Closed-form shift split f, g and derivatives on the unit circle."""
    Ic = params.action_bound_Ic
    if abs(action_I) >= Ic:
        raise OutOfActionRange(
            f"|I| = {abs(action_I):.6g} is not below I_c = {Ic:.6g}")
    E = params.energy_E
    Eh, mu = params.kepler_energy, params.mass_mu
    x = action_I * action_I
    if action_I == 0.0:
        f = g = 0.0
    else:
        I = abs(action_I)
        f = math.atan2(2 * I * math.sqrt(Ic * Ic - x), E - 2 * x)
        # g = 2 acos(w) - 2 pi with w = (mu - 2x)/sqrt(4 Eh x + mu^2); the
        # half-angle form below stays accurate at w -> 1 (I -> 0)
        sA = math.sqrt(4 * Eh * x + mu * mu)
        half = x * (2 * Eh / (sA + mu) + 1.0) / sA
        g = -4.0 * math.asin(min(math.sqrt(half), 1.0))
        if action_I < 0:
            f, g = -f, -g
    fp = _f_prime_x(x, params)
    gp = _g_prime_x(x, params)
    return ShiftProfile(f_val=f, g_val=g, total=f + g, f_prime=fp,
                        g_prime=gp, total_prime=fp + gp)


def total_shift_grid(actions, params: PhysParams) -> np.ndarray:
    """Vectorized total circular shift f + g over an array of actions.

    Matches :func:`circular_shift` value-for-value; intended for scans
    (root bracketing, plotting) where building full profiles is wasteful.
    """
    I = np.asarray(actions, dtype=float)
    Ic = params.action_bound_Ic
    if np.any(np.abs(I) >= Ic):
        raise OutOfActionRange("scan grid reaches the action bound I_c")
    E = params.energy_E
    Eh, mu = params.kepler_energy, params.mass_mu
    x = I * I
    a = np.abs(I)
    f = np.arctan2(2 * a * np.sqrt(Ic * Ic - x), E - 2 * x)
    sA = np.sqrt(4 * Eh * x + mu * mu)
    half = x * (2 * Eh / (sA + mu) + 1.0) / sA
    g = -4.0 * np.arcsin(np.minimum(np.sqrt(half), 1.0))
    return np.sign(I) * np.where(a > 0.0, f + g, 0.0)


def _f_prime_x(x: float, params: PhysParams) -> float:
    E, om = params.energy_E, params.stiffness_om
    A = math.sqrt(2.0) * (2 * E * E - (E + 2 * x) * om)
    B = math.sqrt(2 * E - om - 2 * x) * (E * E - 2 * om * x)
    return A / B


def _g_prime_x(x: float, params: PhysParams) -> float:
    Eh, mu = params.kepler_energy, params.mass_mu
    C = 8 * Eh * x + 4 * Eh * mu + 4 * mu * mu
    D = (4 * Eh * x + mu * mu) * math.sqrt(Eh + mu - x)
    return -C / D


def twist_at_zero(params: PhysParams) -> float:
    """d(xi_1)/dI at I = 0: 2 sqrt(E - om/2)/E - 4 sqrt(E + h + mu)/mu."""
    return (2.0 * math.sqrt(params.energy_E - params.stiffness_om / 2.0) /
            params.energy_E -
            4.0 * math.sqrt(params.kepler_energy + params.mass_mu) /
            params.mass_mu)


def twist_critical_set(params: PhysParams) -> list:
    """Actions in (-I_c, I_c) where the twist d(xi_1)/dI changes sign.

    Works on the degree-5 polynomial p(x) = A^2 D^2 - B^2 C^2 in x = I^2,
    whose sign equals that of f' + g' on [0, I_c^2); roots are isolated by
    sign-change bracketing over 2^12 cells and polished by Brent's method,
    then mirrored to +-sqrt(x).  May be empty.
    """
    E, om = params.energy_E, params.stiffness_om
    Eh, mu = params.kepler_energy, params.mass_mu
    Ic2 = E - om / 2.0

    def p(x):
        A2 = 2.0 * (2 * E * E - (E + 2 * x) * om) ** 2
        B2 = (2 * E - om - 2 * x) * (E * E - 2 * om * x) ** 2
        C2 = (8 * Eh * x + 4 * Eh * mu + 4 * mu * mu) ** 2
        D2 = (4 * Eh * x + mu * mu) ** 2 * (Eh + mu - x)
        return A2 * D2 - B2 * C2

    xs = np.linspace(0.0, Ic2 * (1.0 - 1e-12), 4097)
    vals = p(xs)
    roots_x = []
    for i in range(len(xs) - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            if i == 0 or vals[i - 1] * b < 0:
                roots_x.append(xs[i])
        elif a * b < 0.0:
            roots_x.append(brentq(p, xs[i], xs[i + 1], xtol=1e-13,
                                  rtol=8.9e-16))
    out = []
    for x in roots_x:
        r = math.sqrt(max(x, 0.0))
        if r == 0.0:
            out.append(0.0)
        else:
            out.extend([-r, r])
    return sorted(out)


def fixed_point_thresholds(params: PhysParams) -> Tuple[float, float]:
    """(mu_bar, h_bar): parameter thresholds for non-homothetic fixed points.

    mu_bar is the positive root of (2E-om) mu^2/(8E^2) = E + mu, and h_bar
    evaluates that expression's excess at the actual mu, so h < h_bar (with
    the proposition's other hypotheses) guarantees a root of the total shift.
    """
    E, om = params.energy_E, params.stiffness_om
    mu = params.mass_mu
    mu_bar = (4 * E * E + math.sqrt(8 * E ** 3 * (4 * E - om))) / (2 * E - om)
    h_bar = (2 * E - om) * mu * mu / (8 * E * E) - (E + mu)
    return mu_bar, h_bar


def find_nonhomothetic_fixed_point(params: PhysParams,
                                   n_scan: int = 4096) -> float:
    """Positive action I with vanishing total shift (a period-1 orbit off
    the collision line), found by sign-change bracketing of the closed form.

    Raises :class:`NoFixedPoint` when the shift has no zero on (0, I_c).
    """
    Ic = params.action_bound_Ic
    grid = np.linspace(Ic * 1e-6, Ic * (1 - 1e-9), n_scan)
    vals = np.array([circular_shift(I, params).total for I in grid])
    idx = np.nonzero(vals[1:] * vals[:-1] < 0)[0]
    if idx.size == 0:
        raise NoFixedPoint(
            "total shift has constant sign on (0, I_c); no non-homothetic "
            "fixed point at these parameters")
    i = int(idx[0])
    return brentq(lambda I: circular_shift(I, params).total,
                  grid[i], grid[i + 1], xtol=1e-15, rtol=8.9e-16)


# -- the map itself ------------------------------------------------------------


def return_map(state: BoundaryState, profile: PerturbationProfile,
               params: PhysParams, method: str = "auto") -> MapResult:
    """Apply the first return map to an outgoing boundary state.

    ``method`` "fast" uses the circular closed form (circle profiles only),
    "geometric" composes the arcs and refractions explicitly, "auto" picks
    the closed form exactly when the profile is the circle.  Raises
    :class:`TotalReflectionTermination` when the interior ray exceeds the
    critical angle at its exit point.
    """
    if state.direction != "outgoing":
        raise ValueError("return_map expects an outgoing state")
    if method not in ("auto", "fast", "geometric"):
        raise ValueError(f"unknown method {method!r}")
    if method == "fast" or (method == "auto" and profile.is_circle):
        if not profile.is_circle:
            raise ValueError("the closed-form path requires the circle")
        shift = circular_shift(state.action_I, params)
        new = replace(state, xi=wrap_pi(state.xi + shift.total))
        return MapResult(state=new, delta_xi=shift.total, arcs=())

    if abs(state.alpha) > math.pi / 2 - 1e-9:
        raise TangentialCrossing("outgoing ray is tangential to the boundary")
    outer_arc = outer_transit(state.xi, state.alpha, profile, params)

    geom1 = boundary(outer_arc.xi1, profile)
    a_in = _angle_from_normal(outer_arc.v1, geom1, entering=True)
    res_in = refract_in(a_in, geom1.point_c, params)
    if not res_in.refracted:
        raise TotalReflectionTermination(
            "exterior ray reflects off the interface", xi=outer_arc.xi1,
            beta=a_in)
    beta = res_in.out_angle
    speed_in = math.sqrt(2.0 * potential(geom1.point_c, "inner", params))
    v_in = speed_in * (-math.cos(beta) * geom1.normal_c +
                       math.sin(beta) * geom1.tangent_c)
    inner_arc = levi_civita_propagate(geom1.point_c, v_in, params, profile)

    geom2 = boundary(inner_arc.xi1, profile)
    b_out = _angle_from_normal(inner_arc.v1, geom2, entering=False)
    res_out = refract_out(b_out, geom2.point_c, params)
    if not res_out.refracted:
        raise TotalReflectionTermination(
            "interior ray exceeds the critical angle", xi=inner_arc.xi1,
            beta=b_out)
    alpha1 = res_out.out_angle

    ve1 = potential(geom2.point_c, "outer", params)
    I1 = math.sqrt(ve1) * math.sin(alpha1) * geom2.metric
    sigma = 0.0 if inner_arc.conic.is_collision else \
        math.copysign(1.0, inner_arc.conic.ang_momentum_k)
    delta = outer_arc.sweep + inner_arc.sweep - 2.0 * math.pi * sigma
    new = BoundaryState(xi=wrap_pi(inner_arc.xi1), action_I=I1,
                        alpha=alpha1, direction="outgoing")
    return MapResult(state=new, delta_xi=delta, arcs=(outer_arc, inner_arc))


def _angle_from_normal(v: complex, geom: BoundaryGeometry,
                       entering: bool) -> float:
    tau = v.real * geom.tangent_c.real + v.imag * geom.tangent_c.imag
    nu = v.real * geom.normal_c.real + v.imag * geom.normal_c.imag
    return math.atan2(tau, -nu if entering else nu)
