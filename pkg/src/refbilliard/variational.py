"""Jacobi lengths, geodesic distances, and the generating function.

Zero-energy trajectories are geodesics of the Jacobi metric sqrt(V)|dz|, so
each arc carries a length d(., .); the generating function of the return map
is S(xi0, xi1) = d_E(xi0, xi_mid) + d_I(xi_mid, xi1) with the intermediate
boundary angle xi_mid chosen stationary — which is exactly the refraction
condition, i.e. matching of the canonical action on both sides.  Canonical
actions are the conjugate boundary momenta: I0 = -dS/dxi0, I1 = +dS/dxi1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from ._util import wrap_pi
from .arcs import ArcSegment
from .boundary import PerturbationProfile
from .errors import (DegenerateStationarity, NoIntermediatePoint,
                     QuadratureTolUnmet, RangeEmpty)
from .inner import inner_arc_fixed_ends
from .outer import outer_arc_fixed_ends
from .params import PhysParams, potential
from .returnmap import action_of_velocity, circular_shift, total_shift_grid


# -- Jacobi metric functionals -------------------------------------------------


def _length_integrand(arc: ArcSegment, params: PhysParams):
    """sqrt(V(z)) |dz/du| along the arc, collision-safe in the LC chart."""
    if arc.chart == "lc":
        w0, wd0, Om, tau1 = arc.par
        Eh, mu = params.kepler_energy, params.mass_mu

        def f(u):
            tau = u * tau1
            w = w0 * math.cosh(Om * tau) + wd0 * math.sinh(Om * tau) / Om
            wd = w0 * Om * math.sinh(Om * tau) + wd0 * math.cosh(Om * tau)
            # |dz/du| sqrt(V) = 2|w||wd| tau1 sqrt(Eh + mu/|w|^2)
            return 2.0 * abs(wd) * abs(tau1) * \
                math.sqrt(Eh * abs(w) ** 2 + mu)
        return f

    def f(u):
        z = arc.point(u)
        v = max(potential(z, arc.region, params), 0.0)
        return abs(arc.dpoint_du(u)) * math.sqrt(v)
    return f


def jacobi_length(arc: ArcSegment, params: PhysParams,
                  tol: float = 1e-10) -> float:
    """Length of the arc in the Jacobi metric sqrt(V)|dz| (adaptive quadrature)."""
    if arc.duration == 0.0:
        return 0.0
    val, err = quad(_length_integrand(arc, params), 0.0, 1.0,
                    epsabs=1e-12, epsrel=1e-12, limit=200)
    if err > max(tol, tol * abs(val)) * 100.0:
        raise QuadratureTolUnmet(
            f"Jacobi length error estimate {err:.3g} exceeds tolerance")
    return val


def maupertuis_product(arc: ArcSegment, params: PhysParams) -> float:
    """M = (1/2 int |dz/dt|^2 dt) * (int V dt) in geodesic time t = s/T.

    On zero-energy arcs the Cauchy-Schwarz bound L^2 <= 2M is attained, so
    this provides an independent check of the Jacobi length.
    """
    T = arc.duration
    if T == 0.0:
        return 0.0
    if arc.chart == "lc":
        w0, wd0, Om, tau1 = arc.par
        Eh, mu = params.kepler_energy, params.mass_mu

        def wpair(u):
            tau = u * tau1
            w = w0 * math.cosh(Om * tau) + wd0 * math.sinh(Om * tau) / Om
            wd = w0 * Om * math.sinh(Om * tau) + wd0 * math.cosh(Om * tau)
            return w, wd

        # |v|^2 ds = 2|wd|^2 dtau ; V ds = 2(Eh |w|^2 + mu) dtau
        def kin(u):
            _, wd = wpair(u)
            return 2.0 * abs(wd) ** 2 * abs(tau1)

        def pot(u):
            w, _ = wpair(u)
            return 2.0 * (Eh * abs(w) ** 2 + mu) * abs(tau1)
    else:
        def kin(u):
            return abs(arc.velocity(u)) ** 2 * arc.ds_du(u)

        def pot(u):
            return max(potential(arc.point(u), arc.region, params), 0.0) * \
                arc.ds_du(u)

    A = 0.5 * T * quad(kin, 0.0, 1.0, epsabs=1e-12, epsrel=1e-12,
                       limit=200)[0]
    B = quad(pot, 0.0, 1.0, epsabs=1e-12, epsrel=1e-12, limit=200)[0] / T
    return A * B


def outer_distance(xi0: float, xi1: float, profile: PerturbationProfile,
                   params: PhysParams,
                   lifted_delta: Optional[float] = None) -> float:
    """Jacobi length d_E of the exterior arc joining two boundary angles."""
    arc = outer_arc_fixed_ends(xi0, xi1, profile, params,
                               lifted_delta=lifted_delta)
    return jacobi_length(arc, params)


def inner_distance(xi0: float, xi1: float, profile: PerturbationProfile,
                   params: PhysParams, branch: str = "winding",
                   lifted_sweep: Optional[float] = None) -> float:
    """Jacobi length d_I of the interior arc joining two boundary angles."""
    arc = inner_arc_fixed_ends(xi0, xi1, profile, params, branch=branch,
                               lifted_sweep=lifted_sweep)
    return jacobi_length(arc, params)


# -- circular shift inversion (seeding) ----------------------------------------


def shift_inverse_all(delta: float, params: PhysParams,
                      n_scan: int = 8192) -> list:
    """All actions I in (-I_c, I_c) whose circular total shift equals ``delta``.

    The shift can fold (twist sign changes), so several roots may exist;
    they are bracketed on a scan grid and polished by Brent's method.
    """
    Ic = params.action_bound_Ic
    grid = np.linspace(-Ic * (1 - 1e-9), Ic * (1 - 1e-9), n_scan)
    vals = total_shift_grid(grid, params) - delta
    roots = []
    for i in np.nonzero(vals[1:] * vals[:-1] <= 0.0)[0]:
        if vals[i] == 0.0:
            roots.append(float(grid[i]))
        elif vals[i + 1] != 0.0:
            roots.append(brentq(
                lambda I: circular_shift(I, params).total - delta,
                grid[i], grid[i + 1], xtol=1e-14, rtol=8.9e-16))
    if vals[-1] == 0.0:
        roots.append(float(grid[-1]))
    return roots


def _seed_action(delta: float, params: PhysParams,
                 action_hint: Optional[float]) -> float:
    roots = shift_inverse_all(delta, params)
    if abs(delta) < 1e-12:
        roots.append(0.0)
    if not roots:
        raise RangeEmpty(
            f"no circular arc family realizes a lifted shift of {delta:.6g}")
    if action_hint is not None:
        pick = min(roots, key=lambda r: abs(r - action_hint))
    else:
        pick = max(roots, key=abs)
    if abs(pick) < 1e-9 * params.action_bound_Ic:
        pick = 0.0
    return pick


# -- the generating function ---------------------------------------------------


@dataclass(frozen=True)
class GeneratingEval:
    """Generating function of one return step and its diagnostics.

    ``nondeg_S`` is the second derivative of S along the intermediate angle
    (zero exactly on twist-degenerate fibers); ``nondeg_twist`` is the mixed
    second derivative d^2 S/dxi0 dxi1 = -dI0/dxi1 (NaN when not requested).
    """

    S_value: float
    xi_mid: float
    action_I0: float
    action_I1: float
    nondeg_S: float
    nondeg_twist: float


def _build_links(xi0: float, xi_mid: float, xi1: float, sigma: float,
                 profile: PerturbationProfile, params: PhysParams):
    outer = outer_arc_fixed_ends(xi0, xi_mid, profile, params,
                                 lifted_delta=xi_mid - xi0)
    sweep = (xi1 - xi_mid) + 2.0 * math.pi * sigma
    inner = inner_arc_fixed_ends(xi_mid, xi1, profile, params,
                                 lifted_sweep=sweep if sigma != 0.0 else None,
                                 branch="direct" if sigma == 0.0 else "winding")
    return outer, inner


def _stationarity(xi0: float, xi_mid: float, xi1: float, sigma: float,
                  profile: PerturbationProfile, params: PhysParams) -> float:
    outer, inner = _build_links(xi0, xi_mid, xi1, sigma, profile, params)
    i_out = action_of_velocity(outer.xi1, outer.v1, profile, params)
    i_in = action_of_velocity(inner.xi0, inner.v0, profile, params)
    return i_out - i_in


def generating_function(xi0: float, xi1: float,
                        profile: PerturbationProfile, params: PhysParams,
                        action_hint: Optional[float] = None,
                        with_twist: bool = True) -> GeneratingEval:
    """Evaluate S(xi0, xi1) = d_E + d_I with a stationary intermediate angle.

    ``xi0``/``xi1`` are lifted (real) boundary angles; their difference
    selects the arc family.  Where the circular shift folds, several families
    realize the same difference — the largest-|I| family is chosen unless
    ``action_hint`` picks another.  ``with_twist=False`` skips the mixed
    second derivative (saves two full re-solves).
    """
    delta = xi1 - xi0
    I_seed = _seed_action(delta, params, action_hint)
    sigma = 0.0 if I_seed == 0.0 else math.copysign(1.0, I_seed)
    shift = circular_shift(I_seed, params)
    xi_mid = xi0 + shift.f_val

    def eta(xm):
        return _stationarity(xi0, xm, xi1, sigma, profile, params)

    xi_star = _solve_mid(eta, xi_mid, xi0)
    outer, inner = _build_links(xi0, xi_star, xi1, sigma, profile, params)
    S = jacobi_length(outer, params) + jacobi_length(inner, params)
    I0 = action_of_velocity(wrap_pi(xi0), outer.v0, profile, params)
    I1 = action_of_velocity(wrap_pi(xi1), inner.v1, profile, params)

    h = 1e-6
    nondeg = (eta(xi_star + h) - eta(xi_star - h)) / (2.0 * h)
    if abs(nondeg) < 1e-8:
        raise DegenerateStationarity(
            "stationary intermediate angle is degenerate (twist-critical "
            "fiber); S is not a valid local generating function here")

    twist = math.nan
    if with_twist:
        hp = 1e-6
        evp = generating_function(xi0, xi1 + hp, profile, params,
                                  action_hint=I_seed, with_twist=False)
        evm = generating_function(xi0, xi1 - hp, profile, params,
                                  action_hint=I_seed, with_twist=False)
        twist = -(evp.action_I0 - evm.action_I0) / (2.0 * hp)
    return GeneratingEval(S_value=S, xi_mid=wrap_pi(xi_star),
                          action_I0=I0, action_I1=I1, nondeg_S=nondeg,
                          nondeg_twist=twist)


def _solve_mid(eta, seed: float, xi0: float) -> float:
    """Root of the stationarity residual near the seed angle."""
    lim_lo = xi0 - math.pi + 1e-9
    lim_hi = xi0 + math.pi - 1e-9
    x0 = min(max(seed, lim_lo), lim_hi)
    r0 = eta(x0)
    if abs(r0) < 1e-13:
        return x0
    width = 0.05
    while width < 2.0 * math.pi:
        a = max(x0 - width, lim_lo)
        b = min(x0 + width, lim_hi)
        ra, rb = eta(a), eta(b)
        if ra * r0 < 0.0:
            return brentq(eta, a, x0, xtol=1e-13, rtol=8.9e-16)
        if rb * r0 < 0.0:
            return brentq(eta, x0, b, xtol=1e-13, rtol=8.9e-16)
        if a == lim_lo and b == lim_hi:
            break
        width *= 2.0
    raise NoIntermediatePoint(
        "no stationary intermediate boundary angle brackets the seed")


# -- discrete action of periodic cycles ----------------------------------------


def discrete_action(cycle: Sequence[float], m: int, n: int,
                    profile: PerturbationProfile, params: PhysParams,
                    action_hint: Optional[float] = None
                    ) -> Tuple[float, np.ndarray]:
    """Total action W = sum S(xi_k, xi_{k+1}) of an (m, n) cycle, with gradient.

    ``cycle`` holds n lifted angles; the closing link wraps to xi_0 + 2*pi*m.
    The gradient uses the canonical-action identities: dW/dxi_k equals the
    incoming minus the outgoing action at vertex k; it vanishes exactly on
    orbits of the return map.
    """
    xs = list(map(float, cycle))
    if len(xs) != n:
        raise ValueError(f"cycle length {len(xs)} != n = {n}")
    ends = xs + [xs[0] + 2.0 * math.pi * m]
    links = [generating_function(ends[k], ends[k + 1], profile, params,
                                 action_hint=action_hint, with_twist=False)
             for k in range(n)]
    W = sum(l.S_value for l in links)
    grad = np.array([links[k - 1].action_I1 - links[k].action_I0
                     for k in range(n)])
    return W, grad
