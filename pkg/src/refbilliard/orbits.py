"""Orbit iteration, rotation numbers, periodic orbits, stability, curve probes.

The return map is iterated on the lifted section (xi real, I bounded);
rotation numbers are tail averages of the angular advance.  Periodic orbits
come from root isolation of the circular shift (integrable case) or from
critical points of the discrete action — a minimizer by descent plus a
minimax point between the minimizer and its cyclic shift (twist-map pair).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize, root

from ._util import wrap_pi
from .arcs import ArcSegment
from .boundary import PerturbationProfile
from .errors import (BilliardError, DescentStalled, InsufficientLength,
                     OrbitTerminated, RangeEmpty, ResidualTooLarge,
                     TotalReflectionTermination)
from .params import PhysParams
from .returnmap import (BoundaryState, circular_shift, outgoing_state,
                        return_map, total_shift_grid)
from .variational import discrete_action, shift_inverse_all


@dataclass
class OrbitTrace:
    """Iterated section states with their lifted angles and connecting arcs."""

    states: List[BoundaryState]
    arcs: List[ArcSegment]
    status: str
    xis_lifted: np.ndarray
    rotation_estimate: Tuple[float, float]


@dataclass(frozen=True)
class PeriodicOrbit:
    """An (m, n)-cycle of the return map: lifted angles, actions, residual."""

    m: int
    n: int
    xis: np.ndarray
    actions: np.ndarray
    residual: float
    kind: str
    grad_norm: float = math.nan


@dataclass(frozen=True)
class StabilityReport:
    """Finite-difference monodromy of an n-step return and its classification."""

    matrix: np.ndarray
    trace: float
    det: float
    multipliers: np.ndarray
    classification: str


@dataclass(frozen=True)
class CurveProbe:
    """Fit of a long orbit by a single-valued curve I(xi) (invariant-curve test)."""

    target_rho: float
    seed_action: float
    measured_rho: float
    rho_error: float
    max_residual: float
    coefficients: np.ndarray
    n_iter: int
    status: str


# -- iteration and rotation numbers ---------------------------------------------


def iterate(initial: BoundaryState, n: int, profile: PerturbationProfile,
            params: PhysParams, method: str = "auto") -> OrbitTrace:
    """Apply the return map up to ``n`` times, recording the lifted angles.

    Termination (total reflection, failed event detection) truncates the
    trace; the outcome is encoded in ``status`` rather than raised.
    """
    states = [initial]
    arcs: List[ArcSegment] = []
    lifted = [float(initial.xi)]
    status = "running"
    s = initial
    for _ in range(n):
        try:
            res = return_map(s, profile, params, method=method)
        except TotalReflectionTermination:
            status = "total_reflection"
            break
        except BilliardError:
            status = "failed"
            break
        s = res.state
        lifted.append(lifted[-1] + res.delta_xi)
        states.append(s)
        arcs.extend(res.arcs)
    xis = np.array(lifted)
    est = (math.nan, math.inf)
    if len(xis) >= 2:
        est = _rotation_with_error(xis)
    return OrbitTrace(states=states, arcs=arcs, status=status,
                      xis_lifted=xis, rotation_estimate=est)


def _rotation_with_error(xis: np.ndarray) -> Tuple[float, float]:
    N = len(xis) - 1
    K = max(N // 2, 1)
    vals = (xis[K:] - xis[:-K]) / K
    est = float(np.mean(vals))
    q = max(len(vals) // 4, 1)
    tail = vals[-q:]
    err = float(max(tail.max() - tail.min(), 1e-14))
    return est, err


def rotation_number(trace: OrbitTrace) -> float:
    """Average angular advance per return of the trace, on the lift."""
    if len(trace.states) < 2:
        raise InsufficientLength(
            "rotation number requires at least two section states")
    return _rotation_with_error(trace.xis_lifted)[0]


# -- periodic orbits -------------------------------------------------------------


def _dedup_sorted(vals: Sequence[float], tol: float = 1e-9) -> List[float]:
    out: List[float] = []
    for v in sorted(vals):
        if not out or abs(v - out[-1]) > tol:
            out.append(v)
    return out


def _map_residual(xi0: float, I0: float, m: int, n: int,
                  profile: PerturbationProfile, params: PhysParams,
                  method: str = "auto"):
    """Lifted n-step return from (xi0, I0) and its periodicity defect."""
    s = outgoing_state(xi0, I0, profile, params)
    lift = float(xi0)
    xis = [lift]
    acts = [I0]
    for _ in range(n):
        res = return_map(s, profile, params, method=method)
        lift += res.delta_xi
        s = res.state
        xis.append(lift)
        acts.append(s.action_I)
    res_xi = lift - (xi0 + 2.0 * math.pi * m)
    res_I = s.action_I - I0
    return res_xi, res_I, np.array(xis), np.array(acts)


def _circular_orbits(m: int, n: int, params: PhysParams,
                     profile: PerturbationProfile) -> List[PeriodicOrbit]:
    target = 2.0 * math.pi * m / n
    roots = shift_inverse_all(target, params)
    Ic = params.action_bound_Ic
    roots = [0.0 if abs(r) < 1e-9 * Ic else r for r in roots]
    roots = _dedup_sorted(roots)
    if not roots:
        raise RangeEmpty(
            f"the circular shift never equals 2 pi {m}/{n}")
    orbits = []
    for r in roots:
        res_xi, res_I, xis, acts = _map_residual(0.0, r, m, n, profile,
                                                 params, method="fast")
        orbits.append(PeriodicOrbit(
            m=m, n=n, xis=xis[:-1], actions=acts[:-1],
            residual=max(abs(res_xi), abs(res_I)),
            kind="circular", grad_norm=0.0))
    return orbits


def _orbit_from_cycle(cycle: np.ndarray, m: int, n: int,
                      profile: PerturbationProfile, params: PhysParams,
                      action_hint: float, kind: str,
                      grad_norm: float) -> PeriodicOrbit:
    from .variational import generating_function
    ev = generating_function(float(cycle[0]), float(cycle[1]) if n > 1
                             else float(cycle[0]) + 2.0 * math.pi * m,
                             profile, params, action_hint=action_hint,
                             with_twist=False)
    res_xi, res_I, xis, acts = _map_residual(float(cycle[0]), ev.action_I0,
                                             m, n, profile, params,
                                             method="auto")
    return PeriodicOrbit(m=m, n=n, xis=xis[:-1], actions=acts[:-1],
                         residual=max(abs(res_xi), abs(res_I)), kind=kind,
                         grad_norm=grad_norm)


def cycle_distance(a: PeriodicOrbit, b: PeriodicOrbit) -> float:
    """Minimal state separation of two cycles over cyclic relabelings."""
    n = a.n
    best = math.inf
    for j in range(n):
        dx = np.abs(wrap_pi(a.xis - np.roll(b.xis, -j)))
        dI = np.abs(a.actions - np.roll(b.actions, -j))
        best = min(best, float(np.maximum(dx, dI).max()))
    return best


def _newton_fixed_points(m: int, profile: PerturbationProfile,
                         params: PhysParams, seeds_I: Sequence[float],
                         n_grid: int = 16) -> List[PeriodicOrbit]:
    """Period-1 orbits by Newton on the map itself.

    Collision cycles make the discrete action's interior branch
    discontinuous, so fixed points (including the ejection–collision ones on
    symmetry axes) are located directly on the section.
    """
    found: List[PeriodicOrbit] = []

    def G(u):
        rx, rI, _, _ = _map_residual(u[0], u[1], m, 1, profile, params,
                                     method="auto")
        return [rx, rI]

    Ic = params.action_bound_Ic
    for I_seed in seeds_I:
        for xi_seed in np.linspace(-math.pi, math.pi, n_grid, endpoint=False):
            try:
                sol = root(G, [xi_seed, I_seed], method="hybr",
                           options={"xtol": 1e-13, "eps": 1e-7})
            except BilliardError:
                continue
            if not sol.success:
                continue
            xi_s, I_s = float(sol.x[0]), float(sol.x[1])
            if abs(I_s) >= Ic * (1 - 1e-9):
                continue
            try:
                rx, rI, xis, acts = _map_residual(xi_s, I_s, m, 1, profile,
                                                  params, method="auto")
            except BilliardError:
                continue
            resid = max(abs(rx), abs(rI))
            if resid > 1e-8:
                continue
            orb = PeriodicOrbit(m=m, n=1, xis=xis[:-1], actions=acts[:-1],
                                residual=resid, kind="map-newton")
            if all(cycle_distance(orb, o) > 1e-6 for o in found):
                found.append(orb)
    return found


def find_periodic(m: int, n: int, profile: PerturbationProfile,
                  params: PhysParams, action_hint: Optional[float] = None,
                  n_path: int = 33) -> List[PeriodicOrbit]:
    """All (m, n)-periodic orbits the search can certify.

    Integrable case: every action with total shift 2 pi m/n (one orbit per
    root, the I = 0 ejection–collision line included for m = 0).  Perturbed
    case: the minimizer of the discrete action, descended from the circular
    seed, plus a minimax orbit on the path joining the minimizer to its
    cyclic shift; period-1 cycles use Newton on the section map instead.
    """
    if n < 1:
        raise ValueError("the period n must be a positive integer")
    if math.gcd(abs(m), n) != 1:
        raise ValueError("m and n must be coprime")
    if profile.is_circle:
        return _circular_orbits(m, n, params, profile)

    target = 2.0 * math.pi * m / n
    roots = shift_inverse_all(target, params)
    Ic = params.action_bound_Ic
    roots = _dedup_sorted([0.0 if abs(r) < 1e-9 * Ic else r for r in roots])
    if not roots:
        raise RangeEmpty(f"the circular shift never equals 2 pi {m}/{n}")
    if action_hint is not None:
        I_seed = min(roots, key=lambda r: abs(r - action_hint))
    else:
        I_seed = max(roots, key=abs)

    if n == 1:
        seeds = _dedup_sorted(roots + [I_seed])
        orbits = _newton_fixed_points(m, profile, params, seeds)
        if not orbits:
            raise DescentStalled("no period-1 orbit converged on the section")
        return orbits

    # Per-link angular shifts only exist for the variational links while they
    # stay inside the range swept by the circular family; a quadratic wall
    # steers stray line-search iterates back into that window.
    grid_I = np.linspace(-Ic + 1e-9, Ic - 1e-9, 4097)
    shifts = total_shift_grid(grid_I, params)
    d_lo, d_hi = float(shifts.min()) + 1e-6, float(shifts.max()) - 1e-6

    def wall(x):
        ends = np.r_[x, x[0] + 2.0 * math.pi * m]
        deltas = np.diff(ends)
        excess = (np.clip(deltas - d_hi, 0.0, None)
                  + np.clip(deltas - d_lo, None, 0.0))
        if not np.any(excess):
            return None
        W = 1e6 + 1e3 * float(excess @ excess)
        g = np.zeros_like(x)
        for k in range(n):
            g[(k + 1) % n] += 2e3 * excess[k]
            g[k] -= 2e3 * excess[k]
        return W, g

    def fun(x):
        hit = wall(x)
        if hit is not None:
            return hit
        try:
            W, g = discrete_action(x, m, n, profile, params,
                                   action_hint=I_seed)
        except BilliardError:
            return 1e6, np.zeros_like(x)
        return W, g

    def grad_only(x):
        hit = wall(x)
        if hit is not None:
            return hit[1]
        return discrete_action(x, m, n, profile, params,
                               action_hint=I_seed)[1]

    base = target * np.arange(n)
    best = None
    for off in (0.0, math.pi / (2 * n)):
        res = minimize(fun, base + off, jac=True, method="L-BFGS-B",
                       options={"gtol": 1e-11, "maxiter": 200})
        if best is None or res.fun < best.fun:
            best = res
    if best is None or not np.all(np.isfinite(best.x)):
        raise DescentStalled("discrete-action descent failed to converge")

    pol = root(grad_only, best.x, method="hybr",
               options={"xtol": 1e-13, "eps": 1e-7})
    x_min = pol.x if pol.success else best.x
    g_min = float(np.max(np.abs(grad_only(x_min))))
    if g_min > 1e-7:
        raise DescentStalled(
            f"minimizer gradient stalled at {g_min:.3g}")
    orbits = [_orbit_from_cycle(x_min, m, n, profile, params, I_seed,
                                "action-minimizer", g_min)]

    W_min = float(fun(x_min)[0])

    def polish(z_seed):
        sol = root(grad_only, z_seed, method="hybr",
                   options={"xtol": 1e-13, "eps": 1e-7})
        if not sol.success:
            return None
        g_sad = float(np.max(np.abs(grad_only(sol.x))))
        if g_sad > 1e-7:
            return None
        orb = _orbit_from_cycle(sol.x, m, n, profile, params, I_seed,
                                "action-minimax", g_sad)
        if orb.residual > 1e-8 or cycle_distance(orb, orbits[0]) <= 1e-4:
            return None
        return float(fun(sol.x)[0]), np.asarray(sol.x), orb

    # minimax on the straight path to the cyclic shift of the minimizer,
    # with uniform-rotation seeds as backups (the saddle of a near-integrable
    # twist map interleaves the minimizing cycles along the rotation family)
    y = np.r_[x_min[1:], x_min[0] + 2.0 * math.pi * m]
    ts = np.linspace(0.0, 1.0, n_path)
    Ws = np.array([fun((1 - t) * x_min + t * y)[0] for t in ts])
    t_star = float(ts[int(np.argmax(Ws))])
    z0 = (1 - t_star) * x_min + t_star * y
    cands = []
    for z_seed in (z0, x_min + math.pi / (2 * n), x_min - math.pi / (2 * n),
                   0.5 * (x_min + y), z0 + 0.01, z0 - 0.01):
        hit = polish(z_seed)
        if hit is None:
            continue
        if all(cycle_distance(hit[2], c[2]) > 1e-4 for c in cands):
            cands.append(hit)
        if any(c[0] > W_min + 1e-9 * max(1.0, abs(W_min)) for c in cands):
            break
    tol_W = 1e-9 * max(1.0, abs(W_min))
    above = [c for c in cands if c[0] > W_min + tol_W]
    if not above and cands:
        # only copies of the minimizer in reach (a symmetric boundary maps
        # minimizers to minimizers); the saddle sits near the half offset
        x_c = cands[0][1]
        rolls = [np.r_[x_c[r:], x_c[:r] + 2.0 * math.pi * m]
                 for r in range(n)]
        d = min((roll - x_min for roll in rolls), key=np.ptp)
        hit = polish(x_min + 0.5 * d)
        if hit is not None and all(
                cycle_distance(hit[2], c[2]) > 1e-4 for c in cands):
            cands.append(hit)
            if hit[0] > W_min + tol_W:
                above = [hit]
    if above:
        orbits.append(max(above, key=lambda c: c[0])[2])
    elif cands:
        orbits.append(cands[0][2])
    return orbits


# -- linear stability ------------------------------------------------------------


def linear_stability(orbit: PeriodicOrbit, profile: PerturbationProfile,
                     params: PhysParams, delta: float = 1e-6
                     ) -> StabilityReport:
    """Monodromy of the n-step return about a periodic orbit, by differences.

    |trace| below 2 is elliptic, above 2 hyperbolic, and equal to 2 within
    finite-difference resolution parabolic (the integrable I = 0 shear).
    """
    if not (orbit.residual < 1e-8):
        raise ResidualTooLarge(
            f"periodicity residual {orbit.residual:.3g} too large for a "
            "meaningful monodromy")
    xi0, I0 = float(orbit.xis[0]), float(orbit.actions[0])
    m, n = orbit.m, orbit.n

    def step(xi, I):
        rx, rI, _, _ = _map_residual(xi, I, m, n, profile, params)
        return np.array([xi + rx, I + rI])

    col_xi = (step(xi0 + delta, I0) - step(xi0 - delta, I0)) / (2 * delta)
    col_I = (step(xi0, I0 + delta) - step(xi0, I0 - delta)) / (2 * delta)
    M = np.column_stack([col_xi, col_I])
    tr = float(M[0, 0] + M[1, 1])
    det = float(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])
    mult = np.linalg.eigvals(M)
    band = 1e-7 * max(1.0, abs(tr))
    if abs(abs(tr) - 2.0) <= band:
        cls = "parabolic"
    elif abs(tr) < 2.0:
        cls = "elliptic"
    else:
        cls = "hyperbolic"
    return StabilityReport(matrix=M, trace=tr, det=det, multipliers=mult,
                           classification=cls)


# -- invariant-curve probe -------------------------------------------------------


def is_diophantine_surrogate(rho: float, qmax: int = 20,
                             dist: float = 1e-3) -> bool:
    """Whether rho/2pi keeps distance ``dist`` from all p/q with q <= qmax."""
    x = rho / (2.0 * math.pi)
    for q in range(1, qmax + 1):
        p = round(x * q)
        if abs(x - p / q) < dist:
            return False
    return True


def golden_target(params: PhysParams, fraction: float = 1.0) -> float:
    """A noble rotation-number target inside the circular shift range.

    Scales -2 pi/(2 + golden mean) to ``fraction`` of itself; the default
    lands in the Fig-1-like range and passes the rational-distance surrogate.
    """
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    return -2.0 * math.pi / (2.0 + phi) * fraction


def invariant_curve_probe(target_rho: float, profile: PerturbationProfile,
                          params: PhysParams, n_iter: int = 5000,
                          harmonics: int = 32,
                          action_hint: Optional[float] = None,
                          refine: bool = True) -> CurveProbe:
    """Probe for an invariant curve with the given rotation number.

    Seeds the action from the circular inverse of the shift, refines it by a
    secant on the measured rotation number, iterates ``n_iter`` returns and
    fits I as a truncated trigonometric polynomial of xi.  The fit residual
    is the numeric evidence for (or against) a surviving curve.
    """
    roots = shift_inverse_all(target_rho, params)
    if not roots:
        raise RangeEmpty(
            f"target rotation number {target_rho:.6g} is outside the "
            "circular shift range")
    if action_hint is not None:
        I0 = min(roots, key=lambda r: abs(r - action_hint))
    else:
        I0 = max(roots, key=lambda r: abs(circular_shift(r, params)
                                          .total_prime))

    def measured(I, N):
        tr = iterate(outgoing_state(0.0, I, profile, params), N, profile,
                     params)
        if tr.status != "running":
            raise OrbitTerminated(
                f"probe orbit terminated with status {tr.status!r}")
        return tr, tr.rotation_estimate[0]

    if refine and not profile.is_circle:
        Ia, N_ref = I0, 1500
        _, ra = measured(Ia, N_ref)
        slope = circular_shift(I0, params).total_prime
        Ib = Ia + (target_rho - ra) / slope
        for _ in range(6):
            if abs(ra - target_rho) < 3e-5:
                break
            _, rb = measured(Ib, N_ref)
            if abs(rb - ra) < 1e-15:
                break
            Ia, ra, Ib = Ib, rb, Ib + (target_rho - rb) * (Ib - Ia) / (rb - ra)
        I0 = Ia

    trace, rho = measured(I0, n_iter)
    xs = np.array([s.xi for s in trace.states])
    ys = np.array([s.action_I for s in trace.states])
    cols = [np.ones_like(xs)]
    for j in range(1, harmonics + 1):
        cols.extend([np.cos(j * xs), np.sin(j * xs)])
    A = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(A, ys, rcond=None)
    resid = float(np.max(np.abs(A @ coef - ys)))
    return CurveProbe(target_rho=target_rho, seed_action=float(I0),
                      measured_rho=float(rho),
                      rho_error=float(trace.rotation_estimate[1]),
                      max_residual=resid, coefficients=coef,
                      n_iter=len(trace.states) - 1, status=trace.status)


def curve_eval(probe: CurveProbe, xi) -> np.ndarray:
    """Evaluate the probe's fitted curve I(xi)."""
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    out = np.full_like(xi, probe.coefficients[0])
    H = (len(probe.coefficients) - 1) // 2
    for j in range(1, H + 1):
        out += probe.coefficients[2 * j - 1] * np.cos(j * xi)
        out += probe.coefficients[2 * j] * np.sin(j * xi)
    return out
