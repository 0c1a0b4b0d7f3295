"""Steady states on the half-line and on intervals by shooting.

The trajectory of phi'' = -f(phi) from (phi, phi')(0) = (rho*a, a) is
integrated with RK4; the slope zero, the return to zero, and the exit above
one are localized by bisecting the integrator step.  The improper length
integral serves as an independent cross-check of the event positions.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .grid import Profile
from .reaction import Boundary, Reaction, vartheta

EXITS_ABOVE_ONE = "exits_above_one"
RETURNS_TO_BOUNDARY = "returns_to_boundary"
ASYMPTOTIC_TO_ONE = "asymptotic_to_one"
DEGENERATE_ZERO = "degenerate_zero"

_EVENT_TOL = 1e-10


class ShootingError(RuntimeError):
    pass


@dataclass
class ShootingOutcome:
    alpha: float
    s_max: float
    K: float
    L_return: float
    classification: str
    ys: np.ndarray = field(default_factory=lambda: np.empty(0))
    phis: np.ndarray = field(default_factory=lambda: np.empty(0))
    dphis: np.ndarray = field(default_factory=lambda: np.empty(0))


def _rk4_step(f_scalar, phi, dphi, h):
    # phi' = v, v' = -f(phi)
    k1p, k1v = dphi, -f_scalar(phi)
    k2p, k2v = dphi + 0.5 * h * k1v, -f_scalar(phi + 0.5 * h * k1p)
    k3p, k3v = dphi + 0.5 * h * k2v, -f_scalar(phi + 0.5 * h * k2p)
    k4p, k4v = dphi + h * k3v, -f_scalar(phi + h * k3p)
    return (
        phi + h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p),
        dphi + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v),
    )


def _locate_event(f_scalar, phi0, dphi0, h, g):
    """Bisect the substep length until the sign change of g is pinned to 1e-10."""
    lo, hi = 0.0, h
    g_lo = g(phi0, dphi0)
    state_hi = _rk4_step(f_scalar, phi0, dphi0, h)
    for _ in range(80):
        if hi - lo <= _EVENT_TOL:
            break
        mid = 0.5 * (lo + hi)
        pm, vm = _rk4_step(f_scalar, phi0, dphi0, mid)
        if (g_lo <= 0) == (g(pm, vm) <= 0):
            lo, g_lo = mid, g(pm, vm)
        else:
            hi, state_hi = mid, (pm, vm)
    return hi, state_hi


def shoot(
    r: Reaction,
    b: Boundary,
    alpha: float,
    h: float = 5e-3,
    y_max: float = 500.0,
    return_event: str = "zero",
) -> ShootingOutcome:
    """Integrate the steady-state IVP and classify the trajectory.

    ``return_event`` selects the second event: "zero" stops where phi returns
    to 0 (interval problem with a Dirichlet far end) and "symmetric" stops
    where phi' = -phi/rho (Robin condition on both ends).
    """
    if not 0.0 < h <= 1e-2:
        raise ShootingError(f"step h must lie in (0, 1e-2], got {h}")
    if b.neumann:
        raise ShootingError("shooting targets absorbing boundaries; Neumann is a comparison sentinel")
    lo_state = r.lo
    if alpha <= 0.0:
        ys = np.array([0.0, 1.0])
        phis = b.rho * alpha + lo_state + alpha * ys
        return ShootingOutcome(alpha, float(phis.max()), math.inf, math.inf,
                               DEGENERATE_ZERO, ys, phis, np.full(2, alpha))

    fsc = r.f_scalar
    phi, dphi = b.rho * alpha + lo_state, alpha
    ys = [0.0]
    phis = [phi]
    dphis = [dphi]
    K = math.inf
    s_max = math.inf
    L = math.inf
    cls = ASYMPTOTIC_TO_ONE
    y = 0.0
    inv_rho = 1.0 / b.rho if b.rho > 0 else math.inf

    def g_return(p, v):
        if return_event == "symmetric":
            return v + inv_rho * p if b.rho > 0 else p - lo_state
        return p - lo_state

    n_steps = int(math.ceil(y_max / h))
    for _ in range(n_steps):
        phi1, dphi1 = _rk4_step(fsc, phi, dphi, h)
        # exit above one with positive slope
        if phi1 >= 1.0 and dphi1 > 0.0:
            dy, (pe, ve) = _locate_event(fsc, phi, dphi, h, lambda p, v: p - 1.0)
            y += dy
            ys.append(y); phis.append(pe); dphis.append(ve)
            s_max = pe
            cls = EXITS_ABOVE_ONE
            break
        # slope zero: the maximum position K
        if math.isinf(K) and dphi > 0.0 and dphi1 <= 0.0:
            dy, (pe, ve) = _locate_event(fsc, phi, dphi, h, lambda p, v: v)
            K = y + dy
            s_max = pe
        # return event on the descending branch
        if not math.isinf(K) and g_return(phi, dphi) > 0.0 and g_return(phi1, dphi1) <= 0.0:
            dy, (pe, ve) = _locate_event(fsc, phi, dphi, h, g_return)
            y += dy
            ys.append(y); phis.append(pe); dphis.append(ve)
            L = y
            cls = RETURNS_TO_BOUNDARY
            break
        phi, dphi = phi1, dphi1
        y += h
        ys.append(y); phis.append(phi); dphis.append(dphi)

    if cls == ASYMPTOTIC_TO_ONE and math.isinf(s_max):
        s_max = max(phis)
    return ShootingOutcome(alpha, float(s_max), K, L, cls,
                           np.asarray(ys), np.asarray(phis), np.asarray(dphis))


def first_integral_residual(outcome: ShootingOutcome, r: Reaction, b: Boundary) -> float:
    """max over samples of |(phi')^2 - alpha^2 + 2 int_{rho a}^{phi} f|."""
    a = outcome.alpha
    start = b.rho * a + r.lo
    mask = outcome.ys <= (outcome.K if math.isfinite(outcome.K) else np.inf)
    phis = outcome.phis[mask]
    dphis = outcome.dphis[mask]
    F0 = r.F(start)
    res = dphis ** 2 - a ** 2 + 2.0 * (np.asarray(r.F(phis)) - F0)
    return float(np.max(np.abs(res))) if res.size else 0.0


def robin_balance(r: Reaction, s: float) -> float:
    """Lambda(s) = (2 / s^2) * int_s^1 f, strictly decreasing from +inf to 0."""
    if s <= 0:
        return math.inf
    return 2.0 * (r.F_scalar(1.0) - r.F_scalar(s)) / s ** 2


def critical_slope(r: Reaction, b: Boundary) -> float:
    """The slope a_bar = phi'(0) of the half-line steady state."""
    if b.neumann:
        raise ShootingError("no steady slope under the Neumann sentinel")
    if b.rho == 0.0:
        return math.sqrt(2.0 * (r.F_scalar(1.0) - r.F_scalar(r.lo)))
    if r.is_bistable:
        raise ShootingError(
            "bistable with rho > 0 rejected: the boundary ODE may admit oscillatory solutions"
        )
    return _alpha_of_peak(r, b, 1.0)


def halfline_steady_state(r: Reaction, b: Boundary, Y: float, h: float = 5e-3) -> Profile:
    """The increasing steady state phi with phi(+inf) = 1, sampled on [0, Y].

    Integrated through the conserved first-order reduction
    phi' = sqrt(2 (F(1) - F(phi))), which shares the shooting trajectory of
    slope a_bar but stays on the connection for arbitrarily large Y.
    """
    a_bar = critical_slope(r, b)
    F1 = r.F_scalar(1.0)

    def slope(p):
        return math.sqrt(max(2.0 * (F1 - r.F_scalar(p)), 0.0))

    n = int(round(Y / h))
    ys = np.linspace(0.0, n * h, n + 1)
    vals = np.empty(n + 1)
    phi = b.rho * a_bar
    vals[0] = phi
    for i in range(n):
        k1 = slope(phi)
        k2 = slope(phi + 0.5 * h * k1)
        k3 = slope(phi + 0.5 * h * k2)
        k4 = slope(phi + h * k3)
        phi = min(phi + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4), 1.0)
        vals[i + 1] = phi
    if vals[-1] <= 1.0 - 1e-3:
        raise ShootingError(
            f"extend domain: phi({Y}) = {vals[-1]:.6f} has not saturated (need > {1 - 1e-3})"
        )
    return Profile(ys, vals, b)


@dataclass
class LengthMapPoint:
    alpha: float
    s_max: float
    K: float
    L_return: float
    K_integral: float
    classification: str


def _peak_value(r: Reaction, b: Boundary, alpha: float) -> float:
    """First root of alpha^2 = 2 F^alpha(s) above the start value."""
    start = b.rho * alpha + r.lo
    F0 = r.F_scalar(start)

    def g(s):
        return alpha ** 2 - 2.0 * (r.F_scalar(s) - F0)

    lo = start
    step = (1.0 - start) / 400.0
    hi = lo + step
    while hi < 1.0 and g(hi) > 0:
        lo, hi = hi, hi + step
    if g(hi) > 0:
        return 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    return 0.5 * (lo + hi)


def _fprime(r: Reaction, s: float, ds: float = 1e-7) -> float:
    return (r.f_scalar(s + ds) - r.f_scalar(s - ds)) / (2.0 * ds)


def length_map(r: Reaction, b: Boundary, alpha: float, h: float = 5e-3,
               y_max: float = 4000.0) -> LengthMapPoint:
    """(s^a, K^a, L^a) by event-detected shooting, with the improper length
    integral as an independent check on K^a.

    The integral's endpoint singularity is split off at s^a - eps0 and
    integrated in closed form from the local expansion
    alpha^2 - 2F ~ 2 f(s^a) z - f'(s^a) z^2 with z = s^a - s.
    """
    a_bar = critical_slope(r, b)
    if not 0.0 < alpha < a_bar:
        raise ShootingError(f"alpha must lie in (0, a_bar={a_bar:.6g}), got {alpha}")
    out = shoot(r, b, alpha, h=min(h, 1e-2), y_max=y_max)
    if out.classification != RETURNS_TO_BOUNDARY:
        raise ShootingError(f"trajectory did not return within y_max={y_max}: {out.classification}")

    s_peak = _peak_value(r, b, alpha)
    start = b.rho * alpha + r.lo
    k_integral = _segment_length(r, start, s_peak)
    return LengthMapPoint(alpha, out.s_max, out.K, out.L_return, k_integral, out.classification)


_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_min(fn, lo, hi, tol=1e-8):
    """Golden-section minimum; ties resolve toward the smaller argument."""
    x1 = hi - _INV_GOLDEN * (hi - lo)
    x2 = lo + _INV_GOLDEN * (hi - lo)
    f1, f2 = fn(x1), fn(x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_GOLDEN * (hi - lo)
            f1 = fn(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_GOLDEN * (hi - lo)
            f2 = fn(x2)
    return 0.5 * (lo + hi)


@dataclass
class StripStateReport:
    L: float
    phi_L: Profile
    psi_L: Profile
    alpha_phi: float
    alpha_psi: float
    peak_phi: float
    peak_psi: float
    A_ODE_estimate: float
    energies: tuple[float, float, float]  # (H(phi_L), H(0), H(psi_L))
    symmetric: bool = False


def _alpha_of_peak(r: Reaction, b: Boundary, s_peak: float) -> float:
    """Initial slope whose trajectory peaks at s_peak:
    alpha^2 = 2 (F(s_peak) - F(rho alpha + lo))."""
    F_pk = r.F_scalar(s_peak)
    if b.rho == 0.0:
        return math.sqrt(max(2.0 * (F_pk - r.F_scalar(r.lo)), 0.0))

    def g(a):
        return a * a - 2.0 * (F_pk - r.F_scalar(b.rho * a + r.lo))

    hi = 1.0
    while g(hi) < 0:
        hi *= 2.0
        if hi > 1e6:
            raise ShootingError("failed to solve the Robin start balance")
    lo = 0.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# Gauss-Legendre nodes/weights on [0, 1]; exact for polynomials of degree 15,
# so the shell 2 int_{s-z}^{s} f is evaluated exactly for the built-in families
# without the catastrophic cancellation of F(s) - F(s - z) near the peak.
_GL8_T = np.array([0.01985507175123188, 0.10166676129318664, 0.2372337950418355,
                   0.40828267875217505, 0.5917173212478249, 0.7627662049581645,
                   0.8983332387068134, 0.9801449282487681])
_GL8_W = np.array([0.05061426814518813, 0.11119051722668724, 0.15685332293894364,
                   0.18134189168918099, 0.18134189168918099, 0.15685332293894364,
                   0.11119051722668724, 0.05061426814518813])


def _shell_slope_near_peak(r: Reaction, s_peak: float):
    """g(z) = 2 (F(s_peak) - F(s_peak - z)) / z via an 8-node rule on f."""
    fsc = r.f_scalar
    nodes = _GL8_T
    weights = _GL8_W

    def g(z):
        acc = 0.0
        for i in range(8):
            acc += weights[i] * fsc(s_peak - z * nodes[i])
        return 2.0 * acc

    return g


def _segment_length(r: Reaction, s_from: float, s_peak: float) -> float:
    """int_{s_from}^{s_peak} ds / sqrt(2 (F(s_peak) - F(s))).

    The square-root endpoint is split off at s_peak - eps; there the shell
    factors as z * g(z) with g smooth and positive, and the substitution
    z = w^2 removes the singularity (g(0) -> 0 at a near-double root gives
    the logarithmic divergence, which the substituted integrand resolves).
    """
    F_pk = r.F_scalar(s_peak)
    Fs = r.F_scalar

    def integrand(s):
        return 1.0 / math.sqrt(max(2.0 * (F_pk - Fs(s)), 1e-300))

    a_coef = 2.0 * r.f_scalar(s_peak)
    if a_coef <= 0:
        raise ShootingError(f"no positive reaction at the peak {s_peak}")
    eps0 = min(1e-4, 0.25 * (s_peak - s_from))
    split = s_peak - eps0
    pts = [r.theta] if (r.is_ignition and s_from < r.theta < split) else None
    main, _ = quad(integrand, s_from, split, points=pts, limit=200)

    g = _shell_slope_near_peak(r, s_peak)
    w_hi = math.sqrt(eps0)
    b_mag = abs(_fprime(r, s_peak))
    w_knee = math.sqrt(a_coef / b_mag) if b_mag > 1e-12 else w_hi
    knee = [w_knee] if 0.0 < w_knee < w_hi else None
    with warnings.catch_warnings():
        # near-double-root peaks leave a residual roundoff warning although
        # the value is converged (cross-checked against event detection)
        warnings.simplefilter("ignore", IntegrationWarning)
        inner, _ = quad(lambda w: 2.0 / math.sqrt(max(g(w * w), 1e-300)),
                        0.0, w_hi, points=knee, limit=200)
    return main + inner


def _symmetric_end(r: Reaction, b: Boundary, s_peak: float) -> float:
    """Descending value where phi' = -phi / rho, i.e.
    2 (F(s_peak) - F(phi)) = phi^2 / rho^2 (largest root below s_peak)."""
    F_pk = r.F_scalar(s_peak)

    def g(p):
        return 2.0 * (F_pk - r.F_scalar(p)) - (p / b.rho) ** 2

    hi = s_peak
    step = s_peak / 200.0
    lo = hi - step
    while lo > 0 and g(lo) < 0:
        hi, lo = lo, lo - step
    if lo <= 0:
        lo = 0.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def strip_length(r: Reaction, b: Boundary, s_peak: float, symmetric: bool = False) -> float:
    """Total interval length of the trajectory peaking at s_peak."""
    alpha = _alpha_of_peak(r, b, s_peak)
    start = b.rho * alpha + r.lo
    rise = _segment_length(r, start, s_peak)
    if symmetric:
        end = _symmetric_end(r, b, s_peak)
        fall = _segment_length(r, end, s_peak)
    else:
        fall = _segment_length(r, r.lo, s_peak)
    return rise + fall


def _projected_trajectory(r: Reaction, s_peak: float, start: float, dphi0: float,
                          y_len: float, h: float) -> np.ndarray:
    """RK4 trajectory of phi'' = -f(phi) re-projected onto the conserved shell
    (phi')^2 = 2 (F(s_peak) - F(phi)) after every step; the projection removes
    the transverse shooting instability while keeping the turn at the peak."""
    F_pk = r.F_scalar(s_peak)
    fsc = r.f_scalar
    g_near = _shell_slope_near_peak(r, s_peak)

    def shell_speed(p):
        z = s_peak - p
        if z <= 0.0:
            return 0.0
        if z < 1e-3:
            # the F difference cancels catastrophically this close to the
            # peak; the factored shell z g(z) is exact for polynomials
            return math.sqrt(max(z * g_near(z), 0.0))
        return math.sqrt(max(2.0 * (F_pk - r.F_scalar(p)), 0.0))

    n = int(round(y_len / h))
    vals = np.empty(n + 1)
    phi, v = start, dphi0 if dphi0 != 0.0 else shell_speed(start)
    vals[0] = phi
    for i in range(n):
        phi, v = _rk4_step(fsc, phi, v, h)
        mag = shell_speed(phi)
        v = math.copysign(mag, v) if v != 0.0 else mag
        vals[i + 1] = phi
    return vals


def _strip_profile(r: Reaction, b: Boundary, s_peak: float, L: float,
                   profile_h: float, symmetric: bool) -> Profile:
    h_int = profile_h / max(1, int(math.ceil(profile_h / 5e-3)))
    stride = int(round(profile_h / h_int))
    n = int(round(L / profile_h))
    ys = np.linspace(0.0, n * profile_h, n + 1)
    alpha = _alpha_of_peak(r, b, s_peak)
    start = b.rho * alpha + r.lo
    even = symmetric or b.rho == 0.0
    if even:
        # rise to the peak at L/2, then mirror
        half = _projected_trajectory(r, s_peak, start, alpha, L / 2.0 + profile_h, h_int)
        idx = np.minimum(np.arange(n + 1) * stride, half.size - 1)
        vals = half[idx]
        mid = n // 2
        for i in range(0, (n + 1) // 2 + 1):
            if n - i > mid:
                vals[n - i] = vals[i]
    else:
        full = _projected_trajectory(r, s_peak, start, alpha, L + profile_h, h_int)
        idx = np.minimum(np.arange(n + 1) * stride, full.size - 1)
        vals = full[idx]
    return Profile(ys, vals, b)


def strip_steady_states(
    r: Reaction,
    b: Boundary,
    L: float,
    profile_h: float = 0.01,
    symmetric: bool = False,
) -> StripStateReport:
    """The two nonzero interval states: the deep phi_L and the shallow psi_L.

    Both branches are parameterized by the trajectory's peak value (monotone
    in the initial slope), which stays well-conditioned arbitrarily close to
    the half-line connection; the minimum of the length map estimates the
    existence threshold.
    """
    if symmetric and b.rho == 0.0:
        raise ShootingError("symmetric interval states need rho > 0")
    vt = vartheta(r)

    def length(s_peak):
        return strip_length(r, b, s_peak, symmetric)

    s_lo = vt + 1e-6
    s_hi = 1.0 - 1e-14
    grid = np.concatenate([
        vt + (1.0 - vt) * np.linspace(1e-4, 0.98, 21),
        1.0 - np.geomspace(1e-12, 0.02 * (1.0 - vt), 8),
    ])
    grid = np.sort(grid)
    vals = [length(s) for s in grid]
    i_min = int(np.argmin(vals))
    g_lo = grid[max(i_min - 1, 0)]
    g_hi = grid[min(i_min + 1, len(grid) - 1)]
    s_mid = _golden_min(length, g_lo, g_hi)
    A_ode = length(s_mid)
    if not L > A_ode:
        raise ShootingError(
            f"no nonzero interval states at this L: L={L} <= min length {A_ode:.4f}"
        )

    def branch_root(sa, sb, increasing):
        # bisection for length = L; length - L changes sign on [sa, sb];
        # returns the best match if the float resolution wall is hit first
        best, best_diff = 0.5 * (sa + sb), math.inf
        for _ in range(200):
            mid = 0.5 * (sa + sb)
            if mid <= sa or mid >= sb:
                break
            diff = length(mid) - L
            if abs(diff) < abs(best_diff):
                best, best_diff = mid, diff
            if abs(diff) < 1e-7:
                return mid
            if (diff > 0) == increasing:
                sb = mid
            else:
                sa = mid
        return best

    # shallow branch on (vartheta, s_mid): length decreases from +inf
    sa = s_mid
    while length(sa) < L:
        sa = vt + 0.5 * (sa - vt)
        if sa - vt < 1e-15:
            raise ShootingError("failed to bracket the shallow branch")
    peak_psi = branch_root(sa, s_mid, increasing=False)

    # deep branch on (s_mid, 1): length increases to +inf
    sb = s_hi
    if length(sb) < L:
        raise ShootingError("deep branch cannot reach this L at double precision")
    peak_phi = branch_root(s_mid, sb, increasing=True)

    phi_L = _strip_profile(r, b, peak_phi, L, profile_h, symmetric)
    psi_L = _strip_profile(r, b, peak_psi, L, profile_h, symmetric)
    if not np.all(psi_L.values[1:-1] < phi_L.values[1:-1]):
        raise ShootingError("strip states are not strictly ordered; shooting failed")
    H_phi = energy(phi_L, r)
    H_psi = energy(psi_L, r)
    return StripStateReport(L, phi_L, psi_L,
                            _alpha_of_peak(r, b, peak_phi),
                            _alpha_of_peak(r, b, peak_psi),
                            peak_phi, peak_psi,
                            A_ode, (H_phi, 0.0, H_psi), symmetric)


def energy(p: Profile, r: Reaction) -> float:
    """H = int (phi')^2 - 2 F(phi) over the profile extent (trapezoid)."""
    dphi = p.derivative()
    integrand = dphi ** 2 - 2.0 * np.asarray(r.F(p.values))
    return float(np.trapezoid(integrand, p.y))


@dataclass
class RadialSubsolution:
    profile: Profile
    plateau_radius: float
    support_radius: float
    delta: float
    c_drift: float


def radial_subsolution(r: Reaction, delta: float, c_drift: float = 0.0,
                       h: float = 2e-3) -> RadialSubsolution:
    """Compactly supported radial subsolution: a plateau at vartheta + delta
    followed by the descending branch of the drifted ODE
    w'' + (c + 1/(R0 + y)) w' + f(w) = 0, with the plateau radius doubled
    until the branch reaches zero."""
    vt = vartheta(r)
    if not 0.0 < delta < 1.0 - vt:
        raise ShootingError(f"delta must lie in (0, {1 - vt:.4f}), got {delta}")
    if c_drift < 0:
        raise ShootingError("c_drift must be >= 0")
    m = vt + delta
    fsc = r.f_scalar

    def descend(R0):
        w, dw = m, 0.0
        ws = [w]
        y = 0.0
        budget = int(400.0 / h)
        for _ in range(budget):
            def rhs(state_w, state_v, yy):
                return state_v, -(c_drift + 1.0 / (R0 + yy)) * state_v - fsc(state_w)

            k1w, k1v = rhs(w, dw, y)
            k2w, k2v = rhs(w + 0.5 * h * k1w, dw + 0.5 * h * k1v, y + 0.5 * h)
            k3w, k3v = rhs(w + 0.5 * h * k2w, dw + 0.5 * h * k2v, y + 0.5 * h)
            k4w, k4v = rhs(w + h * k3w, dw + h * k3v, y + h)
            w1 = w + h / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w)
            dw1 = dw + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
            y += h
            if w1 <= 0.0:
                frac = w / (w - w1)
                ws.append(0.0)
                return np.array(ws), y - h + frac * h
            if dw1 >= 0.0 and y > 2 * h and w1 < m:
                return None, None  # turned around before reaching zero
            w, dw = w1, dw1
            ws.append(w)
        return None, None

    R0 = 1.0
    for _ in range(40):
        ws, K0 = descend(R0)
        if ws is not None:
            break
        R0 *= 2.0
    else:
        raise ShootingError(f"no subsolution at this (delta={delta}, c_drift={c_drift})")

    n_plateau = int(round(R0 / h))
    n_branch = ws.size - 1
    n_zero = int(round(5.0 / h))
    total = n_plateau + n_branch + n_zero
    rr = np.linspace(0.0, total * h, total + 1)
    vals = np.concatenate([
        np.full(n_plateau, m),
        ws,
        np.zeros(n_zero),
    ])
    return RadialSubsolution(Profile(rr, vals), R0, R0 + K0, delta, c_drift)


def subsolution_residual(sub: RadialSubsolution, r: Reaction) -> float:
    """min over the grid of the worst-angle operator
    v'' + v'/r + c v' + f(v); a valid subsolution keeps it >= -1e-6."""
    p = sub.profile
    h = p.h
    v = p.values
    rr = p.y
    interior = slice(1, -1)
    d2 = (v[2:] - 2 * v[1:-1] + v[:-2]) / h ** 2
    d1 = (v[2:] - v[:-2]) / (2 * h)
    rad = rr[interior]
    res = d2 + d1 / np.maximum(rad, h) + sub.c_drift * d1 + np.asarray(r.f(v[interior]))
    return float(np.min(res))
