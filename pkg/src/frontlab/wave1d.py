"""One-dimensional traveling waves: the unique ignition/bistable speed by
phase-plane bisection, monostable profiles at prescribed speeds, and the
measured monostable minimal speed.

The phase-plane trajectory leaves the saddle (1, 0) along its unstable
eigenvector; overshoot (crosses the rest state with negative slope) means the
speed is too small, undershoot (slope turns around first) too large.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .grid import Profile, write_csv
from .parabolic import front_speed_1d
from .reaction import Boundary, Reaction, epsilon_max, epsilon_modify, vartheta

__all__ = [
    "Wave1D", "MinimalSpeed", "NoMonotoneConnection", "wave_speed_bistable_ignition",
    "minimal_speed_monostable", "wave_profile_at_speed", "epsilon_modify", "epsilon_max",
    "classify_speed", "OVERSHOOT", "UNDERSHOOT",
]

OVERSHOOT = "overshoot"  # crosses the rest state with negative slope: c too small
UNDERSHOOT = "undershoot"  # slope vanishes above the rest state: c too large

_SEED = 1e-6
_XI_MAX = 4000.0


class NoMonotoneConnection(RuntimeError):
    pass


class BracketError(RuntimeError):
    pass


@dataclass
class Wave1D:
    speed: float
    profile: Profile
    left_value: float
    right_value: float
    history: list[tuple[float, str]] = field(default_factory=list)

    def history_to_csv(self, path) -> None:
        write_csv(path, "c,classification",
                  ((c, 0.0 if cls == OVERSHOOT else 1.0) for c, cls in self.history))


def _unstable_eigenvalue(r: Reaction, c: float) -> float:
    s1 = abs(r.right_slope)
    return 0.5 * (-c + math.sqrt(c * c + 4.0 * s1))


def _integrate_from_saddle(r: Reaction, c: float, xi_max: float = _XI_MAX):
    """Saddle trajectory, stopped at the floor lo + 1e-9 (a decaying tail or
    an imminent crossing of the rest state) so events stay well-conditioned."""
    lam = _unstable_eigenvalue(r, c)
    u0 = [1.0 - _SEED, -_SEED * lam]
    fsc = r.f_scalar
    lo = r.lo

    def rhs(_, s):
        return [s[1], -c * s[1] - fsc(s[0])]

    def ev_floor(_, s):
        return s[0] - (lo + 1e-9)

    ev_floor.terminal = True
    ev_floor.direction = -1

    def ev_turn(_, s):
        return s[1]

    ev_turn.terminal = False
    ev_turn.direction = 1

    sol = solve_ivp(rhs, (0.0, xi_max), u0, events=(ev_floor, ev_turn),
                    rtol=1e-10, atol=1e-12, dense_output=True, max_step=1.0)
    return sol


def classify_speed(r: Reaction, c: float) -> str:
    """Overshoot / undershoot classification of the saddle trajectory."""
    sol = _integrate_from_saddle(r, c)
    lo = r.lo
    vt = vartheta(r)
    band_lo = lo + 0.5 * (vt - lo)
    for te in sol.t_events[1]:
        u_turn = float(sol.sol(te)[0])
        if band_lo < u_turn < 1.0:
            return UNDERSHOOT
    if sol.t_events[0].size:
        v_at = float(sol.sol(sol.t_events[0][0])[1])
        return OVERSHOOT if v_at < 0.0 else UNDERSHOOT
    if sol.t_events[1].size:
        # turned around below the band and never reached the floor
        return UNDERSHOOT
    u_end, v_end = sol.y[0, -1], sol.y[1, -1]
    if abs(v_end) < 1e-9 and u_end > lo + 1e-8:
        return UNDERSHOOT  # exponential stall above the rest state
    raise BracketError(f"unclassifiable trajectory at c={c}: end ({u_end:.3g}, {v_end:.3g})")


def _profile_from_trajectory(r: Reaction, c: float, d_xi: float = 0.01) -> Profile:
    sol = _integrate_from_saddle(r, c)
    lo = r.lo
    if sol.t_events[0].size:
        xi_end = float(sol.t_events[0][0])
    elif sol.t_events[1].size:
        xi_end = float(sol.t_events[1][0])
    else:
        xi_end = float(sol.t[-1])
    n = int(xi_end / d_xi)
    xi = d_xi * np.arange(n + 1)
    vals = sol.sol(xi)[0]
    vals = np.clip(vals, lo, 1.0)
    return Profile(xi, vals)


def _normalize_half_crossing(p: Profile, level: float) -> Profile:
    """Shift the moving coordinate so the profile crosses `level` at 0."""
    v = p.values
    below = np.nonzero(v <= level)[0]
    if below.size == 0 or below[0] == 0:
        return p
    i = below[0]
    frac = (v[i - 1] - level) / (v[i - 1] - v[i])
    shift = p.y[i - 1] + frac * p.h
    return Profile(p.y - shift, v.copy())


def wave_speed_bistable_ignition(r: Reaction, tol: float = 1e-6) -> Wave1D:
    """The unique wave speed by bisection on the phase-plane classification.

    The bracket starts at [0, 2 sqrt(sup f')] and must classify overshoot at
    0 and undershoot at the top; it is widened (and reported) otherwise.
    """
    if r.is_monostable:
        raise NoMonotoneConnection(
            "monostable reactions have a minimal speed; use minimal_speed_monostable"
        )
    s = np.linspace(r.lo, 1.0, 4001)
    fp = np.diff(np.asarray(r.f(s))) / (s[1] - s[0])
    c_hi = 2.0 * math.sqrt(max(float(np.max(fp)), 1e-12))
    history: list[tuple[float, str]] = []

    cls_lo = classify_speed(r, 0.0)
    history.append((0.0, cls_lo))
    if cls_lo != OVERSHOOT:
        raise BracketError("no overshoot at c = 0; (B3) or the hypotheses fail")
    cls_hi = classify_speed(r, c_hi)
    history.append((c_hi, cls_hi))
    widenings = 0
    while cls_hi != UNDERSHOOT:
        c_hi *= 2.0
        widenings += 1
        if widenings > 4:
            raise BracketError(f"no undershoot up to c = {c_hi}")
        cls_hi = classify_speed(r, c_hi)
        history.append((c_hi, cls_hi))

    c_lo = 0.0
    while c_hi - c_lo > tol:
        mid = 0.5 * (c_lo + c_hi)
        cls = classify_speed(r, mid)
        history.append((mid, cls))
        if cls == OVERSHOOT:
            c_lo = mid
        else:
            c_hi = mid
    c_star = 0.5 * (c_lo + c_hi)
    prof = _profile_from_trajectory(r, c_hi)  # undershoot side stays monotone
    prof = _normalize_half_crossing(prof, 0.5 * (1.0 + r.lo))
    wave = Wave1D(c_star, prof, float(prof.values[0]), float(prof.values[-1]), history)
    if r.is_bistable and not c_star > 0:
        raise BracketError("bistable wave speed should be positive under (B3)")
    return wave


@dataclass
class MinimalSpeed:
    measured: float
    linear_bound: float
    below_linear_flag: bool
    trace: tuple[np.ndarray, np.ndarray] | None = None


def minimal_speed_monostable(r: Reaction, h: float = 0.05, dt: float | None = None,
                             T_final: float = 160.0) -> MinimalSpeed:
    """Spreading-speed measurement from a 1D whole-line run, reconciled with
    the linearization bound 2 sqrt(f'(0+))."""
    if not r.is_monostable:
        raise NoMonotoneConnection("minimal speed applies to monostable reactions")
    bound = 2.0 * math.sqrt(r.left_slope)
    measured, times, pos = front_speed_1d(r, h=h, dt=dt, T_final=T_final,
                                          c_hint=bound, return_trace=True)
    return MinimalSpeed(measured, bound, measured < 0.98 * bound, (times, pos))


def wave_profile_at_speed(r: Reaction, c: float, d_xi: float = 0.01) -> Wave1D:
    """Monostable wave of speed c >= c_*, normalized so U(0) = 1/2."""
    if not r.is_monostable:
        raise NoMonotoneConnection("prescribed-speed profiles are monostable constructions")
    sol = _integrate_from_saddle(r, c, xi_max=_XI_MAX)
    if sol.t_events[0].size and float(sol.sol(sol.t_events[0][0])[1]) < -1e-6:
        raise NoMonotoneConnection(
            f"no monotone connection at c={c}: trajectory crosses the rest state"
        )
    turn_in_range = [
        te for te in sol.t_events[1]
        if float(sol.sol(te)[0]) > r.lo + 1e-7
    ]
    if turn_in_range:
        raise NoMonotoneConnection(
            f"no monotone connection at c={c}: slope turns at u="
            f"{float(sol.sol(turn_in_range[0])[0]):.4g}"
        )
    xi_end = float(sol.t[-1])
    n = int(xi_end / d_xi)
    xi = d_xi * np.arange(n + 1)
    vals = np.clip(sol.sol(xi)[0], 0.0, 1.0)
    prof = _normalize_half_crossing(Profile(xi, vals), 0.5)
    return Wave1D(c, prof, float(vals[0]), float(vals[-1]))


def wave_residual(w: Wave1D, r: Reaction) -> float:
    """max interior |U'' + c U' + f(U)| on the sampled profile."""
    v = w.profile.values
    h = w.profile.h
    d2 = (v[2:] - 2 * v[1:-1] + v[:-2]) / h ** 2
    d1 = (v[2:] - v[:-2]) / (2 * h)
    res = d2 + w.speed * d1 + np.asarray(r.f(v[1:-1]))
    return float(np.max(np.abs(res)))
