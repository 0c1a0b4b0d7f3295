"""Explicit time stepping on the half-line, the whole line, and the truncated
half-plane, plus the extinction / invasion / spreading-speed experiments.

Stepping is forward Euler under a CFL that preserves the discrete comparison
principle, which several experiments and tests lean on directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import Field, Profile, write_csv
from .reaction import Boundary, Reaction
from .shooting import halfline_steady_state
from .stepping import DIRICHLET, NEUMANN, boundary_code, dt_limit, step_1d, step_2d


class ConfigError(ValueError):
    pass


class TruncationContamination(RuntimeError):
    pass


@dataclass
class EvolutionConfig:
    """Grid, step, and horizon for one evolution run."""

    hx: float
    hy: float | None
    dt: float
    T_final: float
    snapshot_dt: float = 1.0
    guard_level: float = 1e-3
    guard_cells: int = 5

    def __post_init__(self):
        limit = dt_limit(self.hx, self.hy)
        if self.dt > limit * (1.0 + 1e-12):
            raise ConfigError(
                f"dt={self.dt} violates the comparison-principle CFL (max {limit:.6g})"
            )
        if self.T_final <= 0:
            raise ConfigError("T_final must be positive")

    @classmethod
    def for_1d(cls, h: float, T_final: float, dt: float | None = None, **kw) -> "EvolutionConfig":
        return cls(hx=h, hy=None, dt=dt if dt is not None else dt_limit(h), T_final=T_final, **kw)

    @classmethod
    def for_2d(cls, h: float, T_final: float, dt: float | None = None, **kw) -> "EvolutionConfig":
        return cls(hx=h, hy=h, dt=dt if dt is not None else dt_limit(h, h), T_final=T_final, **kw)


def evolve_1d(r: Reaction, b: Boundary, u0: Profile, cfg: EvolutionConfig,
              collect: bool = True) -> list[tuple[float, Profile]]:
    """d_t u = d_y^2 u + f(u) on [0, Y]: ghost-node Robin/Dirichlet at y = 0,
    Dirichlet clamp u(Y) = u0(Y) at the far end."""
    if np.min(u0.values) < -1.0 or np.max(u0.values) > 2.0:
        raise ConfigError("initial data must lie within [-1, 2]")
    h = u0.h
    if abs(h - cfg.hx) > 1e-12:
        raise ConfigError("profile spacing does not match the config")
    left, rho = boundary_code(b)
    u = u0.values.copy()
    buf = np.empty_like(u)
    n_steps = int(round(cfg.T_final / cfg.dt))
    every = max(1, int(round(cfg.snapshot_dt / cfg.dt)))
    out = [(0.0, Profile(u0.y.copy(), u.copy(), b))]
    for n in range(1, n_steps + 1):
        step_1d(u, buf, h, cfg.dt, r, left, rho)
        u, buf = buf, u
        if collect and (n % every == 0 or n == n_steps):
            out.append((n * cfg.dt, Profile(u0.y.copy(), u.copy(), b)))
    if not collect:
        out.append((n_steps * cfg.dt, Profile(u0.y.copy(), u.copy(), b)))
    return out


def evolve_halfplane(r: Reaction, b: Boundary, u0: Field, cfg: EvolutionConfig,
                     guard: bool = True) -> list[tuple[float, Field]]:
    """Five-point stepping on the truncated half-plane: bottom row per the
    boundary, top and lateral edges Dirichlet 0 (Gaussian far-field decay).
    The run halts if the solution climbs within guard_cells of a truncation
    edge, which would contaminate the interior."""
    bottom, rho = boundary_code(b)
    u = u0.values.copy()
    buf = np.empty_like(u)
    n_steps = int(round(cfg.T_final / cfg.dt))
    every = max(1, int(round(cfg.snapshot_dt / cfg.dt)))
    snaps = [(0.0, Field(u0.x.copy(), u0.y.copy(), u.copy(), b, "dirichlet_zero"))]
    g = cfg.guard_cells
    for n in range(1, n_steps + 1):
        step_2d(u, buf, u0.hx, u0.hy, cfg.dt, 0.0, r, bottom, rho, DIRICHLET)
        u, buf = buf, u
        if n % every == 0 or n == n_steps:
            t = n * cfg.dt
            if guard and (
                np.max(np.abs(u[:g, :])) > cfg.guard_level
                or np.max(np.abs(u[-g:, :])) > cfg.guard_level
                or np.max(np.abs(u[:, -g:])) > cfg.guard_level
            ):
                raise TruncationContamination(
                    f"truncation contamination at t={t:g}: front within "
                    f"{g} cells of a truncation boundary"
                )
            snaps.append((t, Field(u0.x.copy(), u0.y.copy(), u.copy(), b, "dirichlet_zero")))
    return snaps


def ball_indicator(x: np.ndarray, y: np.ndarray, amplitude: float, radius: float,
                   center: tuple[float, float] | None = None) -> Field:
    """amplitude * 1_ball on the grid; the ball defaults to tangent-interior
    (center (0, radius))."""
    cx, cy = center if center is not None else (0.0, radius)
    xx, yy = np.meshgrid(x, y, indexing="ij")
    vals = np.where((xx - cx) ** 2 + (yy - cy) ** 2 <= radius ** 2, amplitude, 0.0)
    return Field(x, y, vals)


def _grid(lo: float, hi: float, h: float) -> np.ndarray:
    n = int(round((hi - lo) / h))
    return lo + h * np.arange(n + 1)


@dataclass
class ExperimentOutcome:
    outcome: str  # extinct | invaded | undecided
    detail: dict = field(default_factory=dict)
    sup_trace: list[tuple[float, float]] = field(default_factory=list)
    snapshots: list = field(default_factory=list)


def extinction_horizon(amplitude: float, radius: float, y_center: float,
                       tol: float = 1e-3) -> float:
    """Time at which the Dirichlet heat-kernel dipole bound
    amp * (R^2 / 4t) * min(1, (y0 + R) sqrt(2 / e t)) falls below tol / 2;
    below the ignition threshold the evolution is exactly the heat flow."""
    t = 8.0
    while t < 1e7:
        bound = amplitude * radius ** 2 / (4.0 * t) * min(
            1.0, (y_center + radius) * math.sqrt(2.0 / (math.e * t))
        )
        if bound < 0.5 * tol:
            return t
        t *= 1.25
    raise ConfigError("no finite extinction horizon from the heat bound")


def extinction_experiment(r: Reaction, b: Boundary, radius: float = 5.0,
                          amplitude: float | None = None, h: float = 0.25,
                          T_final: float | None = None, tol: float = 1e-3,
                          snapshot_dt: float = 5.0) -> ExperimentOutcome:
    """Initial data theta * 1_ball: the solution stays below theta, so it is
    driven to zero by boundary absorption and dispersion."""
    if not (r.is_ignition or r.is_bistable):
        raise ConfigError("extinction below threshold needs an ignition or bistable reaction")
    amp = r.theta if amplitude is None else amplitude
    if T_final is None:
        T_final = extinction_horizon(amp, radius, radius, tol)
    reach = math.sqrt(4.0 * T_final) + 3 * radius + 10.0
    x = _grid(-reach, reach, h)
    y = _grid(0.0, reach, h)
    u0 = ball_indicator(x, y, amp, radius)
    cfg = EvolutionConfig.for_2d(h, T_final, snapshot_dt=snapshot_dt)
    snaps = evolve_halfplane(r, b, u0, cfg, guard=False)
    trace = [(t, float(f.values.max())) for t, f in snaps]
    sup_final = trace[-1][1]
    outcome = "extinct" if sup_final < tol else "undecided"
    return ExperimentOutcome(outcome, {"sup_final": sup_final, "T_final": T_final},
                             trace, snaps)


def invasion_experiment(r: Reaction, b: Boundary, delta: float, radius: float,
                        h: float = 0.25, T_final: float = 150.0,
                        window_halfwidth: float = 10.0, window_height: float = 10.0,
                        tol: float = 0.05, snapshot_dt: float = 5.0,
                        domain_pad: float = 15.0, c_star: float | None = None
                        ) -> ExperimentOutcome:
    """Initial data (theta + delta) * 1_ball tangent to the wall; invasion is
    detected by convergence toward the half-line steady state on a centered
    window, extinction by the sup dropping below 1e-3."""
    amp = min(r.theta + delta, 1.0)
    speed_guess = c_star if c_star is not None else 1.0
    reach = radius + speed_guess * T_final + domain_pad
    x = _grid(-reach, reach, h)
    y = _grid(0.0, reach * 0.6 if reach * 0.6 > 30.0 else 30.0, h)
    u0 = ball_indicator(x, y, amp, radius)
    cfg = EvolutionConfig.for_2d(h, T_final, snapshot_dt=snapshot_dt)
    snaps = evolve_halfplane(r, b, u0, cfg, guard=True)
    trace = [(t, float(f.values.max())) for t, f in snaps]
    final = snaps[-1][1]
    phi = halfline_steady_state(r, b, float(final.y[-1]), h=min(h, 0.01))
    phi_on_grid = phi(final.y)
    mx = np.abs(final.x) <= window_halfwidth
    my = final.y <= window_height
    window_err = float(np.max(np.abs(final.values[np.ix_(mx, my)] - phi_on_grid[my][None, :])))
    sup_final = trace[-1][1]
    if window_err < tol:
        outcome = "invaded"
    elif sup_final < 1e-3:
        outcome = "extinct"
    else:
        outcome = "undecided"
    return ExperimentOutcome(outcome, {"window_error": window_err, "sup_final": sup_final},
                             trace, snaps)


@dataclass
class FrontTrace:
    times: np.ndarray
    radii: np.ndarray
    fit_speed: float
    fit_window: tuple[float, float]
    level: float
    y0: float

    def to_csv(self, path) -> None:
        write_csv(path, "t,radius", zip(self.times, self.radii))


def front_radius(f: Field, level: float, y0: float) -> float:
    """max{|x| : u(x, y0) >= level}, linearly interpolated between columns."""
    iy = int(round((y0 - f.y[0]) / f.hy))
    row = f.values[:, iy]
    above = np.nonzero(row >= level)[0]
    if above.size == 0:
        return math.nan
    i_hi = above[-1]
    r_right = abs(f.x[i_hi])
    if i_hi + 1 < row.size and row[i_hi] > row[i_hi + 1]:
        frac = (row[i_hi] - level) / (row[i_hi] - row[i_hi + 1])
        r_right = abs(f.x[i_hi] + frac * f.hx)
    i_lo = above[0]
    r_left = abs(f.x[i_lo])
    if i_lo > 0 and row[i_lo] > row[i_lo - 1]:
        frac = (row[i_lo] - level) / (row[i_lo] - row[i_lo - 1])
        r_left = abs(f.x[i_lo] - frac * f.hx)
    return max(r_right, r_left)


def measure_spreading_speed(snapshots, r: Reaction, b: Boundary,
                            level_fraction: float = 0.5, y0: float = 5.0
                            ) -> FrontTrace:
    """Front radius at height y0 against time; the speed is the least-squares
    slope over the last half of the usable window (the early acceleration
    transient is discarded)."""
    top = float(snapshots[-1][1].y[-1])
    phi = halfline_steady_state(r, b, top, h=0.01)
    level = level_fraction * float(phi(y0))
    times, radii = [], []
    for t, f in snapshots:
        rad = front_radius(f, level, y0)
        if not math.isnan(rad):
            times.append(t)
            radii.append(rad)
    if len(times) < 10:
        raise ConfigError(f"insufficient window: only {len(times)} usable snapshots")
    times = np.asarray(times)
    radii = np.asarray(radii)
    t_mid = times[0] + 0.5 * (times[-1] - times[0])
    m = times >= t_mid
    A = np.vstack([times[m], np.ones(int(m.sum()))]).T
    slope, _ = np.linalg.lstsq(A, radii[m], rcond=None)[0]
    return FrontTrace(times, radii, float(slope), (float(times[m][0]), float(times[-1])),
                      level, y0)


def slab_convergence_check(snapshots, r: Reaction, b: Boundary, ell: float,
                           c_fraction: float, c_star: float) -> float:
    """max over {|x| <= c_fraction c* T, 0 <= y <= ell} of |u(T) - phi(y)|."""
    T, final = snapshots[-1]
    phi = halfline_steady_state(r, b, float(final.y[-1]), h=0.01)
    phi_on_grid = phi(final.y)
    mx = np.abs(final.x) <= max(c_fraction * c_star * T, final.hx)
    my = final.y <= ell
    return float(np.max(np.abs(final.values[np.ix_(mx, my)] - phi_on_grid[my][None, :])))


def front_speed_1d(r: Reaction, h: float = 0.05, dt: float | None = None,
                   T_final: float = 160.0, level: float = 0.5,
                   domain: float | None = None, c_hint: float = 1.0,
                   return_trace: bool = False):
    """1D whole-line front-speed oracle: evolve a plateau through the even
    reflection at 0 (Neumann) and fit the level crossing over the last half."""
    X = domain if domain is not None else c_hint * T_final + 40.0
    x = _grid(0.0, X, h)
    u0 = Profile(x, np.where(x < 10.0, 1.0, 0.0), Boundary.neumann_sentinel())
    cfg = EvolutionConfig.for_1d(h, T_final, dt=dt, snapshot_dt=1.0)
    u = u0.values.copy()
    buf = np.empty_like(u)
    n_steps = int(round(cfg.T_final / cfg.dt))
    every = max(1, int(round(cfg.snapshot_dt / cfg.dt)))
    times, pos = [], []
    for n in range(1, n_steps + 1):
        step_1d(u, buf, h, cfg.dt, r, NEUMANN, 1.0)
        u, buf = buf, u
        if n % every == 0:
            above = np.nonzero(u >= level)[0]
            if above.size == 0 or above[-1] + 1 >= u.size:
                continue
            i = above[-1]
            frac = (u[i] - level) / (u[i] - u[i + 1])
            times.append(n * cfg.dt)
            pos.append(x[i] + frac * h)
    if u[-1] > 1e-6:
        raise TruncationContamination("1D front reached the truncation boundary")
    times = np.asarray(times)
    pos = np.asarray(pos)
    m = times >= times[0] + 0.5 * (times[-1] - times[0])
    A = np.vstack([times[m], np.ones(int(m.sum()))]).T
    slope, _ = np.linalg.lstsq(A, pos[m], rcond=None)[0]
    if return_trace:
        return float(slope), times, pos
    return float(slope)
