"""Explicit Euler stencil kernels for the parabolic and relaxation solvers.

One jitted kernel serves the half-plane evolution, the box relaxation, and
the 1D runs; built-in reactions are dispatched by a small integer code so the
whole step stays inside the kernel.  Table reactions fall back to a numpy
implementation with identical arithmetic.  All kernels are single-threaded
and deterministic.
"""
from __future__ import annotations

import math

import numpy as np

from .reaction import Reaction

try:
    from numba import njit

    _HAVE_NUMBA = True
except Exception:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap(args[0]) if args and callable(args[0]) else wrap


# boundary type codes
DIRICHLET = 0  # row is held fixed at its current values
ROBIN = 1  # ghost node u_{-1} = u_1 - 2 h u_0 / rho
NEUMANN = 2  # ghost node u_{-1} = u_1

# reaction family codes
_R_ZERO, _R_KPP, _R_IGNITION, _R_CUBIC, _R_CUBIC_EPS = 0, 1, 2, 3, 4


def reaction_code(r: Reaction | None):
    """(code, p1, p2) for the jitted kernels, or None for the numpy path."""
    if r is None:
        return (_R_ZERO, 0.0, 0.0)
    if r.family == "kpp":
        return (_R_KPP, 0.0, 0.0)
    if r.family == "ignition":
        return (_R_IGNITION, r.params[0], 0.0)
    if r.family == "cubic":
        return (_R_CUBIC, r.params[0], 0.0)
    if r.family == "cubic_eps":
        return (_R_CUBIC_EPS, r.params[0], r.params[1])
    return None


def dt_limit(hx: float, hy: float | None = None, c: float = 0.0) -> float:
    """Largest stable explicit step: 0.96 of the positivity limit of the
    stencil, reduced by the convection factor 1 / (1 + |c| h / 2)."""
    s = 1.0 / hx ** 2 + (1.0 / hy ** 2 if hy is not None else 0.0)
    h_min = hx if hy is None else min(hx, hy)
    return 0.96 / (2.0 * s) / (1.0 + abs(c) * h_min / 2.0)


@njit(cache=True, fastmath=False)
def _f_eval(code, p1, p2, u):
    if code == _R_ZERO:
        return 0.0
    if code == _R_KPP:
        if u <= 0.0 or u >= 1.0:
            return 0.0
        return u * (1.0 - u)
    if code == _R_IGNITION:
        if u <= p1 or u >= 1.0:
            return 0.0
        return (u - p1) * (1.0 - u)
    if code == _R_CUBIC:
        if u <= 0.0 or u >= 1.0:
            return 0.0
        return u * (1.0 - u) * (u - p1)
    # cubic with the eps dip on [-eps, eps]
    v = 0.0
    if 0.0 < u < 1.0:
        v = u * (1.0 - u) * (u - p1)
    if -p2 < u < p2:
        a_coef = 27.0 / (64.0 * p2)
        v -= a_coef * (u + p2) * (p2 - u) ** 2
    return v


@njit(cache=True, fastmath=False)
def _step_2d_jit(u, out, hx, hy, dt, c, code, p1, p2,
                 bottom_type, rho_b, top_type, rho_t):
    nx, ny = u.shape
    ihx2 = 1.0 / (hx * hx)
    ihy2 = 1.0 / (hy * hy)
    i2hx = 1.0 / (2.0 * hx)
    maxdiff = 0.0
    for ix in range(nx):
        out[ix, 0] = u[ix, 0]
        out[ix, ny - 1] = u[ix, ny - 1]
    for iy in range(ny):
        out[0, iy] = u[0, iy]
        out[nx - 1, iy] = u[nx - 1, iy]
    jy0 = 1 if bottom_type == DIRICHLET else 0
    jy1 = ny - 1 if top_type == DIRICHLET else ny
    for ix in range(1, nx - 1):
        for iy in range(jy0, jy1):
            uc = u[ix, iy]
            if iy == 0:
                if bottom_type == ROBIN:
                    u_dn = u[ix, 1] - 2.0 * hy * uc / rho_b
                else:
                    u_dn = u[ix, 1]
            else:
                u_dn = u[ix, iy - 1]
            if iy == ny - 1:
                if top_type == ROBIN:
                    u_up = u[ix, ny - 2] - 2.0 * hy * uc / rho_t
                else:
                    u_up = u[ix, ny - 2]
            else:
                u_up = u[ix, iy + 1]
            lap = (u[ix + 1, iy] - 2.0 * uc + u[ix - 1, iy]) * ihx2 \
                + (u_up - 2.0 * uc + u_dn) * ihy2
            adv = c * (u[ix + 1, iy] - u[ix - 1, iy]) * i2hx
            new = uc + dt * (lap + adv + _f_eval(code, p1, p2, uc))
            out[ix, iy] = new
            d = new - uc
            if d < 0.0:
                d = -d
            if d > maxdiff:
                maxdiff = d
    return maxdiff


def _step_2d_numpy(u, out, hx, hy, dt, c, f_vec,
                   bottom_type, rho_b, top_type, rho_t):
    nx, ny = u.shape
    out[:] = u
    lo = 1 if bottom_type == DIRICHLET else 0
    hi = ny - 1 if top_type == DIRICHLET else ny
    core = u[1:-1, lo:hi]
    up = np.empty_like(core)
    dn = np.empty_like(core)
    up[:, : hi - lo - 1] = u[1:-1, lo + 1:hi]
    dn[:, 1:] = u[1:-1, lo:hi - 1]
    if lo == 0:
        ghost = u[1:-1, 1].copy()
        if bottom_type == ROBIN:
            ghost -= 2.0 * hy * u[1:-1, 0] / rho_b
        dn[:, 0] = ghost
    else:
        dn[:, 0] = u[1:-1, lo - 1]
    if hi == ny:
        ghost = u[1:-1, ny - 2].copy()
        if top_type == ROBIN:
            ghost -= 2.0 * hy * u[1:-1, ny - 1] / rho_t
        up[:, -1] = ghost
    else:
        up[:, -1] = u[1:-1, hi]
    lap = (u[2:, lo:hi] - 2 * core + u[:-2, lo:hi]) / hx ** 2 + (up - 2 * core + dn) / hy ** 2
    adv = c * (u[2:, lo:hi] - u[:-2, lo:hi]) / (2 * hx)
    new = core + dt * (lap + adv + f_vec(core))
    out[1:-1, lo:hi] = new
    return float(np.max(np.abs(new - core))) if new.size else 0.0


def step_2d(u, out, hx, hy, dt, c, r: Reaction | None,
            bottom_type, rho_b, top_type, rho_t=1.0):
    """One explicit step; returns the max pointwise change."""
    rc = reaction_code(r)
    if rc is not None and _HAVE_NUMBA:
        return _step_2d_jit(u, out, hx, hy, dt, c, rc[0], rc[1], rc[2],
                            bottom_type, rho_b, top_type, rho_t)
    f_vec = (lambda x: np.zeros_like(x)) if r is None else (lambda x: np.asarray(r.f(x)))
    return _step_2d_numpy(u, out, hx, hy, dt, c, f_vec,
                          bottom_type, rho_b, top_type, rho_t)


@njit(cache=True, fastmath=False)
def _step_1d_jit(u, out, h, dt, code, p1, p2, left_type, rho_l):
    n = u.shape[0]
    ih2 = 1.0 / (h * h)
    maxdiff = 0.0
    out[n - 1] = u[n - 1]
    j0 = 1 if left_type == DIRICHLET else 0
    if left_type == DIRICHLET:
        out[0] = u[0]
    for i in range(j0, n - 1):
        uc = u[i]
        if i == 0:
            if left_type == ROBIN:
                u_l = u[1] - 2.0 * h * uc / rho_l
            else:
                u_l = u[1]
        else:
            u_l = u[i - 1]
        lap = (u[i + 1] - 2.0 * uc + u_l) * ih2
        new = uc + dt * (lap + _f_eval(code, p1, p2, uc))
        out[i] = new
        d = abs(new - uc)
        if d > maxdiff:
            maxdiff = d
    return maxdiff


def step_1d(u, out, h, dt, r: Reaction | None, left_type, rho_l=1.0):
    rc = reaction_code(r)
    if rc is not None and _HAVE_NUMBA:
        return _step_1d_jit(u, out, h, dt, rc[0], rc[1], rc[2], left_type, rho_l)
    out[:] = u
    uc = u[1:-1]
    lap = (u[2:] - 2 * uc + u[:-2]) / h ** 2
    fv = np.zeros_like(uc) if r is None else np.asarray(r.f(uc))
    out[1:-1] = uc + dt * (lap + fv)
    if left_type == ROBIN:
        u_l = u[1] - 2.0 * h * u[0] / rho_l
        out[0] = u[0] + dt * ((u[1] - 2 * u[0] + u_l) / h ** 2 + float(r.f(u[0]) if r else 0.0))
    elif left_type == NEUMANN:
        out[0] = u[0] + dt * (2.0 * (u[1] - u[0]) / h ** 2 + float(r.f(u[0]) if r else 0.0))
    return float(np.max(np.abs(out - u)))


def boundary_code(b) -> tuple[int, float]:
    """(type, rho) of a Boundary for the kernels."""
    if b.neumann:
        return NEUMANN, 1.0
    if b.rho == 0.0:
        return DIRICHLET, 1.0
    return ROBIN, b.rho
