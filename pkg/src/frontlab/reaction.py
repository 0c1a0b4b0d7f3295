"""Reaction families (monostable / ignition / bistable) and derived scalars.

Every reaction is a nonlinearity f on [lo, 1] extended by zero outside.
The built-in families are closed-form polynomials so antiderivatives and
one-sided slopes are exact; user tables are interpolated monotone-cubically.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable
import math
import re

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

MONOSTABLE = "monostable"
IGNITION = "ignition"
BISTABLE = "bistable"

_BISECT_TOL = 1e-10


class ReactionError(ValueError):
    pass


@dataclass(frozen=True)
class Reaction:
    """A reaction nonlinearity with its class tag and derived quantities.

    ``f`` evaluates the nonlinearity (zero outside [lo, 1]); ``F`` is the
    exact antiderivative of ``f`` from 0.  ``lo`` is the lower rest state,
    0 for plain reactions and -eps for epsilon-modified ones.
    """

    kind: str
    theta: float
    f: Callable[[float], float]
    F: Callable[[float], float]
    left_slope: float
    right_slope: float
    lo: float = 0.0
    label: str = ""
    family: str = ""
    params: tuple = ()
    _f_core: Callable[[float], float] | None = field(default=None, repr=False)
    _f_scalar: Callable[[float], float] | None = field(default=None, repr=False)
    _F_scalar: Callable[[float], float] | None = field(default=None, repr=False)

    def __call__(self, s):
        return self.f(s)

    def f_scalar(self, s: float) -> float:
        """Plain-float evaluation, cheap enough for RK4 inner loops."""
        if self._f_scalar is not None:
            return self._f_scalar(s)
        return float(self.f(s))

    def F_scalar(self, s: float) -> float:
        """Plain-float antiderivative evaluation."""
        if self._F_scalar is not None:
            if s <= self.lo:
                return self._F_scalar(self.lo)
            if s >= 1.0:
                return self._F_scalar(1.0)
            return self._F_scalar(s)
        return float(self.F(s))

    @property
    def is_monostable(self) -> bool:
        return self.kind == MONOSTABLE

    @property
    def is_ignition(self) -> bool:
        return self.kind == IGNITION

    @property
    def is_bistable(self) -> bool:
        return self.kind == BISTABLE


@dataclass(frozen=True)
class Boundary:
    """Absorption strength of the wall: rho = 0 is Dirichlet, rho > 0 Robin.

    The Neumann sentinel (no absorption) is only legal in comparison and
    upper-bound experiments.
    """

    rho: float = 0.0
    neumann: bool = False

    def __post_init__(self):
        if not self.neumann and (not math.isfinite(self.rho) or self.rho < 0):
            raise ReactionError(f"rho must be finite and >= 0, got {self.rho}")

    @classmethod
    def dirichlet(cls) -> "Boundary":
        return cls(rho=0.0)

    @classmethod
    def robin(cls, rho: float) -> "Boundary":
        if rho <= 0:
            raise ReactionError("robin boundary needs rho > 0; use dirichlet() for rho = 0")
        return cls(rho=rho)

    @classmethod
    def neumann_sentinel(cls) -> "Boundary":
        return cls(rho=math.inf, neumann=True)

    @property
    def is_dirichlet(self) -> bool:
        return not self.neumann and self.rho == 0.0

    def describe(self) -> str:
        if self.neumann:
            return "neumann"
        return "dirichlet" if self.rho == 0.0 else f"robin(rho={self.rho:g})"


def _zero_extended(core: Callable[[float], float], lo: float) -> Callable[[float], float]:
    def f(s):
        s = np.asarray(s, dtype=float)
        inside = (s > lo) & (s < 1.0)
        out = np.where(inside, core(np.clip(s, lo, 1.0)), 0.0)
        if out.ndim == 0:
            return float(out)
        return out

    return f


def _clamped_antiderivative(core_F: Callable[[float], float], lo: float) -> Callable[[float], float]:
    # F(s) = int_0^s f; constant below lo and above 1 by the zero extension.
    def F(s):
        s = np.asarray(np.clip(s, -2.0, 2.0), dtype=float)
        out = core_F(np.clip(s, lo, 1.0))
        if out.ndim == 0:
            return float(out)
        return out

    return F


def make_cubic_bistable(theta: float) -> Reaction:
    """f(u) = u (1 - u) (u - theta); needs theta < 1/2 so int_0^1 f > 0."""
    if not 0.0 < theta < 0.5:
        raise ReactionError(
            f"theta={theta} violates (B3): need 0 < theta < 1/2 so the integral of f is positive"
        )

    def core(u):
        return u * (1.0 - u) * (u - theta)

    def core_F(u):
        return -(u ** 4) / 4.0 + (1.0 + theta) * u ** 3 / 3.0 - theta * u ** 2 / 2.0

    def scalar(u, th=theta):
        if u <= 0.0 or u >= 1.0:
            return 0.0
        return u * (1.0 - u) * (u - th)

    return Reaction(
        kind=BISTABLE,
        theta=theta,
        f=_zero_extended(core, 0.0),
        F=_clamped_antiderivative(core_F, 0.0),
        left_slope=-theta,
        right_slope=-(1.0 - theta),
        label=f"cubic_bistable(theta={theta:g})",
        family="cubic",
        params=(theta,),
        _f_core=core,
        _f_scalar=scalar,
        _F_scalar=lambda u, th=theta: -(u ** 4) / 4.0 + (1.0 + th) * u ** 3 / 3.0 - th * u ** 2 / 2.0,
    )


def make_kpp() -> Reaction:
    """Logistic monostable f(u) = u (1 - u)."""

    def core(u):
        return u * (1.0 - u)

    def core_F(u):
        return u ** 2 / 2.0 - u ** 3 / 3.0

    def scalar(u):
        if u <= 0.0 or u >= 1.0:
            return 0.0
        return u * (1.0 - u)

    return Reaction(
        kind=MONOSTABLE,
        theta=0.0,
        f=_zero_extended(core, 0.0),
        F=_clamped_antiderivative(core_F, 0.0),
        left_slope=1.0,
        right_slope=-1.0,
        label="kpp()",
        family="kpp",
        params=(),
        _f_core=core,
        _f_scalar=scalar,
        _F_scalar=lambda u: u ** 2 / 2.0 - u ** 3 / 3.0,
    )


def make_ignition(theta: float) -> Reaction:
    """f = 0 on [0, theta], f(u) = (u - theta)(1 - u) on (theta, 1]."""
    if not 0.0 < theta < 1.0:
        raise ReactionError(f"ignition threshold must lie in (0, 1), got {theta}")

    def core(u):
        return np.where(u > theta, (u - theta) * (1.0 - u), 0.0)

    def core_F(u):
        w = np.maximum(u - theta, 0.0)
        return (1.0 - theta) * w ** 2 / 2.0 - w ** 3 / 3.0

    def scalar(u, th=theta):
        if u <= th or u >= 1.0:
            return 0.0
        return (u - th) * (1.0 - u)

    return Reaction(
        kind=IGNITION,
        theta=theta,
        f=_zero_extended(core, 0.0),
        F=_clamped_antiderivative(core_F, 0.0),
        left_slope=1.0 - theta,  # one-sided slope at theta+
        right_slope=-(1.0 - theta),
        label=f"ignition(theta={theta:g})",
        family="ignition",
        params=(theta,),
        _f_core=core,
        _f_scalar=scalar,
        _F_scalar=lambda u, th=theta: ((1.0 - th) * (u - th) ** 2 / 2.0 - (u - th) ** 3 / 3.0)
        if u > th else 0.0,
    )


def make_table(path: str) -> Reaction:
    """Reaction tabulated as two-column CSV ``s,f`` on [0, 1], pchip interpolated."""
    data = np.loadtxt(path, delimiter=",", skiprows=_table_header_rows(path))
    if data.ndim != 2 or data.shape[1] != 2:
        raise ReactionError(f"table {path} must have two columns s,f")
    s, fv = data[:, 0], data[:, 1]
    if s[0] != 0.0 or s[-1] != 1.0:
        raise ReactionError("table must span s = 0 .. 1")
    if abs(fv[0]) > 1e-12 or abs(fv[-1]) > 1e-12:
        raise ReactionError("table must satisfy f(0) = f(1) = 0")
    interp = PchipInterpolator(s, fv, extrapolate=False)
    anti = interp.antiderivative()
    kind, theta = _classify_table(s, fv)

    def core(u):
        return np.nan_to_num(interp(u), nan=0.0)

    def core_F(u):
        return anti(np.clip(u, 0.0, 1.0))

    deriv = interp.derivative()
    left = float(deriv(theta + 1e-9)) if kind == IGNITION else float(deriv(1e-12))

    def scalar(u):
        if u <= 0.0 or u >= 1.0:
            return 0.0
        return float(interp(u))

    return Reaction(
        kind=kind,
        theta=theta,
        f=_zero_extended(core, 0.0),
        F=_clamped_antiderivative(core_F, 0.0),
        left_slope=left,
        right_slope=float(deriv(1.0 - 1e-12)),
        label=f"table(path={path})",
        family="table",
        params=(),
        _f_core=core,
        _f_scalar=scalar,
        _F_scalar=lambda u: float(anti(min(max(u, 0.0), 1.0))),
    )


def _table_header_rows(path: str) -> int:
    with open(path) as fh:
        first = fh.readline()
    try:
        float(first.split(",")[0])
        return 0
    except ValueError:
        return 1


def _classify_table(s: np.ndarray, fv: np.ndarray) -> tuple[str, float]:
    interior = (s > 0) & (s < 1)
    if np.all(fv[interior] > 0):
        return MONOSTABLE, 0.0
    neg = interior & (fv < 0)
    if np.any(neg):
        theta = float(s[np.nonzero(neg)[0][-1] + 1])
        return BISTABLE, theta
    zero_run = interior & (fv == 0)
    theta = float(s[np.nonzero(zero_run)[0][-1]]) if np.any(zero_run) else 0.0
    return IGNITION, theta


_SPEC_RE = re.compile(r"^\s*([a-z_][a-z0-9_]*)\s*\((.*)\)\s*$", re.IGNORECASE)


def from_spec(spec: str) -> Reaction:
    """Build a reaction from a config string like ``cubic_bistable(theta=0.25)``."""
    m = _SPEC_RE.match(spec)
    if not m:
        raise ReactionError(f"cannot parse reaction spec {spec!r}")
    name, argstr = m.group(1).lower(), m.group(2).strip()
    kwargs = {}
    if argstr:
        for part in argstr.split(","):
            if "=" not in part:
                raise ReactionError(f"reaction arguments must be key=value, got {part!r}")
            k, v = part.split("=", 1)
            k = k.strip()
            v = v.strip().strip("'\"")
            kwargs[k] = v
    if name == "kpp":
        return make_kpp()
    if name == "ignition":
        return make_ignition(float(kwargs.pop("theta")))
    if name == "cubic_bistable":
        return make_cubic_bistable(float(kwargs.pop("theta")))
    if name == "table":
        return make_table(kwargs.pop("path"))
    raise ReactionError(f"unknown reaction family {name!r}")


def antiderivative(r: Reaction, s: float) -> float:
    """F(s) = int_0^s f, evaluated on the clamped domain [-2, 2]."""
    return float(r.F(s))


def vartheta(r: Reaction) -> float:
    """sup{s in [0,1] : F(s) <= 0}: 0 for monostable, theta for ignition,
    the interior root of F for bistable (bisection to 1e-10)."""
    if r.is_monostable:
        return 0.0
    if r.is_ignition:
        return r.theta
    a, b = r.theta, 1.0
    if r.F_scalar(a) > 0:
        raise ReactionError("bistable F positive at theta; hypotheses violated")
    for _ in range(200):
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        if r.F_scalar(mid) <= 0.0:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def slope_bounds(r: Reaction) -> tuple[float, float]:
    """(mu, rho_slope): mu = sup f(s)/s on (0,1); rho_slope = inf on (0, 1/2].

    rho_slope is only defined for monostable reactions (it enters the
    sine subsolution and eigenfunction constructions).
    """
    s = np.linspace(1e-6, 1.0 - 1e-6, 20001)
    ratios = r.f(s) / s
    mu = float(max(np.max(ratios), r.left_slope if not r.is_ignition else 0.0))
    if not r.is_monostable:
        return mu, math.nan
    s_lo = np.linspace(1e-6, 0.5, 20001)
    rho_slope = float(min(np.min(r.f(s_lo) / s_lo), r.f(0.5) / 0.5))
    return mu, rho_slope


def mu_bound(r: Reaction) -> float:
    return slope_bounds(r)[0]


def rho_slope(r: Reaction) -> float:
    if not r.is_monostable:
        raise ReactionError("rho_slope is defined for monostable reactions only")
    return slope_bounds(r)[1]


@dataclass
class HypothesisCheck:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ClassReport:
    kind: str
    checks: list[HypothesisCheck]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[HypothesisCheck]:
        return [c for c in self.checks if not c.passed]


def validate(r: Reaction, n_sample: int = 10_000) -> ClassReport:
    """Check the class hypotheses on a dense sample; failures carry the offending s."""
    checks: list[HypothesisCheck] = []
    eps = 1e-9

    def endpoint_zero():
        ok = abs(r.f(r.lo)) < 1e-12 and abs(r.f(1.0)) < 1e-12
        checks.append(HypothesisCheck("f(lo) = f(1) = 0", ok, f"f({r.lo})={r.f(r.lo):.3g}, f(1)={r.f(1.0):.3g}"))

    def sign_on(lo, hi, want_pos, name):
        s = np.linspace(lo + eps, hi - eps, n_sample)
        vals = np.asarray(r.f(s))
        bad = vals <= 0 if want_pos else vals >= 0
        if np.any(bad):
            s_bad = float(s[np.argmax(bad)])
            checks.append(HypothesisCheck(name, False, f"violated at s={s_bad:.6g}, f={r.f(s_bad):.3g}"))
        else:
            checks.append(HypothesisCheck(name, True))

    endpoint_zero()
    if r.is_monostable:
        sign_on(r.lo, 1.0, True, "(M1) f > 0 on (0,1)")
        checks.append(HypothesisCheck("(M2) f'(0+) > 0 and f'(1-) < 0",
                                      r.left_slope > 0 and r.right_slope < 0,
                                      f"slopes {r.left_slope:.3g}, {r.right_slope:.3g}"))
    elif r.is_ignition:
        s = np.linspace(r.lo + eps, r.theta, n_sample)
        flat = np.max(np.abs(np.asarray(r.f(s))))
        checks.append(HypothesisCheck("(I1) f = 0 on [0,theta]", flat < 1e-12, f"max |f| = {flat:.3g}"))
        sign_on(r.theta, 1.0, True, "(I1) f > 0 on (theta,1)")
        checks.append(HypothesisCheck("(I2) f'(theta+) > 0 and f'(1-) < 0",
                                      r.left_slope > 0 and r.right_slope < 0,
                                      f"slopes {r.left_slope:.3g}, {r.right_slope:.3g}"))
    else:
        sign_on(r.lo, r.theta, False, "(B1) f < 0 on (0,theta)")
        sign_on(r.theta, 1.0, True, "(B1) f > 0 on (theta,1)")
        total, _ = quad(r.f, r.lo, 1.0, limit=200)
        checks.append(HypothesisCheck("(B3) int f > 0", total > 0, f"integral = {total:.6g}"))
    return ClassReport(r.kind, checks)


def validate_cubic_formula(theta: float, n_sample: int = 10_000) -> ClassReport:
    """Validate the raw cubic u(1-u)(u-theta) for any theta in (0,1),
    including values that break (B3); used to exercise failure reporting."""

    def core(u):
        return u * (1.0 - u) * (u - theta)

    r = Reaction(
        kind=BISTABLE,
        theta=theta,
        f=_zero_extended(core, 0.0),
        F=_clamped_antiderivative(
            lambda u: -(u ** 4) / 4.0 + (1.0 + theta) * u ** 3 / 3.0 - theta * u ** 2 / 2.0, 0.0
        ),
        left_slope=-theta,
        right_slope=-(1.0 - theta),
        label=f"cubic_formula(theta={theta:g})",
        _f_core=core,
    )
    return validate(r, n_sample)


def epsilon_max(r: Reaction) -> float:
    """Largest admissible shift for epsilon_modify so (B3) persists."""
    if r.is_ignition:
        return min(r.theta, 0.5)
    if r.is_bistable:
        # the blend removes 9 eps^3 / 16 of integral; keep half the (B3) budget
        total = float(r.F(1.0))
        return min(0.5 * (8.0 * total / 9.0) ** (1.0 / 3.0), r.theta)
    raise ReactionError("epsilon modification applies to ignition/bistable reactions")


def epsilon_modify(r: Reaction, eps: float) -> Reaction:
    """Lowered reaction on [-eps, 1].

    Ignition: the evaluator is unchanged and the rest state moves to -eps.
    Bistable: a cubic dip g(u) = A (u+eps)(eps-u)^2 with A = 27/(64 eps) is
    subtracted on [-eps, eps]; then g(+-eps) = 0, g'(eps) = 0, the modified f
    stays below f, and the sup deviation is eps^2 / 2 < eps^2.
    """
    if eps == 0.0:
        return r
    if eps < 0 or eps >= epsilon_max(r):
        raise ReactionError(f"eps={eps} outside [0, eps_max={epsilon_max(r):.4g})")
    if r.is_ignition:
        return replace(r, lo=-eps, theta=r.theta, label=f"{r.label}|eps={eps:g}")
    if not r.is_bistable:
        raise ReactionError("epsilon modification applies to ignition/bistable reactions")

    A = 27.0 / (64.0 * eps)
    base_f, base_F = r.f, r.F

    def dip(u):
        u = np.asarray(u, dtype=float)
        inside = (u > -eps) & (u < eps)
        return np.where(inside, A * (u + eps) * (eps - u) ** 2, 0.0)

    def dip_F(u):
        # int_{-eps}^u A (w+eps)(eps-w)^2 dw, clamped outside [-eps, eps]
        u = np.clip(u, -eps, eps)
        w = u + eps
        return A * (2.0 * eps ** 2 * w ** 2 - 4.0 * eps * w ** 3 / 3.0 + w ** 4 / 4.0)

    dip_total = dip_F(eps)

    def f(s):
        s_arr = np.asarray(s, dtype=float)
        out = np.asarray(base_f(s_arr)) - dip(s_arr)
        if out.ndim == 0:
            return float(out)
        return out

    def F(s):
        s_arr = np.asarray(np.clip(s, -2.0, 2.0), dtype=float)
        out = np.asarray(base_F(s_arr)) - (dip_F(s_arr) - dip_F(np.zeros_like(s_arr)))
        if out.ndim == 0:
            return float(out)
        return out

    if float(base_F(1.0)) - dip_total + dip_F(0.0) <= 0:
        raise ReactionError(f"eps={eps} breaks (B3) on [-eps, 1]")

    base_scalar = r.f_scalar

    def scalar(u, e=eps, a_coef=A):
        v = base_scalar(u)
        if -e < u < e:
            v -= a_coef * (u + e) * (e - u) ** 2
        return v

    base_F_scalar = r.F_scalar

    def F_scalar(u, e=eps, a_coef=A):
        val = base_F_scalar(u)
        w = min(max(u, -e), e) + e
        val -= a_coef * (2.0 * e ** 2 * w ** 2 - 4.0 * e * w ** 3 / 3.0 + w ** 4 / 4.0)
        val += a_coef * (2.0 * e ** 4 - 4.0 * e ** 4 / 3.0 + e ** 4 / 4.0)
        return val

    family = "cubic_eps" if r.family == "cubic" else "table"
    return Reaction(
        kind=BISTABLE,
        theta=r.theta,
        f=f,
        F=F,
        left_slope=-4.0 * A * eps ** 2,
        right_slope=r.right_slope,
        lo=-eps,
        label=f"{r.label}|eps={eps:g}",
        family=family,
        params=(r.theta, eps) if family == "cubic_eps" else (),
        _f_scalar=scalar,
        _F_scalar=F_scalar,
    )
