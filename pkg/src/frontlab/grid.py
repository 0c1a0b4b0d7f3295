"""Sampled profiles and fields on uniform grids, with CSV and SVG writers.

All artifact files are written with fixed %.12g formatting so repeated runs
are byte-identical.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .reaction import Boundary

FMT = "%.12g"


def _fmt(v: float) -> str:
    return FMT % v


@dataclass
class Profile:
    """A 1D sampled function on a uniform y-grid."""

    y: np.ndarray
    values: np.ndarray
    boundary: Boundary | None = None

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.y.shape != self.values.shape:
            raise ValueError("y and values must have matching shapes")

    @property
    def h(self) -> float:
        return float(self.y[1] - self.y[0])

    @property
    def extent(self) -> float:
        return float(self.y[-1])

    def __call__(self, yq):
        return np.interp(yq, self.y, self.values)

    def derivative(self) -> np.ndarray:
        """Centered first derivative (one-sided at the ends)."""
        return np.gradient(self.values, self.y)

    def to_csv(self, path, header: str = "y,value") -> None:
        write_csv(path, header, zip(self.y, self.values))


@dataclass
class Field:
    """A 2D sampled function on a uniform (x, y) grid; values[ix, iy]."""

    x: np.ndarray
    y: np.ndarray
    values: np.ndarray
    boundary_bottom: Boundary | None = None
    boundary_top: str = "dirichlet_zero"

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.x.size, self.y.size):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid "
                f"({self.x.size}, {self.y.size})"
            )

    @property
    def hx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def hy(self) -> float:
        return float(self.y[1] - self.y[0])

    def column(self, ix: int) -> Profile:
        return Profile(self.y.copy(), self.values[ix, :].copy(), self.boundary_bottom)

    def column_at(self, xq: float) -> Profile:
        ix = int(round((xq - self.x[0]) / self.hx))
        ix = min(max(ix, 0), self.x.size - 1)
        return self.column(ix)

    def interp(self, xq: float, yq: float) -> float:
        """Bilinear interpolation at a single point."""
        ix = int(np.clip(np.searchsorted(self.x, xq) - 1, 0, self.x.size - 2))
        iy = int(np.clip(np.searchsorted(self.y, yq) - 1, 0, self.y.size - 2))
        tx = (xq - self.x[ix]) / self.hx
        ty = (yq - self.y[iy]) / self.hy
        v = self.values
        return float(
            (1 - tx) * (1 - ty) * v[ix, iy]
            + tx * (1 - ty) * v[ix + 1, iy]
            + (1 - tx) * ty * v[ix, iy + 1]
            + tx * ty * v[ix + 1, iy + 1]
        )

    def shifted_x(self, shift: float) -> "Field":
        """Resample columns at x + shift (linear in x, clamped at the ends)."""
        xq = self.x + shift
        new = np.empty_like(self.values)
        for iy in range(self.y.size):
            new[:, iy] = np.interp(xq, self.x, self.values[:, iy])
        return Field(self.x.copy(), self.y.copy(), new, self.boundary_bottom, self.boundary_top)

    def window(self, x_lo: float, x_hi: float, y_lo: float, y_hi: float) -> "Field":
        mx = (self.x >= x_lo - 1e-12) & (self.x <= x_hi + 1e-12)
        my = (self.y >= y_lo - 1e-12) & (self.y <= y_hi + 1e-12)
        return Field(self.x[mx], self.y[my], self.values[np.ix_(mx, my)],
                     self.boundary_bottom, self.boundary_top)

    def to_csv(self, path) -> None:
        rows = (
            (xv, yv, self.values[ix, iy])
            for ix, xv in enumerate(self.x)
            for iy, yv in enumerate(self.y)
        )
        write_csv(path, "x,y,value", rows)


def write_csv(path, header: str, rows: Iterable[Sequence[float]]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_fmt(float(v)) for v in row) + "\n")


# ---------------------------------------------------------------------------
# Minimal SVG writer: polylines and color-mapped rectangles, no dependencies.
# ---------------------------------------------------------------------------

_SVG_W, _SVG_H, _MARGIN = 640, 480, 50


def _color(t: float) -> str:
    # simple blue -> white -> red diverging map on [0, 1]
    t = min(max(t, 0.0), 1.0)
    if t < 0.5:
        u = t / 0.5
        r, g, b = int(40 + 180 * u), int(80 + 160 * u), 255
    else:
        u = (t - 0.5) / 0.5
        r, g, b = 255, int(240 - 170 * u), int(240 - 200 * u)
    return f"#{r:02x}{g:02x}{b:02x}"


class SvgCanvas:
    def __init__(self, x_range, y_range, title=""):
        self.x0, self.x1 = float(x_range[0]), float(x_range[1])
        self.y0, self.y1 = float(y_range[0]), float(y_range[1])
        self.parts: list[str] = []
        self.title = title

    def _px(self, x):
        span = self.x1 - self.x0 or 1.0
        return _MARGIN + (x - self.x0) / span * (_SVG_W - 2 * _MARGIN)

    def _py(self, y):
        span = self.y1 - self.y0 or 1.0
        return _SVG_H - _MARGIN - (y - self.y0) / span * (_SVG_H - 2 * _MARGIN)

    def polyline(self, xs, ys, color="#1f3b99", width=1.5):
        pts = " ".join(f"{self._px(x):.2f},{self._py(y):.2f}" for x, y in zip(xs, ys))
        self.parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="{width}" points="{pts}"/>'
        )

    def rect(self, x, y, w, h, color):
        self.parts.append(
            f'<rect x="{self._px(x):.2f}" y="{self._py(y + h):.2f}" '
            f'width="{abs(self._px(x + w) - self._px(x)):.2f}" '
            f'height="{abs(self._py(y) - self._py(y + h)):.2f}" fill="{color}"/>'
        )

    def marker(self, x, y, color="#222222", r=3.0):
        self.parts.append(f'<circle cx="{self._px(x):.2f}" cy="{self._py(y):.2f}" r="{r}" fill="{color}"/>')

    def save(self, path):
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        frame = (
            f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{_SVG_W - 2 * _MARGIN}" '
            f'height="{_SVG_H - 2 * _MARGIN}" fill="none" stroke="#444444"/>'
        )
        label = (
            f'<text x="{_SVG_W // 2}" y="24" text-anchor="middle" '
            f'font-family="monospace" font-size="14">{self.title}</text>'
        )
        ticks = (
            f'<text x="{_MARGIN}" y="{_SVG_H - 18}" font-family="monospace" font-size="11">'
            f"x: [{self.x0:g}, {self.x1:g}]  y: [{self.y0:g}, {self.y1:g}]</text>"
        )
        body = "\n".join([frame, label, ticks] + self.parts)
        with open(path, "w", newline="\n") as fh:
            fh.write(
                f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" '
                f'height="{_SVG_H}" viewBox="0 0 {_SVG_W} {_SVG_H}">\n{body}\n</svg>\n'
            )


def svg_line_plot(path, xs, ys, title="") -> None:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    pad = 0.05 * (ys.max() - ys.min() or 1.0)
    cv = SvgCanvas((xs.min(), xs.max()), (ys.min() - pad, ys.max() + pad), title)
    cv.polyline(xs, ys)
    for x, y in zip(xs, ys):
        cv.marker(x, y, r=2.0)
    cv.save(path)


def _contour_segments(field: Field, level: float):
    """Marching-squares line segments of the level set, as (x1,y1,x2,y2)."""
    v = field.values
    segs = []
    for ix in range(v.shape[0] - 1):
        for iy in range(v.shape[1] - 1):
            corners = [
                (field.x[ix], field.y[iy], v[ix, iy]),
                (field.x[ix + 1], field.y[iy], v[ix + 1, iy]),
                (field.x[ix + 1], field.y[iy + 1], v[ix + 1, iy + 1]),
                (field.x[ix], field.y[iy + 1], v[ix, iy + 1]),
            ]
            pts = []
            for a, b in ((0, 1), (1, 2), (2, 3), (3, 0)):
                va, vb = corners[a][2], corners[b][2]
                if (va - level) * (vb - level) < 0:
                    t = (level - va) / (vb - va)
                    pts.append(
                        (
                            corners[a][0] + t * (corners[b][0] - corners[a][0]),
                            corners[a][1] + t * (corners[b][1] - corners[a][1]),
                        )
                    )
            if len(pts) >= 2:
                segs.append((pts[0][0], pts[0][1], pts[1][0], pts[1][1]))
    return segs


def svg_heatmap(path, field: Field, title="", levels: Sequence[float] = ()) -> None:
    v = field.values
    vmin, vmax = float(v.min()), float(v.max())
    span = vmax - vmin or 1.0
    cv = SvgCanvas((field.x[0], field.x[-1]), (field.y[0], field.y[-1]), title)
    # cap the rectangle count so artifacts stay diffable and small
    sx = max(1, v.shape[0] // 160)
    sy = max(1, v.shape[1] // 120)
    for ix in range(0, v.shape[0] - 1, sx):
        for iy in range(0, v.shape[1] - 1, sy):
            t = (v[ix, iy] - vmin) / span
            cv.rect(field.x[ix], field.y[iy],
                    field.hx * min(sx, v.shape[0] - 1 - ix),
                    field.hy * min(sy, v.shape[1] - 1 - iy), _color(t))
    for lv in levels:
        for x1, y1, x2, y2 in _contour_segments(field, lv):
            cv.polyline([x1, x2], [y1, y2], color="#000000", width=1.0)
    cv.save(path)
