"""Deterministic scalar numerics: bracketed roots, adaptive quadrature,
Richardson-extrapolated derivatives and scanline level-set tracing.

Everything here is derivative-free and bit-reproducible: fixed grids, fixed
subdivision order, no randomness. All tolerances come from NumericsConfig.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    EvaluationFailed,
    MaxDepth,
    MaxIters,
    NotBracketed,
)

__all__ = [
    "NumericsConfig",
    "DEFAULT_CONFIG",
    "Plane",
    "Contour",
    "find_root_bracketed",
    "scan_roots",
    "integrate_adaptive",
    "derivative_central",
    "trace_level_set",
]

_EPS = 2.220446049250313e-16
_QUAD_MAX_DEPTH = 60


@dataclass(frozen=True)
class NumericsConfig:
    """Solver tolerances; all fields must be positive."""

    root_tol: float = 1e-12      # parameter-space tolerance for roots
    quad_tol: float = 1e-9       # absolute quadrature tolerance
    fd_step_scale: float = 1e-5  # relative finite-difference step
    scan_grid: int = 512         # subdivisions for sign-change scans
    max_iters: int = 200

    def __post_init__(self):
        for name in ("root_tol", "quad_tol", "fd_step_scale", "scan_grid", "max_iters"):
            if getattr(self, name) <= 0:
                raise ValueError(f"NumericsConfig.{name} must be positive")


DEFAULT_CONFIG = NumericsConfig()


class Plane(Enum):
    LAMBDA_T = "lambda-t"
    NU_T = "nu-t"
    TIME_T = "time-t"


@dataclass(frozen=True)
class Contour:
    """Polylines sampled on a level set f(x, y) = level."""

    level: float
    polylines: tuple
    plane: Optional[Plane] = None

    @property
    def points(self):
        return [pt for line in self.polylines for pt in line]


def find_root_bracketed(f: Callable[[float], float], a: float, b: float,
                        cfg: NumericsConfig = DEFAULT_CONFIG) -> float:
    """Root of f in [a, b] by Brent's method (bisection + secant/IQI).

    The bracket is preserved on every iteration, so the result is always
    within root_tol*max(1,|x|) of a sign change of f. Superlinear near
    simple roots, never slower than bisection.
    """
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0.0) == (fb > 0.0):
        raise NotBracketed(f"f({a}) = {fa} and f({b}) = {fb} have the same sign")

    c, fc = a, fa
    e = d = b - a
    for _ in range(cfg.max_iters):
        if (fb > 0.0) == (fc > 0.0):
            # keep the sign change between b and c
            c, fc = a, fa
            e = d = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol = 2.0 * _EPS * abs(b) + 0.5 * cfg.root_tol * max(1.0, abs(b))
        m = 0.5 * (c - b)
        if abs(m) <= tol or fb == 0.0:
            return b
        if abs(e) < tol or abs(fa) <= abs(fb):
            e = d = m  # fall back to bisection
        else:
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            else:
                p = -p
            s_prev, e = e, d
            if 2.0 * p < 3.0 * m * q - abs(tol * q) and p < abs(0.5 * s_prev * q):
                d = p / q  # accept interpolation
            else:
                e = d = m
        a, fa = b, fb
        if abs(d) > tol:
            b += d
        else:
            b += tol if m > 0.0 else -tol
        fb = f(b)
    raise MaxIters(f"no convergence within {cfg.max_iters} iterations")


def scan_roots(f: Callable[[float], float], a: float, b: float,
               cfg: NumericsConfig = DEFAULT_CONFIG,
               grid: Optional[int] = None) -> list:
    """All simple roots of f in [a, b]: fixed-grid scan + bracketed refinement.

    Grid points where f raises a PtcycleError or returns NaN are treated as
    holes; sign changes are only accepted between adjacent valid points.
    Deterministic and derivative-free.
    """
    n = grid if grid is not None else cfg.scan_grid
    xs = np.linspace(a, b, n + 1)
    vals = np.empty(n + 1)
    for i, x in enumerate(xs):
        try:
            vals[i] = f(float(x))
        except Exception:
            vals[i] = math.nan
    roots = []
    for x0, x1, v0, v1 in zip(xs[:-1], xs[1:], vals[:-1], vals[1:]):
        if math.isnan(v0) or math.isnan(v1):
            continue
        if v0 == 0.0:
            if not roots or abs(roots[-1] - x0) > cfg.root_tol * max(1.0, abs(x0)):
                roots.append(float(x0))
        elif v0 * v1 < 0.0:
            roots.append(find_root_bracketed(f, float(x0), float(x1), cfg))
    if not math.isnan(vals[-1]) and vals[-1] == 0.0:
        roots.append(float(xs[-1]))
    return roots


def integrate_adaptive(f: Callable[[float], float], a: float, b: float,
                       cfg: NumericsConfig = DEFAULT_CONFIG) -> float:
    """Adaptive Simpson quadrature with absolute tolerance cfg.quad_tol.

    Interval-halving with the standard embedded 15:1 error estimate and a
    deterministic left-to-right subdivision order. Raises MaxDepth if the
    recursion cap is hit (non-smooth integrand or unattainable tolerance).
    """
    if a == b:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0
    return _simpson(f, a, b, fa, fm, fb, whole, cfg.quad_tol, _QUAD_MAX_DEPTH)


def _simpson(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) * (fa + 4.0 * flm + fm) / 6.0
    right = (b - m) * (fm + 4.0 * frm + fb) / 6.0
    err = left + right - whole
    if abs(err) <= 15.0 * tol:
        return left + right + err / 15.0
    if depth <= 0:
        raise MaxDepth(f"quadrature depth cap reached on [{a}, {b}]")
    return (_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + _simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1))


def derivative_central(f: Callable[[float], float], x: float,
                       cfg: NumericsConfig = DEFAULT_CONFIG) -> float:
    """Richardson-extrapolated central difference (steps h and h/2)."""
    h = cfg.fd_step_scale * max(1.0, abs(x))
    try:
        d1 = (f(x + h) - f(x - h)) / (2.0 * h)
        d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h
    except Exception as exc:
        raise EvaluationFailed(f"function evaluation failed near x = {x}: {exc}") from exc
    return (4.0 * d2 - d1) / 3.0


def trace_level_set(f: Callable[[float, float], float], level: float,
                    window: Sequence[float], resolution,
                    cfg: NumericsConfig = DEFAULT_CONFIG,
                    plane: Optional[Plane] = None) -> Contour:
    """Scanline extraction of the level set f(x, y) = level inside a window.

    For each horizontal grid line y = const, sign changes of f - level are
    bracketed along x and refined; the resulting points are linked into
    polylines by nearest-neighbour continuation with a jump threshold of two
    grid cells. An empty contour is allowed. window = (x0, x1, y0, y1);
    resolution is an int or an (nx, ny) pair, each >= 2.
    """
    x0, x1, y0, y1 = (float(v) for v in window)
    if isinstance(resolution, int):
        nx = ny = resolution
    else:
        nx, ny = resolution
    if nx < 2 or ny < 2:
        raise ValueError("trace_level_set needs resolution >= 2 in each axis")
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    cw = (x1 - x0) / (nx - 1)
    chh = (y1 - y0) / (ny - 1)

    # scanlines: roots of f(., y) - level per grid line, in ascending order
    lines = []
    for y in ys:
        roots = scan_roots(lambda x: f(x, float(y)) - level, x0, x1, cfg, grid=nx - 1)
        lines.append([(r, float(y)) for r in roots])

    # greedy nearest-neighbour linking in fixed order
    open_lines: list = []  # each: list of points
    done: list = []
    for y_line, pts in zip(ys, lines):
        extended = set()
        for (x, y) in pts:
            best, best_d = None, 2.0  # threshold: 2 grid cells
            for idx, poly in enumerate(open_lines):
                lx, ly = poly[-1]
                d = math.hypot((x - lx) / cw if cw else 0.0,
                               (y - ly) / chh if chh else 0.0)
                if d < best_d:
                    best, best_d = idx, d
            if best is None:
                open_lines.append([(x, y)])
                extended.add(len(open_lines) - 1)
            else:
                open_lines[best].append((x, y))
                extended.add(best)
        # retire polylines that fell more than 2 cells behind this scanline
        still_open = []
        for idx, poly in enumerate(open_lines):
            if idx in extended or abs(y_line - poly[-1][1]) <= 2.0 * abs(chh):
                still_open.append(poly)
            else:
                done.append(poly)
        open_lines = still_open
    done.extend(open_lines)
    polylines = tuple(tuple(p) for p in done)
    return Contour(level=level, polylines=polylines, plane=plane)
