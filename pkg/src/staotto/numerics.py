"""Shared numerical kernels: quadrature, root bracketing, the forward
Ermakov integrator used as an independent oracle, scan drivers, and the
power-law slope fit.

Everything here is deterministic: composite Simpson on uniform grids and
classical fixed-step RK4, with the step tied to the sampling grid, so
repeated runs and parallel scans reproduce identical arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .model import StrokeSpec, TrapCircuitParams


class GridError(ValueError):
    """Sample count unusable for composite Simpson (even or too small)."""


class SingularityError(RuntimeError):
    """The scaling factor collapsed to zero during forward integration."""


class NoInteriorMinimumError(ValueError):
    """The sampled minimum sits on the scan boundary."""


def simpson_integrate(samples, dt: float) -> float:
    """Composite Simpson integral of uniformly spaced samples.

    Requires an odd sample count >= 3; exact for polynomials up to cubic
    on each pair of intervals, fourth-order convergent otherwise.
    """
    y = np.asarray(samples, dtype=float)
    if y.ndim != 1 or y.size < 3 or y.size % 2 == 0:
        raise GridError(f"composite Simpson needs an odd sample count >= 3, got {y.size}")
    return float(dt / 3.0 * (y[0] + y[-1] + 4.0 * np.sum(y[1:-1:2]) + 2.0 * np.sum(y[2:-2:2])))


def simpson_integrate_fn(fn, a: float, b: float, n_samples: int) -> float:
    """Composite Simpson of a vectorized callable over [a, b]."""
    if b == a:
        return 0.0
    x = np.linspace(a, b, n_samples)
    return simpson_integrate(fn(x), x[1] - x[0])


def bisect_root(fn, lo: float, hi: float, xtol: float) -> float:
    """Root of a scalar function by plain bisection.

    ``fn(lo)`` and ``fn(hi)`` must have opposite signs; returns the
    midpoint of the final bracket of width <= xtol.
    """
    f_lo = fn(lo)
    f_hi = fn(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise ValueError("bisection bracket endpoints must have opposite signs")
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        f_mid = fn(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ermakov_forward(omega_sq, t_f: float | None = None,
                    omega0: float | None = None,
                    rho0: float = 1.0, rho_dot0: float = 0.0,
                    n_samples: int | None = None):
    """Integrate rho'' = omega0^2/rho^3 - omega^2(t) rho forward with RK4.

    ``omega_sq`` is either a FrequencyProfile (grid, duration, and omega0
    are taken from it) or a vectorized callable t -> omega^2(t), in which
    case ``t_f`` and ``n_samples`` are required. The fixed RK4 step equals
    the grid step; stage midpoints are evaluated on the half grid.

    Returns (t, rho, rho_dot) arrays. This integrator is the independent
    check on the polynomial construction: it never sees rho(t), only the
    drive omega^2(t).
    """
    if hasattr(omega_sq, "omega_sq_at"):
        profile = omega_sq
        fn = profile.omega_sq_at
        t_f = profile.t_f if t_f is None else t_f
        n_samples = profile.t.size if n_samples is None else n_samples
        omega0 = profile.omega_start if omega0 is None else omega0
    else:
        fn = omega_sq
        if t_f is None or n_samples is None:
            raise ValueError("callable input requires t_f and n_samples")
        if omega0 is None:
            w2_0 = float(fn(0.0))
            if w2_0 <= 0:
                raise ValueError("omega0 must be given when omega^2(0) <= 0")
            omega0 = math.sqrt(w2_0)
    if n_samples < 2:
        raise GridError("need at least 2 samples to integrate")

    n_steps = n_samples - 1
    h = t_f / n_steps
    t_half = np.linspace(0.0, t_f, 2 * n_steps + 1)
    w2 = np.asarray(fn(t_half), dtype=float)
    if w2.shape != t_half.shape:
        w2 = np.array([float(fn(ti)) for ti in t_half])

    w0_sq = omega0 * omega0
    rho = np.empty(n_samples)
    rho_dot = np.empty(n_samples)
    r, v = float(rho0), float(rho_dot0)
    rho[0], rho_dot[0] = r, v
    for i in range(n_steps):
        wa = w2[2 * i]
        wm = w2[2 * i + 1]
        wb = w2[2 * i + 2]
        k1r = v
        k1v = w0_sq / r ** 3 - wa * r
        r2 = r + 0.5 * h * k1r
        k2r = v + 0.5 * h * k1v
        k2v = w0_sq / r2 ** 3 - wm * r2
        r3 = r + 0.5 * h * k2r
        k3r = v + 0.5 * h * k2v
        k3v = w0_sq / r3 ** 3 - wm * r3
        r4 = r + h * k3r
        k4r = v + h * k3v
        k4v = w0_sq / r4 ** 3 - wb * r4
        r += h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        if not (math.isfinite(r) and r > 0.0):
            raise SingularityError(f"scaling factor reached {r} near t = {(i + 1) * h}")
        rho[i + 1] = r
        rho_dot[i + 1] = v
    t = np.linspace(0.0, t_f, n_samples)
    return t, rho, rho_dot


@dataclass(frozen=True)
class ScanResult:
    """Total work versus stroke duration, normalized at a reference point."""

    t_f: np.ndarray                # s, strictly increasing
    w_total: np.ndarray            # J (NaN where the pipeline failed)
    normalized: np.ndarray         # w_total / w_total(t_ff)
    monotone_omega: np.ndarray     # bool per point
    positive_omega_sq: np.ndarray  # bool per point
    t_ff: float                    # s, normalization reference
    errors: tuple                  # (t_f, message) pairs for failed points


def scan_total_work(template: StrokeSpec, params: TrapCircuitParams,
                    t_f_values, t_ff: float) -> ScanResult:
    """Evaluate the full stroke pipeline at each duration in ``t_f_values``.

    ``t_ff`` is appended if absent; the work there defines the
    normalization, so the normalized value at t_ff is exactly 1. Failures
    at individual points are recorded and the scan continues.
    """
    from .trap_circuit import evaluate_stroke

    tfs = np.asarray(sorted(set(float(x) for x in t_f_values) | {float(t_ff)}))
    w = np.full(tfs.size, np.nan)
    mono = np.zeros(tfs.size, dtype=bool)
    pos = np.zeros(tfs.size, dtype=bool)
    errors = []
    for i, tf in enumerate(tfs):
        try:
            result = evaluate_stroke(replace(template, t_f=tf), params)
        except Exception as exc:  # per-point failures must not abort the scan
            errors.append((tf, f"{type(exc).__name__}: {exc}"))
            continue
        w[i] = result.work.w_total
        mono[i] = result.profile.monotone_omega
        pos[i] = result.profile.positive_omega_sq
    w_ref = w[np.searchsorted(tfs, t_ff)]
    return ScanResult(t_f=tfs, w_total=w, normalized=w / w_ref,
                      monotone_omega=mono, positive_omega_sq=pos,
                      t_ff=float(t_ff), errors=tuple(errors))


def loglog_slope(x_values, y_values) -> float:
    """Least-squares slope of log y versus log x.

    Needs at least 5 strictly positive points on both axes.
    """
    x = np.asarray(x_values, dtype=float)
    y = np.asarray(y_values, dtype=float)
    if x.size != y.size or x.size < 5:
        raise ValueError("need at least 5 points of equal length")
    if np.any(x <= 0) or np.any(y <= 0) or not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("log-log fit requires positive finite values")
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)


def find_interior_minimum(scan: ScanResult) -> float:
    """Duration at the interior minimum of a scan, parabolically refined.

    Raises NoInteriorMinimumError when the smallest sampled work sits on
    the scan boundary (including boundaries created by failed points).
    """
    tfs, w = scan.t_f, scan.w_total
    if tfs.size < 3:
        raise NoInteriorMinimumError("need at least 3 scan points")
    i = int(np.nanargmin(w))
    if i == 0 or i == tfs.size - 1 or np.isnan(w[i - 1]) or np.isnan(w[i + 1]):
        raise NoInteriorMinimumError(
            f"minimum at t_f = {tfs[i]} lies on the scan boundary")
    x0, x1, x2 = tfs[i - 1:i + 2]
    y0, y1, y2 = w[i - 1:i + 2]
    denom = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0)
    if denom == 0.0:
        return float(x1)
    vertex = x1 - 0.5 * ((x1 - x0) ** 2 * (y1 - y2) - (x1 - x2) ** 2 * (y1 - y0)) / denom
    if not (x0 < vertex < x2):
        return float(x1)
    return float(vertex)
