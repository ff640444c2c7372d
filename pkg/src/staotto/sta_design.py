"""Inverse-engineered trap frequency ramps from a polynomial scaling factor.

A stroke is parameterized by the dimensionless width factor rho(t) of the
dynamical modes: a quintic in s = t/t_f pinned by six boundary conditions
(value, slope, and curvature at both ends) so that the ion starts and ends
in stationary states. The drive frequency follows from the auxiliary
relation

    omega^2(t) = omega_start^2 / rho^4 - rho_ddot / rho,

so rho'' = 0 at the edges makes omega(0) = omega_start and
omega(t_f) = omega_end = omega_start / gamma^2 hold exactly.

All derivatives here are analytic polynomial derivatives; the sampling
grid only ever affects quadrature downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .model import StrokeSpec


class DomainError(ValueError):
    """Evaluation time outside [0, t_f]."""


class BracketError(ValueError):
    """Search bracket does not contain the sought sign change."""


# slack for t on the closed interval [0, t_f], relative to t_f
_EDGE_SLACK = 1e-9


def _derivative_coefficients(coeffs: np.ndarray, order: int) -> np.ndarray:
    c = np.asarray(coeffs, dtype=float)
    for _ in range(order):
        c = c[1:] * np.arange(1, c.size)
    return c


def _horner(coeffs: np.ndarray, s):
    acc = np.zeros_like(np.asarray(s, dtype=float))
    for c in coeffs[::-1]:
        acc = acc * s + c
    return acc


@dataclass(frozen=True)
class RhoPolynomial:
    """Quintic scaling-factor ansatz rho(s) = sum_i c_i s^i with s = t/t_f."""

    coefficients: tuple[float, ...]
    t_f: float
    gamma: float

    def evaluate(self, t, order: int = 0):
        """rho or one of its first three time derivatives at time t.

        ``t`` may be a scalar or an array inside [0, t_f]; the result of
        order k carries units of s^-k.
        """
        if order not in (0, 1, 2, 3):
            raise DomainError(f"derivative order {order} not supported (0..3)")
        t_arr = np.asarray(t, dtype=float)
        slack = _EDGE_SLACK * self.t_f
        if np.any(t_arr < -slack) or np.any(t_arr > self.t_f + slack):
            raise DomainError(f"time outside [0, {self.t_f}]")
        s = np.clip(t_arr / self.t_f, 0.0, 1.0)
        c = _derivative_coefficients(np.asarray(self.coefficients), order)
        out = _horner(c, s) / self.t_f ** order
        return out if out.ndim else float(out)

    def evaluate_s(self, s, order: int = 0):
        """Same as ``evaluate`` but on the reduced variable s = t/t_f."""
        c = _derivative_coefficients(np.asarray(self.coefficients), order)
        out = _horner(c, np.asarray(s, dtype=float)) / self.t_f ** order
        return out if out.ndim else float(out)

    def boundary_residuals(self) -> np.ndarray:
        """Dimensionless residuals of the six design conditions.

        Order: rho(0)-1, rho(t_f)-gamma, rho_dot(0)*t_f, rho_dot(t_f)*t_f,
        rho_ddot(0)*t_f^2, rho_ddot(t_f)*t_f^2.
        """
        tf = self.t_f
        return np.array([
            self.evaluate(0.0) - 1.0,
            self.evaluate(tf) - self.gamma,
            self.evaluate(0.0, 1) * tf,
            self.evaluate(tf, 1) * tf,
            self.evaluate(0.0, 2) * tf ** 2,
            self.evaluate(tf, 2) * tf ** 2,
        ])


def solve_rho_coefficients(spec: StrokeSpec) -> RhoPolynomial:
    """Scaling-factor polynomial meeting the six boundary conditions.

    Closed form of the boundary-value system: c0 = 1, c1 = c2 = 0,
    c3 = 10(gamma-1), c4 = -15(gamma-1), c5 = 6(gamma-1).
    """
    d = spec.gamma - 1.0
    coeffs = (1.0, 0.0, 0.0, 10.0 * d, -15.0 * d, 6.0 * d)
    return RhoPolynomial(coefficients=coeffs, t_f=spec.t_f, gamma=spec.gamma)


def rho_eval(poly: RhoPolynomial, t, order: int = 0):
    """Functional alias for ``RhoPolynomial.evaluate``."""
    return poly.evaluate(t, order)


@dataclass(frozen=True)
class FrequencyProfile:
    """Sampled drive profile on a uniform grid, plus analytic evaluators.

    ``omega_sq`` may transiently go negative for fast strokes; that is
    flagged, not rejected, since the charge map stays defined either way.
    """

    t: np.ndarray              # s
    rho: np.ndarray
    rho_dot: np.ndarray        # 1/s
    rho_ddot: np.ndarray       # 1/s^2
    omega_sq: np.ndarray       # (rad/s)^2
    omega_sq_rate: np.ndarray  # (rad/s)^2 / s
    monotone_omega: bool
    positive_omega_sq: bool
    omega_start: float
    polynomial: RhoPolynomial

    @property
    def t_f(self) -> float:
        return self.polynomial.t_f

    @property
    def dt(self) -> float:
        return self.t[1] - self.t[0]

    def rho_at(self, t, order: int = 0):
        return self.polynomial.evaluate(t, order)

    def omega_sq_at(self, t):
        rho = self.polynomial.evaluate(t)
        ddot = self.polynomial.evaluate(t, 2)
        return self.omega_start ** 2 / rho ** 4 - ddot / rho

    def omega_sq_rate_at(self, t):
        p = self.polynomial
        rho = p.evaluate(t)
        d1 = p.evaluate(t, 1)
        d2 = p.evaluate(t, 2)
        d3 = p.evaluate(t, 3)
        return (-4.0 * self.omega_start ** 2 * d1 / rho ** 5
                - d3 / rho + d2 * d1 / rho ** 2)


def omega_squared_profile(poly: RhoPolynomial, omega_start: float,
                          n_samples: int = 10001) -> FrequencyProfile:
    """Sample the inverse-engineered omega^2(t) and its analytic rate.

    The monotone flag scans the grid for sign changes of the rate
    (non-strict: the rate may touch zero); the positivity flag scans
    omega^2 itself.
    """
    s = np.linspace(0.0, 1.0, n_samples)
    t = s * poly.t_f
    rho = poly.evaluate_s(s, 0)
    if np.any(rho <= 0.0):
        raise ValueError("scaling factor must stay positive on the grid")
    d1 = poly.evaluate_s(s, 1)
    d2 = poly.evaluate_s(s, 2)
    d3 = poly.evaluate_s(s, 3)
    w0_sq = omega_start ** 2
    omega_sq = w0_sq / rho ** 4 - d2 / rho
    rate = -4.0 * w0_sq * d1 / rho ** 5 - d3 / rho + d2 * d1 / rho ** 2

    scale = float(np.max(np.abs(rate)))
    tol = 1e-12 * scale
    monotone = not (np.any(rate > tol) and np.any(rate < -tol))
    positive = bool(np.all(omega_sq > 0.0))
    return FrequencyProfile(
        t=t, rho=rho, rho_dot=d1, rho_ddot=d2,
        omega_sq=omega_sq, omega_sq_rate=rate,
        monotone_omega=monotone, positive_omega_sq=positive,
        omega_start=omega_start, polynomial=poly,
    )


def stroke_profile(spec: StrokeSpec) -> FrequencyProfile:
    """Design the polynomial for ``spec`` and sample its frequency profile."""
    return omega_squared_profile(solve_rho_coefficients(spec),
                                 spec.omega_start, spec.n_samples)


def min_monotone_tf(spec: StrokeSpec, bracket: tuple[float, float],
                    rel_tol: float = 1e-3) -> float:
    """Smallest stroke duration with monotone omega(t), located by bisection.

    ``bracket`` = (t_lo, t_hi) must straddle the flag change: non-monotone
    at t_lo, monotone at t_hi. The result is resolved to ``rel_tol``
    relative.
    """
    lo, hi = bracket
    if not (0.0 < lo < hi):
        raise BracketError("bracket must satisfy 0 < lo < hi")

    def monotone(tf: float) -> bool:
        return stroke_profile(replace(spec, t_f=tf)).monotone_omega

    if monotone(lo):
        raise BracketError("profile already monotone at lower bracket end")
    if not monotone(hi):
        raise BracketError("profile not monotone at upper bracket end")
    while hi - lo > 0.5 * rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if monotone(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)
