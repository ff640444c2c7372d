"""Circuit-side observables of a stroke: capacitor charge, electromotive
force, control power, dissipation, and the regeneration-weighted total work.

The electrode voltage is slaved to the designed frequency profile through
q = -k * omega^2 with k = b^2 m C / (a Q), and the source must supply

    P_C = (R qdot + q/C) qdot = emf * qdot,

whose positive and negative lobes are integrated separately so the
regeneration factor mu can weight backflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import StrokeSpec, TrapCircuitParams
from .numerics import GridError, bisect_root, simpson_integrate, simpson_integrate_fn
from .sta_design import FrequencyProfile, RhoPolynomial, solve_rho_coefficients, \
    omega_squared_profile

# relative duration resolution for control-power zero crossings
_CROSSING_XTOL = 1e-12
# fraction of the stroke grid spent on each sign lobe, at minimum
_MIN_LOBE_SAMPLES = 201


def charge(omega_sq, params: TrapCircuitParams):
    """Capacitor charge sustaining a given squared trap frequency (C)."""
    return -params.charge_coefficient * omega_sq


def charge_rate(omega_sq_rate, params: TrapCircuitParams):
    """Current through the circuit for a given d(omega^2)/dt (A)."""
    return -params.charge_coefficient * omega_sq_rate


def emf(q, q_dot, params: TrapCircuitParams):
    """Source electromotive force q/C + R qdot (V)."""
    return q / params.capacitance + params.resistance * q_dot


def control_power(q, q_dot, params: TrapCircuitParams):
    """Exclusive drive power (R qdot + q/C) qdot delivered by the source (W)."""
    return (params.resistance * q_dot + q / params.capacitance) * q_dot


@dataclass(frozen=True)
class CircuitTrajectory:
    """Circuit observables sampled on the stroke grid."""

    t: np.ndarray                 # s
    q: np.ndarray                 # C
    q_dot: np.ndarray             # A
    emf: np.ndarray               # V
    p_c: np.ndarray               # W
    capacitor_energy: np.ndarray  # J, q^2/2C
    dissipation_rate: np.ndarray  # W, R qdot^2
    profile: FrequencyProfile
    params: TrapCircuitParams

    @property
    def t_f(self) -> float:
        return self.profile.t_f

    def control_power_at(self, t):
        """Analytic control power at arbitrary time, for crossing refinement."""
        w2 = self.profile.omega_sq_at(t)
        rate = self.profile.omega_sq_rate_at(t)
        return control_power(charge(w2, self.params), charge_rate(rate, self.params),
                             self.params)


def build_trajectory(profile: FrequencyProfile, params: TrapCircuitParams) -> CircuitTrajectory:
    q = charge(profile.omega_sq, params)
    q_dot = charge_rate(profile.omega_sq_rate, params)
    return CircuitTrajectory(
        t=profile.t,
        q=q,
        q_dot=q_dot,
        emf=emf(q, q_dot, params),
        p_c=control_power(q, q_dot, params),
        capacitor_energy=q ** 2 / (2.0 * params.capacitance),
        dissipation_rate=params.resistance * q_dot ** 2,
        profile=profile,
        params=params,
    )


@dataclass(frozen=True)
class WorkBreakdown:
    """Integrated stroke energetics of the control circuit."""

    w_total: float          # J, w_positive + mu * w_negative
    w_positive: float       # J, >= 0
    w_negative: float       # J, <= 0
    delta_capacitor: float  # J, exact from endpoint charges
    dissipated: float       # J, quadrature of R qdot^2
    mu: float
    crossings: tuple[float, ...]  # s, refined zeros of P_C inside the stroke


def _refined_crossings(traj: CircuitTrajectory) -> list[float]:
    """Zeros of P_C located between grid samples of opposite sign."""
    t, p = traj.t, traj.p_c
    xtol = _CROSSING_XTOL * traj.t_f
    crossings = []
    for i in range(p.size - 1):
        a, b = p[i], p[i + 1]
        if a == 0.0 and 0 < i:
            crossings.append(float(t[i]))
        elif (a > 0 and b < 0) or (a < 0 and b > 0):
            crossings.append(bisect_root(traj.control_power_at, float(t[i]),
                                         float(t[i + 1]), xtol))
    return crossings


def total_work(traj: CircuitTrajectory, mu: float) -> WorkBreakdown:
    """Sign-split total work of the stroke, Simpson per lobe.

    Zero crossings of P_C are refined by bisection so Simpson panels never
    straddle a sign change; positive and negative lobes accumulate
    separately and combine as W = W+ + mu * W-.
    """
    t, p = traj.t, traj.p_c
    if t.size < 3:
        raise GridError("total work needs at least 3 samples")
    dt = float(t[1] - t[0])
    q0, q1 = traj.q[0], traj.q[-1]
    delta_cap = float((q1 * q1 - q0 * q0) / (2.0 * traj.params.capacitance))
    dissipated = simpson_integrate(traj.dissipation_rate, dt)

    if np.max(np.abs(p)) == 0.0:
        return WorkBreakdown(0.0, 0.0, 0.0, delta_cap, dissipated, mu, ())

    edges = [0.0] + _refined_crossings(traj) + [traj.t_f]
    w_pos = 0.0
    w_neg = 0.0
    n_grid = t.size
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        n_sub = max(_MIN_LOBE_SAMPLES, int(round((b - a) / traj.t_f * n_grid)))
        if n_sub % 2 == 0:
            n_sub += 1
        lobe = simpson_integrate_fn(traj.control_power_at, a, b, n_sub)
        if lobe >= 0.0:
            w_pos += lobe
        else:
            w_neg += lobe
    return WorkBreakdown(
        w_total=w_pos + mu * w_neg,
        w_positive=w_pos,
        w_negative=w_neg,
        delta_capacitor=delta_cap,
        dissipated=dissipated,
        mu=mu,
        crossings=tuple(edges[1:-1]),
    )


DISSIPATION_DOMINATED = "dissipation_dominated"
CAPACITOR_DOMINATED = "capacitor_dominated"
MIXED = "mixed"

# |ratio| thresholds separating the asymptotic regimes
_RATIO_LOW = 0.1
_RATIO_HIGH = 10.0


class RegimePoint(NamedTuple):
    ratio: float
    regime: str


def regime_ratio(profile: FrequencyProfile, params: TrapCircuitParams, t) -> RegimePoint:
    """Timescale ratio omega/(2 omega_dot) over RC at time t, classified.

    Computed as omega^2 / d(omega^2)/dt / RC, which extends the ratio to
    transiently negative omega^2. A vanishing rate means the capacitor
    term is all there is, so that point classifies as capacitor-dominated
    by convention.
    """
    w2 = float(profile.omega_sq_at(t))
    rate = float(profile.omega_sq_rate_at(t))
    if rate == 0.0:
        return RegimePoint(math.inf, CAPACITOR_DOMINATED)
    ratio = w2 / rate / params.time_constant
    mag = abs(ratio)
    if mag < _RATIO_LOW:
        regime = DISSIPATION_DOMINATED
    elif mag > _RATIO_HIGH:
        regime = CAPACITOR_DOMINATED
    else:
        regime = MIXED
    return RegimePoint(ratio, regime)


def regime_histogram(profile: FrequencyProfile, params: TrapCircuitParams) -> dict[str, int]:
    """Count grid points per regime classification."""
    rate = profile.omega_sq_rate
    with np.errstate(divide="ignore", invalid="ignore"):
        mag = np.abs(profile.omega_sq / rate) / params.time_constant
    mag = np.where(rate == 0.0, np.inf, mag)
    counts = {
        DISSIPATION_DOMINATED: int(np.sum(mag < _RATIO_LOW)),
        MIXED: int(np.sum((mag >= _RATIO_LOW) & (mag <= _RATIO_HIGH))),
        CAPACITOR_DOMINATED: int(np.sum(mag > _RATIO_HIGH)),
    }
    return counts


def verify_power_identity(traj: CircuitTrajectory, method: str = "analytic") -> float:
    """Max residual of emf*qdot = d(q^2/2C)/dt + R qdot^2 over the grid (W).

    The analytic method uses d(q^2/2C)/dt = q qdot / C, making the
    identity algebraic; the finite_difference method differentiates the
    sampled capacitor energy instead.
    """
    drive = traj.emf * traj.q_dot
    if method == "analytic":
        dcap = traj.q * traj.q_dot / traj.params.capacitance
    elif method == "finite_difference":
        dcap = np.gradient(traj.capacitor_energy, traj.t, edge_order=2)
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(np.max(np.abs(drive - dcap - traj.dissipation_rate)))


@dataclass(frozen=True)
class StrokeResult:
    """Everything the pipeline produces for one stroke."""

    spec: StrokeSpec
    params: TrapCircuitParams
    polynomial: RhoPolynomial
    profile: FrequencyProfile
    trajectory: CircuitTrajectory
    work: WorkBreakdown


def evaluate_stroke(spec: StrokeSpec, params: TrapCircuitParams,
                    mu: float | None = None) -> StrokeResult:
    """Design the ramp, sample the circuit, and integrate the total work."""
    poly = solve_rho_coefficients(spec)
    profile = omega_squared_profile(poly, spec.omega_start, spec.n_samples)
    traj = build_trajectory(profile, params)
    work = total_work(traj, spec.mu if mu is None else mu)
    return StrokeResult(spec=spec, params=params, polynomial=poly,
                        profile=profile, trajectory=traj, work=work)
