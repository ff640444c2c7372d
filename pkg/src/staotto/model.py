"""Physical parameters, units policy, and input validation.

Everything downstream computes in SI. Lab units (frequency in MHz as
omega/2pi, durations in microseconds, temperatures in millikelvin,
capacitance in nanofarad, electrode scale in millimeters) exist only at
the user boundary and are converted on the way in by ``build_stroke_spec``
/ ``build_cycle_spec``; the inverse helpers exist for reporting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

TWO_PI = 2.0 * math.pi

# lab-unit scale factors
_MHZ = 1.0e6
_US = 1.0e-6
_MK = 1.0e-3
_NF = 1.0e-9
_MM = 1.0e-3


class InvalidSpecError(ValueError):
    """One or more user-supplied parameters violate a model invariant."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants in SI, fixed at standard values."""

    hbar: float = 1.054571817e-34            # J s
    boltzmann: float = 1.380649e-23          # J/K (exact)
    elementary_charge: float = 1.602176634e-19  # C (exact)
    # 39.9626 u; the singly-charged ion carries essentially the atomic mass
    ca40_ion_mass: float = 39.9626 * 1.66053906660e-27  # kg

    def __post_init__(self):
        bad = [n for n, v in vars(self).items() if not (math.isfinite(v) and v > 0)]
        if bad:
            raise InvalidSpecError([f"{n} must be positive and finite" for n in bad])


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class TrapCircuitParams:
    """Static parameters of trap electrode, ion, and RC drive circuit (SI).

    ``potential_amplitude`` and ``electrode_scale`` are the height and
    width of the Gaussian electrode potential whose harmonic expansion
    confines the ion; ``resistance`` and ``capacitance`` define the
    low-pass filter between power source and electrode.
    """

    potential_amplitude: float      # dimensionless electrode potential height
    electrode_scale: float          # m
    ion_mass: float                 # kg
    ion_charge: float               # C
    resistance: float               # Ohm
    capacitance: float              # F

    def __post_init__(self):
        violations = []
        for name in ("electrode_scale", "ion_mass", "ion_charge", "resistance", "capacitance"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                violations.append(f"{name} must be positive and finite")
        if not math.isfinite(self.potential_amplitude) or self.potential_amplitude == 0.0:
            violations.append("potential_amplitude must be nonzero and finite")
        if violations:
            raise InvalidSpecError(violations)
        k = self.charge_coefficient
        if not math.isfinite(k) or k == 0.0:
            raise InvalidSpecError("charge coefficient b^2*m*C/(a*Q) must be finite and nonzero")

    @property
    def charge_coefficient(self) -> float:
        """Capacitor charge per unit squared trap frequency, q = -k * omega^2."""
        return (self.electrode_scale ** 2 * self.ion_mass * self.capacitance
                / (self.potential_amplitude * self.ion_charge))

    @property
    def gauge_energy_coefficient(self) -> float:
        """Coefficient b^2*m of the frequency-dependent energy offset."""
        return self.electrode_scale ** 2 * self.ion_mass

    @property
    def time_constant(self) -> float:
        return self.resistance * self.capacitance


@dataclass(frozen=True)
class StrokeSpec:
    """One expansion or compression stroke, in SI."""

    omega_start: float   # rad/s
    omega_end: float     # rad/s
    t_f: float           # s
    beta: float          # 1/J, inverse temperature of the initial state
    mu: float = -1.0     # regeneration factor for negative control power
    n_samples: int = 10001

    def __post_init__(self):
        violations = []
        for name in ("omega_start", "omega_end", "t_f", "beta"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                violations.append(f"{name} must be positive and finite")
        if not (-1.0 <= self.mu <= 1.0):
            violations.append("mu must lie in [-1, 1]")
        if self.n_samples < 3 or self.n_samples % 2 == 0:
            violations.append("n_samples must be odd and >= 3")
        if violations:
            raise InvalidSpecError(violations)

    @property
    def gamma(self) -> float:
        """Target scaling-factor value (omega_start/omega_end)^(1/2)."""
        return math.sqrt(self.omega_start / self.omega_end)


@dataclass(frozen=True)
class CycleSpec:
    """Four-stroke Otto cycle: two ramps plus two bath contacts.

    Construction never raises; use ``validate_cycle_spec`` to collect
    violations (``run_cycle`` does so before computing anything).
    """

    omega_1: float          # rad/s, low frequency
    omega_2: float          # rad/s, high frequency
    beta_cold: float        # 1/J
    beta_hot: float         # 1/J
    t_comp: float           # s
    t_exp: float            # s
    t_therm_hot: float      # s
    t_therm_cold: float     # s
    params: TrapCircuitParams = field(repr=False, default=None)
    mu: float = -1.0

    @property
    def period(self) -> float:
        return self.t_comp + self.t_exp + self.t_therm_hot + self.t_therm_cold


def _is_positive_number(x) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x) and x > 0


def validate_cycle_spec(spec: CycleSpec) -> list[str]:
    """Return every violated cycle invariant (empty list means valid)."""
    v = []
    ok = {}
    for name in ("omega_1", "omega_2", "beta_cold", "beta_hot",
                 "t_comp", "t_exp", "t_therm_hot", "t_therm_cold"):
        ok[name] = _is_positive_number(getattr(spec, name))
        if not ok[name]:
            v.append(f"{name} must be positive and finite")
    if ok["omega_1"] and ok["omega_2"] and spec.omega_2 <= spec.omega_1:
        v.append("omega_2 > omega_1 required")
    if ok["beta_cold"] and ok["beta_hot"] and spec.beta_cold <= spec.beta_hot:
        v.append("hot bath must be hotter (beta_cold > beta_hot)")
    if not (isinstance(spec.mu, (int, float)) and -1.0 <= spec.mu <= 1.0):
        v.append("mu must lie in [-1, 1]")
    if spec.params is None:
        v.append("params must be set")
    return v


# ---------------------------------------------------------------------------
# lab-unit conversions

def omega_from_mhz(f_mhz: float) -> float:
    """Ordinary frequency in MHz -> angular frequency in rad/s."""
    return TWO_PI * _MHZ * f_mhz


def mhz_from_omega(omega: float) -> float:
    return omega / (TWO_PI * _MHZ)


def beta_from_mk(temp_mk: float) -> float:
    """Temperature in mK -> inverse temperature in 1/J."""
    return 1.0 / (CONSTANTS.boltzmann * _MK * temp_mk)


def mk_from_beta(beta: float) -> float:
    return 1.0 / (CONSTANTS.boltzmann * _MK * beta)


def seconds_from_us(t_us: float) -> float:
    return _US * t_us


def us_from_seconds(t_s: float) -> float:
    return t_s / _US


def farad_from_nf(c_nf: float) -> float:
    return _NF * c_nf


def meters_from_mm(x_mm: float) -> float:
    return _MM * x_mm


def ca40_trap_params(a: float = 1.0, b_mm: float = 0.25,
                     resistance_ohm: float = 3.0,
                     capacitance_nf: float = 1.0) -> TrapCircuitParams:
    """Circuit parameters for a singly charged calcium-40 ion (lab units in)."""
    _require_positive({"b-mm": b_mm, "resistance-ohm": resistance_ohm,
                       "capacitance-nf": capacitance_nf})
    return TrapCircuitParams(
        potential_amplitude=a,
        electrode_scale=meters_from_mm(b_mm),
        ion_mass=CONSTANTS.ca40_ion_mass,
        ion_charge=CONSTANTS.elementary_charge,
        resistance=resistance_ohm,
        capacitance=farad_from_nf(capacitance_nf),
    )


def _require_positive(fields: dict[str, float]):
    bad = [name for name, v in fields.items()
           if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0)]
    if bad:
        raise InvalidSpecError([f"{name} must be positive and finite" for name in bad])


def build_stroke_spec(f_start_mhz: float,
                      f_end_mhz: float | None = None,
                      gamma: float | None = None,
                      tf_us: float = 0.2,
                      temp_mk: float = 1.0,
                      resistance_ohm: float = 3.0,
                      capacitance_nf: float = 1.0,
                      b_mm: float = 0.25,
                      a: float = 1.0,
                      mu: float = -1.0,
                      n_samples: int = 10001) -> tuple[StrokeSpec, TrapCircuitParams]:
    """Convert lab-unit stroke inputs to an SI (StrokeSpec, TrapCircuitParams) pair.

    Exactly one of ``f_end_mhz`` and ``gamma`` selects the stroke endpoint;
    ``gamma`` is the target scaling-factor value (f_end = f_start/gamma^2).
    Deterministic and side-effect free; raises InvalidSpecError naming the
    offending lab-unit field otherwise.
    """
    if (f_end_mhz is None) == (gamma is None):
        raise InvalidSpecError("exactly one of f-end-mhz and gamma must be given")
    _require_positive({"f-start-mhz": f_start_mhz, "tf-us": tf_us, "temp-mk": temp_mk})
    if gamma is not None:
        _require_positive({"gamma": gamma})
        f_end_mhz = f_start_mhz / gamma ** 2
    _require_positive({"f-end-mhz": f_end_mhz})
    params = ca40_trap_params(a=a, b_mm=b_mm, resistance_ohm=resistance_ohm,
                              capacitance_nf=capacitance_nf)
    spec = StrokeSpec(
        omega_start=omega_from_mhz(f_start_mhz),
        omega_end=omega_from_mhz(f_end_mhz),
        t_f=seconds_from_us(tf_us),
        beta=beta_from_mk(temp_mk),
        mu=mu,
        n_samples=n_samples,
    )
    return spec, params


def build_cycle_spec(f1_mhz: float = 1.0,
                     f2_mhz: float = 2.0,
                     temp_cold_mk: float = 1.0,
                     temp_hot_mk: float = 10.0,
                     t_comp_us: float = 0.2,
                     t_exp_us: float = 0.2,
                     t_therm_us: float = 1.0,
                     resistance_ohm: float = 3.0,
                     capacitance_nf: float = 1.0,
                     b_mm: float = 0.25,
                     a: float = 1.0,
                     mu: float = -1.0) -> CycleSpec:
    """Convert lab-unit cycle inputs to an SI CycleSpec (not yet validated)."""
    _require_positive({"f1-mhz": f1_mhz, "f2-mhz": f2_mhz,
                       "temp-cold-mk": temp_cold_mk, "temp-hot-mk": temp_hot_mk,
                       "t-comp-us": t_comp_us, "t-exp-us": t_exp_us,
                       "t-therm-us": t_therm_us})
    return CycleSpec(
        omega_1=omega_from_mhz(f1_mhz),
        omega_2=omega_from_mhz(f2_mhz),
        beta_cold=beta_from_mk(temp_cold_mk),
        beta_hot=beta_from_mk(temp_hot_mk),
        t_comp=seconds_from_us(t_comp_us),
        t_exp=seconds_from_us(t_exp_us),
        t_therm_hot=seconds_from_us(t_therm_us),
        t_therm_cold=seconds_from_us(t_therm_us),
        params=ca40_trap_params(a=a, b_mm=b_mm, resistance_ohm=resistance_ohm,
                                capacitance_nf=capacitance_nf),
        mu=mu,
    )
