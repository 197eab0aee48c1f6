"""Physical inputs, unit conventions and single-oscillator derived quantities.

All frequencies and rates are angular (rad/s).  Values quoted "in Hz" are
multiplied by ``2*pi`` on ingest, which is the only unit conversion performed
anywhere in the package.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, DomainError, OverdampedError

#: Reduced Planck constant, J s.
HBAR = 1.054571817e-34
#: Boltzmann constant, J/K (exact).
K_B = 1.380649e-23
#: Speed of light in vacuum, m/s (exact).
C_LIGHT = 2.99792458e8

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class MechanicalParams:
    """Damped mechanical oscillator.

    Parameters
    ----------
    mass : float
        Effective mass in kg.
    bare_frequency : float
        Undamped angular frequency ``Omega`` in rad/s.
    damping : float
        Energy damping rate ``gamma_m`` in rad/s.

    Raises
    ------
    OverdampedError
        If ``Omega**2 <= gamma_m**2 / 4``.
    """

    mass: float
    bare_frequency: float
    damping: float

    def __post_init__(self):
        for name in ("mass", "bare_frequency", "damping"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and positive, got {value!r}")
        if self.bare_frequency**2 <= self.damping**2 / 4:
            raise OverdampedError(
                f"overdamped oscillator: Omega={self.bare_frequency:g}, gamma_m={self.damping:g}"
            )

    @property
    def damped_frequency(self) -> float:
        """``omega = sqrt(Omega**2 - gamma_m**2 / 4)``."""
        half = 0.5 * self.damping
        return math.sqrt((self.bare_frequency - half) * (self.bare_frequency + half))

    @property
    def frequency_gap(self) -> float:
        """``Omega - omega`` evaluated without cancellation."""
        return self.damping**2 / (4.0 * (self.bare_frequency + self.damped_frequency))

    @property
    def tau(self) -> complex:
        """Unit-modulus phase ``omega/Omega - i gamma_m / (2 Omega)``."""
        return complex(self.damped_frequency, -0.5 * self.damping) / self.bare_frequency

    def derived(self) -> "DerivedMechanical":
        return DerivedMechanical(self.damped_frequency, self.tau)


@dataclass(frozen=True)
class DerivedMechanical:
    """Damped frequency (rad/s) and mode phase of a mechanical oscillator."""

    damped_frequency: float
    tau: complex


@dataclass(frozen=True)
class CavityParams:
    """Optical cavity mode.

    Parameters
    ----------
    resonance : float
        Cavity resonance ``omega_c`` in rad/s.
    decay : float
        Energy decay rate ``gamma_c`` in rad/s.
    length : float
        Cavity length in m.
    """

    resonance: float
    decay: float
    length: float

    def __post_init__(self):
        for name in ("resonance", "decay", "length"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and positive, got {value!r}")

    @property
    def g0(self) -> float:
        """Radiation-pressure coupling ``omega_c / L`` in rad/(s m)."""
        return self.resonance / self.length


@dataclass(frozen=True)
class LaserDrive:
    """Monochromatic pump laser: angular frequency (rad/s) and power (W)."""

    frequency: float
    power: float

    def __post_init__(self):
        if not (math.isfinite(self.frequency) and self.frequency > 0):
            raise DomainError(f"laser frequency must be positive, got {self.frequency!r}")
        if not (math.isfinite(self.power) and self.power >= 0):
            raise DomainError(f"laser power must be nonnegative, got {self.power!r}")

    def amplitude(self, cavity: CavityParams) -> float:
        """Drive amplitude ``E = sqrt(P gamma_c / (hbar omega_0))`` in s^-1/2 units."""
        return math.sqrt(self.power * cavity.decay / (HBAR * self.frequency))


@dataclass(frozen=True)
class ThermalEnv:
    """Phonon bath temperature.

    Zero temperature is an explicit state (``beta is None``) rather than an
    infinite float, so no ``inf`` ever enters arithmetic.
    """

    beta: float | None

    def __post_init__(self):
        if self.beta is not None and not (math.isfinite(self.beta) and self.beta > 0):
            raise DomainError(f"beta must be finite and positive, got {self.beta!r}")

    @classmethod
    def from_temperature(cls, kelvin: float) -> "ThermalEnv":
        if kelvin == 0:
            return cls.zero_temperature()
        if not kelvin > 0:
            raise DomainError(f"temperature must be nonnegative, got {kelvin!r}")
        return cls(1.0 / (K_B * kelvin))

    @classmethod
    def zero_temperature(cls) -> "ThermalEnv":
        return cls(None)

    @property
    def is_zero_temperature(self) -> bool:
        return self.beta is None

    @property
    def temperature(self) -> float:
        """Temperature in K (0.0 for the zero-temperature state)."""
        return 0.0 if self.beta is None else 1.0 / (K_B * self.beta)


ZERO_TEMPERATURE = ThermalEnv.zero_temperature()


@dataclass(frozen=True)
class SystemParams:
    """Complete parameter set of the driven optomechanical system."""

    mech: MechanicalParams
    cavity: CavityParams
    laser: LaserDrive
    env: ThermalEnv = field(default=ZERO_TEMPERATURE)

    @property
    def drive_amplitude(self) -> float:
        return self.laser.amplitude(self.cavity)

    @property
    def bare_detuning(self) -> float:
        """``Delta_0 = omega_c - omega_0`` before the radiation-pressure shift."""
        return self.cavity.resonance - self.laser.frequency

    def with_cavity_decay(self, gamma_c: float) -> "SystemParams":
        return replace(self, cavity=replace(self.cavity, decay=gamma_c))

    def with_power(self, power: float) -> "SystemParams":
        return replace(self, laser=replace(self.laser, power=power))

    def with_env(self, env: ThermalEnv) -> "SystemParams":
        return replace(self, env=env)

    def describe(self) -> dict[str, float | str]:
        """Flat dictionary of the inputs, used for file headers."""
        return {
            "m_kg": self.mech.mass,
            "omega_m": self.mech.bare_frequency,
            "gamma_m": self.mech.damping,
            "omega_c": self.cavity.resonance,
            "gamma_c": self.cavity.decay,
            "length_m": self.cavity.length,
            "laser_power_w": self.laser.power,
            "laser_omega0": self.laser.frequency,
            "temperature_k": self.env.temperature if self.env.beta is not None else "zero",
        }


def damped_frequency(mech: MechanicalParams) -> float:
    """Damped angular frequency ``sqrt(Omega**2 - gamma_m**2/4)`` in rad/s."""
    return mech.damped_frequency


def mode_phase_tau(mech: MechanicalParams) -> complex:
    """Mode phase factor; ``abs(tau) == 1`` up to rounding."""
    return mech.tau


def planck_occupation(env: ThermalEnv, omega):
    """Bose-Einstein mean occupation ``1 / (exp(beta hbar omega) - 1)``.

    Parameters
    ----------
    env : ThermalEnv
    omega : float or array_like
        Positive angular frequency in rad/s.

    Returns
    -------
    float or ndarray
        Zero for the zero-temperature state.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise DomainError("planck_occupation requires omega > 0")
    if env.beta is None:
        out = np.zeros_like(omega)
    else:
        with np.errstate(over="ignore"):
            out = 1.0 / np.expm1(env.beta * HBAR * omega)
    return float(out) if out.ndim == 0 else out


def preset_p0(
    temperature: float = 300.0,
    gamma_c: float = 5.0e7,
    laser_omega0: float | None = None,
) -> SystemParams:
    """Canonical parameter set of the cooling study.

    Mass 2.5e-10 kg, ``Omega = 2 pi 10^7``, ``gamma_m = 2 pi 10^2``, a 0.5 mm
    cavity resonant at 1064 nm pumped with 50 mW.  The bath temperature and
    the cavity decay are not part of the original set; they default to room
    temperature and 5e7 rad/s.  The laser frequency defaults to the cavity
    resonance.
    """
    omega_c = TWO_PI * C_LIGHT / 1064e-9
    return SystemParams(
        mech=MechanicalParams(2.5e-10, TWO_PI * 1e7, TWO_PI * 1e2),
        cavity=CavityParams(omega_c, gamma_c, 5e-4),
        laser=LaserDrive(omega_c if laser_omega0 is None else laser_omega0, 5e-2),
        env=ThermalEnv.from_temperature(temperature),
    )


PRESETS = {"P0": preset_p0}

_FREQ_KEYS = ("omega_m", "gamma_m", "omega_c", "gamma_c", "laser_omega0")
_PLAIN_KEYS = ("m_kg", "length_m", "laser_power_w", "temperature_k", "beta", "zero_temp")
_VALUE_RE = re.compile(r"^\s*([-+0-9.eE]+)\s*(hz|rad/s)?\s*$", re.IGNORECASE)


def parse_frequency(text: str, *, hz: bool = False) -> float:
    """Parse ``"6.28e7"``, ``"1e7 Hz"`` or ``"6.28e7 rad/s"`` into rad/s."""
    match = _VALUE_RE.match(text)
    if not match:
        raise ConfigError(f"cannot parse frequency {text!r}")
    value = float(match.group(1))
    unit = (match.group(2) or "").lower()
    if hz or unit == "hz":
        value *= TWO_PI
    return value


def parse_config_text(text: str) -> dict[str, float | bool]:
    """Parse ``key = value`` lines into canonical keys with SI/rad-s values."""
    out: dict[str, float | bool] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        hz = key.endswith("_hz")
        base = key[:-3] if hz else key
        if base in out:
            raise ConfigError(f"line {lineno}: duplicate key {base!r}")
        if base in _FREQ_KEYS:
            out[base] = parse_frequency(value, hz=hz)
        elif base in _PLAIN_KEYS and not hz:
            if base == "zero_temp":
                flag = value.lower()
                if flag not in ("true", "false", "1", "0", "yes", "no"):
                    raise ConfigError(f"line {lineno}: zero_temp must be a boolean")
                out[base] = flag in ("true", "1", "yes")
            else:
                try:
                    out[base] = float(value)
                except ValueError:
                    raise ConfigError(f"line {lineno}: bad number {value!r}") from None
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    return out


def params_from_mapping(values: dict, base: SystemParams | None = None) -> SystemParams:
    """Build :class:`SystemParams` from canonical keys, falling back to ``base``."""
    if base is None:
        required = ("m_kg", "omega_m", "gamma_m", "omega_c", "gamma_c", "length_m", "laser_power_w")
        missing = [k for k in required if k not in values]
        if missing:
            raise ConfigError(f"missing keys: {', '.join(missing)}")
        base_map: dict = {}
    else:
        base_map = base.describe()
    merged = {**base_map, **values}
    temps = [k for k in ("temperature_k", "beta", "zero_temp") if k in values]
    if len(temps) > 1:
        raise ConfigError("give only one of temperature_k, beta, zero_temp")
    try:
        if "beta" in values:
            env = ThermalEnv(float(values["beta"]))
        elif values.get("zero_temp"):
            env = ZERO_TEMPERATURE
        elif "temperature_k" in values:
            env = ThermalEnv.from_temperature(float(values["temperature_k"]))
        elif base is not None:
            env = base.env
        else:
            env = ZERO_TEMPERATURE
        omega_c = float(merged["omega_c"])
        return SystemParams(
            mech=MechanicalParams(float(merged["m_kg"]), float(merged["omega_m"]), float(merged["gamma_m"])),
            cavity=CavityParams(omega_c, float(merged["gamma_c"]), float(merged["length_m"])),
            laser=LaserDrive(float(merged.get("laser_omega0", omega_c)), float(merged["laser_power_w"])),
            env=env,
        )
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path, base: SystemParams | None = None) -> SystemParams:
    """Read a flat ``key = value`` parameter file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return params_from_mapping(parse_config_text(text), base)
