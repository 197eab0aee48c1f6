"""Structured phonon baths: occupation spectra and noise correlation spectra.

An occupation spectrum ``N(nu)`` gives the mean number of bath quanta
available at angular frequency ``nu``.  A flat spectrum is the Markovian case.
"""

from __future__ import annotations

import math
import warnings
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import integrate as sp_integrate

from .errors import DomainError, ExtrapolationError, QuadratureError
from .numerics import QuadratureConfig, integrate_interval, integrate_real_line, integrate_semi_infinite
from .params import HBAR, MechanicalParams, ThermalEnv


class AsymmetricKernelWarning(UserWarning):
    """A user supplied ``k(nu)`` was not even and has been symmetrised."""


def _vectorized(func: Callable) -> Callable:
    """Wrap ``func`` so it accepts arrays even if written for scalars."""
    def call(nu):
        nu = np.asarray(nu, dtype=float)
        try:
            out = np.asarray(func(nu), dtype=float)
            if out.shape == nu.shape:
                return out
            if out.ndim == 0:
                return np.full(nu.shape, float(out))
        except (TypeError, ValueError):
            pass
        return np.vectorize(lambda x: float(func(x)), otypes=[float])(nu)
    return call


def even_kernel(k: Callable | float, probe_scale: float = 1.0) -> Callable:
    """Return the even part ``(k(nu) + k(-nu)) / 2`` of a coupling function.

    A constant is accepted as shorthand for a flat ``k``.  A warning is issued
    if ``k`` differs from its even part by more than 1e-9 (relative) on a
    logarithmic probe grid around ``probe_scale``.
    """
    if not callable(k):
        value = float(k)
        return lambda nu: np.full(np.shape(nu), value)
    kv = _vectorized(k)
    probe = probe_scale * np.logspace(-3, 3, 25)
    plus, minus = kv(probe), kv(-probe)
    if np.any(np.abs(plus - minus) > 1e-9 * np.maximum(np.abs(plus) + np.abs(minus), 1e-300)):
        warnings.warn("k(nu) is not even; using its even part", AsymmetricKernelWarning, stacklevel=3)
    return lambda nu: 0.5 * (kv(nu) + kv(-np.asarray(nu, dtype=float)))


def _x_over_expm1(x):
    """``x / (exp(x) - 1)`` with the removable singularity at 0 filled in."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-8
    safe = np.where(small, 1.0, x)
    with np.errstate(over="ignore"):
        out = safe / np.expm1(safe)
    return np.where(small, 1.0 - 0.5 * x, out)


class OccupationSpectrum(ABC):
    """Bath occupation ``N(nu) >= 0`` as a vectorised callable."""

    #: Value of a flat spectrum, ``None`` for structured ones.
    flat_value: float | None = None

    @abstractmethod
    def __call__(self, nu):
        """Evaluate ``N(nu)``; accepts floats or arrays."""

    @property
    def is_flat(self) -> bool:
        return self.flat_value is not None

    def features(self) -> list[tuple[float, float]]:
        """Points where the spectrum varies sharply, as ``(center, width)``."""
        return []


class FlatOccupation(OccupationSpectrum):
    """Frequency-independent occupation (Markovian bath)."""

    def __init__(self, value: float):
        value = float(value)
        if not (math.isfinite(value) and value >= 0):
            raise DomainError(f"occupation must be finite and nonnegative, got {value!r}")
        self.flat_value = value

    def __call__(self, nu):
        return np.full(np.shape(nu), self.flat_value) if np.ndim(nu) else self.flat_value

    def __repr__(self):
        return f"FlatOccupation({self.flat_value!r})"


class OhmicMatchedOccupation(OccupationSpectrum):
    """Occupation that makes the noise spectrum track the Ohmic reference one.

    ``N(nu) = |nu| k(nu) 2 omega / ((Omega^2 + nu^2) gamma_m (exp(beta hbar |nu|) - 1))``.

    Parameters
    ----------
    mech : MechanicalParams
    env : ThermalEnv
    k : callable or float, optional
        Even, nonnegative coupling function in rad/s.  Defaults to ``gamma_m``.
    """

    def __init__(self, mech: MechanicalParams, env: ThermalEnv, k: Callable | float | None = None):
        self.mech = mech
        self.env = env
        self.k = even_kernel(mech.damping if k is None else k, mech.damped_frequency)

    def __call__(self, nu):
        scalar = np.ndim(nu) == 0
        nu = np.abs(np.asarray(nu, dtype=float))
        if self.env.beta is None:
            out = np.zeros_like(nu)
        else:
            mech = self.mech
            bh = self.env.beta * HBAR
            # |nu| / expm1(beta hbar |nu|) written through x/expm1(x) for the nu -> 0 limit
            ratio = _x_over_expm1(bh * nu) / bh
            out = ratio * self.k(nu) * 2 * mech.damped_frequency / (
                (mech.bare_frequency**2 + nu**2) * mech.damping
            )
        return float(out) if scalar else out


class TabulatedOccupation(OccupationSpectrum):
    """Linearly interpolated occupation on a finite grid.

    Parameters
    ----------
    grid : array_like
        Strictly increasing angular frequencies (rad/s).
    values : array_like
        Nonnegative occupations at ``grid``.
    extrapolation : {"zero", "error"}
        Outside the grid return 0 (default) or raise
        :class:`~optomech.errors.ExtrapolationError`.
    """

    def __init__(self, grid, values, extrapolation: str = "zero"):
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or len(grid) < 2:
            raise DomainError("grid and values must be 1-D arrays of equal length >= 2")
        if not np.all(np.isfinite(grid)) or np.any(np.diff(grid) <= 0):
            raise DomainError("grid must be finite and strictly increasing")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise DomainError("tabulated occupations must be finite and nonnegative")
        if extrapolation not in ("zero", "error"):
            raise ValueError(f"unknown extrapolation policy {extrapolation!r}")
        self.grid = grid
        self.values = values
        self.extrapolation = extrapolation

    @classmethod
    def from_csv(cls, path: str | Path, extrapolation: str = "zero") -> "TabulatedOccupation":
        """Read two columns ``nu_rad_s, N`` (comment lines start with ``#``)."""
        rows = []
        for line in Path(path).read_text().splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = [p for p in line.replace(",", " ").split() if p]
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except (ValueError, IndexError):
                continue  # header row
        if not rows:
            raise DomainError(f"no numeric rows in {path}")
        data = np.array(rows)
        return cls(data[:, 0], data[:, 1], extrapolation)

    def __call__(self, nu):
        scalar = np.ndim(nu) == 0
        nu = np.asarray(nu, dtype=float)
        outside = (nu < self.grid[0]) | (nu > self.grid[-1])
        if self.extrapolation == "error" and np.any(outside):
            raise ExtrapolationError(
                f"frequency outside tabulated range [{self.grid[0]:g}, {self.grid[-1]:g}]"
            )
        out = np.interp(nu, self.grid, self.values, left=0.0, right=0.0)
        return float(out) if scalar else out

    def features(self):
        span = np.diff(self.grid)
        return [(float(x), float(w)) for x, w in zip(self.grid[1:-1], span[1:])][:64]


def occupation_at(spec: OccupationSpectrum, nu):
    """Evaluate ``N(nu)``; see the individual spectrum classes."""
    return spec(nu)


class NoiseSpectrum:
    """Symmetrised noise correlation spectrum ``R(nu)`` of the mechanical force noise.

    ``R(nu) = (m hbar gamma_m / 2 omega) [ (gamma_m^2/4 + (omega+nu)^2)(N(nu)+1/2)
    + (gamma_m^2/4 + (omega-nu)^2)(N(-nu)+1/2) ]``, in kg^2 m^2 s^-3 (J kg/s).
    """

    def __init__(self, mech: MechanicalParams, spec: OccupationSpectrum):
        self.mech = mech
        self.spec = spec

    def reduced(self, nu):
        """``R(nu) / (m hbar)`` in s^-2; this is what the spectra use."""
        nu = np.asarray(nu, dtype=float)
        gm, w = self.mech.damping, self.mech.damped_frequency
        a2 = 0.25 * gm * gm
        if self.spec.is_flat:
            half = self.spec.flat_value + 0.5
            # both branches share the same weight; their sum is 2 (Omega^2 + nu^2)
            return gm / w * half * (self.mech.bare_frequency**2 + nu * nu)
        plus = (a2 + (w + nu) ** 2) * (self.spec(nu) + 0.5)
        minus = (a2 + (w - nu) ** 2) * (self.spec(-nu) + 0.5)
        return gm / (2 * w) * (plus + minus)

    def __call__(self, nu):
        out = self.mech.mass * HBAR * self.reduced(nu)
        return float(out) if np.ndim(out) == 0 else out


def noise_spectrum(mech: MechanicalParams, spec: OccupationSpectrum) -> NoiseSpectrum:
    """Noise correlation spectrum for a given occupation spectrum."""
    return NoiseSpectrum(mech, spec)


class GZNoiseSpectrum:
    """Reference spectrum ``hbar m k(nu) nu coth(beta hbar nu / 2)`` of linear-coupling models."""

    def __init__(self, mech: MechanicalParams, k: Callable | float, env: ThermalEnv):
        self.mech = mech
        self.env = env
        self.k = even_kernel(k, mech.damped_frequency)

    def __call__(self, nu):
        scalar = np.ndim(nu) == 0
        nu = np.asarray(nu, dtype=float)
        m = self.mech.mass
        if self.env.beta is None:
            out = HBAR * m * self.k(nu) * np.abs(nu)
        else:
            half = 0.5 * self.env.beta * HBAR * np.abs(nu)
            # nu coth(beta hbar nu / 2) = (2 / beta hbar) * x coth x with x = beta hbar |nu| / 2
            small = half < 1e-8
            safe = np.where(small, 1.0, half)
            xcoth = np.where(small, 1.0 + half**2 / 3.0, safe / np.tanh(safe))
            out = HBAR * m * self.k(nu) * xcoth * 2.0 / (self.env.beta * HBAR)
        return float(out) if scalar else out


def gz_noise_spectrum(mech: MechanicalParams, k: Callable | float, env: ThermalEnv) -> GZNoiseSpectrum:
    """Reference noise spectrum for coupling function ``k`` (equal to ``2 m k(0)/beta`` at 0)."""
    return GZNoiseSpectrum(mech, k, env)


def effective_occupation(
    mech: MechanicalParams, spec: OccupationSpectrum, cfg: QuadratureConfig | None = None
) -> float:
    """Lorentzian average of ``N(nu)`` around the damped frequency.

    ``N_eff = (gamma_m / 2 pi) int N(nu) / (gamma_m^2/4 + (nu - omega)^2) dnu``.

    Raises
    ------
    QuadratureError
    """
    gm, w = mech.damping, mech.damped_frequency
    if spec.is_flat and spec.flat_value == 0:
        return 0.0

    def integrand(nu):
        return spec(nu) / (0.25 * gm * gm + (nu - w) ** 2)

    value, _ = integrate_real_line(
        integrand, cfg, features=[(w, gm), (0.0, w), *spec.features()]
    )
    return gm / (2 * math.pi) * value


def coarse_velocity_variance(
    mech: MechanicalParams,
    spec: OccupationSpectrum,
    dt: float,
    cfg: QuadratureConfig | None = None,
    periods: int = 64,
) -> float:
    """Variance of the finite-difference velocity noise over a time step ``dt``.

    Evaluates ``hbar gamma_m / (m omega dt) (1/2 + int K(nu) N(nu) dnu)`` with the
    unit-mass kernel ``K(nu) = 2 sin^2(nu dt / 2) / (pi nu^2 dt)``, in m^2/s^2.

    The kernel oscillates forever, so the integral is split at
    ``X = 2 pi periods / dt``: the core is integrated panel by panel between
    zeros of the sine, while on ``[X, inf)`` the identity
    ``2 sin^2(x/2) = 1 - cos x`` separates a monotone piece from a Fourier
    integral handled by QUADPACK's QAWF routine.
    """
    if not dt > 0:
        raise DomainError("dt must be positive")
    cfg = cfg or QuadratureConfig()
    pref = HBAR * mech.damping / (mech.mass * mech.damped_frequency * dt)
    def folded(nu):
        return spec(nu) + spec(-nu)

    def kernel(nu):
        nu = np.asarray(nu, dtype=float)
        half = 0.5 * nu * dt
        small = np.abs(half) < 1e-6
        safe = np.where(small, 1.0, half)
        sinc2 = np.where(small, 1.0 - half**2 / 3.0, (np.sin(safe) / safe) ** 2)
        return dt / (2 * math.pi) * sinc2  # equals 2 sin^2(nu dt/2) / (pi nu^2 dt)

    cut = 2 * math.pi * periods / dt
    zeros = 2 * math.pi / dt * np.arange(1, periods)
    core, _ = integrate_interval(lambda x: kernel(x) * folded(x), 0.0, cut, cfg, points=zeros)
    smooth, _ = integrate_semi_infinite(lambda x: folded(x) / (math.pi * dt * x * x), cut, cfg)
    osc, _, *info = sp_integrate.quad(
        lambda x: float(folded(np.asarray(x))) / (math.pi * dt * x * x),
        cut, np.inf, weight="cos", wvar=dt, full_output=1,
    )
    if len(info) > 1:
        raise QuadratureError(f"oscillatory tail did not converge: {info[1]}")
    return pref * (0.5 + core + smooth - osc)
