"""Mean mechanical energy of the driven oscillator and the laser cooling factor.

The fluctuation energy is ``hbar omega (n_rp + n_th + m_th)``: a radiation
pressure part, a thermal part and a thermal correction proportional to
``G^2 Delta`` that may be negative.  Without the laser it reduces to
``hbar omega (N_eff + 1/2)``; the cooling factor is the ratio of the thermal
parts with and without the laser.
"""

from __future__ import annotations

import enum
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bath_spectrum import FlatOccupation, OccupationSpectrum, effective_occupation
from .errors import DegeneratePairingError, DomainError, OptomechError, ValidityError
from .fluctuation_spectra import _integrate, _require_stable, sq_rp, sq_th
from .numerics import QuadratureConfig
from .optomech_linear import (
    OperatingPoint,
    char_poly,
    effective_coupling,
    operating_point,
    stability,
)
from .params import HBAR, K_B, SystemParams, planck_occupation
from .pole_analysis import PoleSet, poles_approximate, poles_numeric


class EnergyMethod(str, enum.Enum):
    QUADRATURE = "quadrature"
    RESIDUE = "residue"


@dataclass(frozen=True)
class EnergyBreakdown:
    """Dimensionless contributions to the mean fluctuation energy.

    Attributes
    ----------
    n_rp, n_th, m_th : float
        Radiation-pressure, thermal and thermal-correction parts, in units
        of ``hbar omega``.
    q_factor, k_factor : float
        ``n_th`` and ``m_th`` divided by ``(gamma_m / Gamma_m)(N_eff + 1/2)``.
    cooling_factor : float
        ``(n_th + m_th) / (N_eff + 1/2)``.
    fluct_energy : float
        ``hbar omega (n_rp + n_th + m_th)`` in J.
    method : EnergyMethod
    rate_ratio : float
        ``gamma_m / Gamma_m``.
    n_eff : float
    """

    n_rp: float
    n_th: float
    m_th: float
    q_factor: float
    k_factor: float
    cooling_factor: float
    fluct_energy: float
    method: EnergyMethod
    rate_ratio: float
    n_eff: float

    @property
    def total(self) -> float:
        return self.n_rp + self.n_th + self.m_th


def _build(op: OperatingPoint, n_rp, n_th, m_th, gamma_m_eff, n_eff, method) -> EnergyBreakdown:
    ratio = op.gamma_m / gamma_m_eff
    half = n_eff + 0.5
    return EnergyBreakdown(
        n_rp=n_rp, n_th=n_th, m_th=m_th,
        q_factor=n_th / (ratio * half),
        k_factor=m_th / (ratio * half),
        cooling_factor=(n_th + m_th) / half,
        fluct_energy=HBAR * op.damped_frequency * (n_rp + n_th + m_th),
        method=method, rate_ratio=ratio, n_eff=n_eff,
    )


def thermal_correction_density(op: OperatingPoint, spec: OccupationSpectrum | None, nu):
    """Integrand of ``m_th`` (times ``2 pi``), odd-part-free and real."""
    _require_stable(op)
    nu = np.asarray(nu, dtype=float)
    occ = op.occupation if spec is None else spec
    w, gm, gc, dl = op.damped_frequency, op.gamma_m, op.gamma_c, op.detuning
    g2 = op.coupling**2
    c2 = dl * dl + gc * gc / 4

    def branch(x):
        return 0.5 * g2 * dl - 0.5 * x * gc * gm + (w + x) * (x * x - c2)

    num = branch(nu) * (occ(nu) + 0.5) + branch(-nu) * (occ(-nu) + 0.5)
    out = g2 * gm * dl / (2 * np.abs(op.char_poly(nu)) ** 2) * num
    return float(out) if np.ndim(out) == 0 else out


def energy_quadrature(op: OperatingPoint, spec: OccupationSpectrum | None = None,
                      cfg: QuadratureConfig | None = None) -> EnergyBreakdown:
    """Energy breakdown by direct quadrature; any occupation spectrum.

    The effective damping ``Gamma_m`` used for ``q_factor``/``k_factor`` is
    the decay rate of the zero of ``d`` closest to ``gamma_m``.
    """
    _require_stable(op)
    occ = op.occupation if spec is None else spec
    om, w = op.bare_frequency, op.damped_frequency
    two_pi = 2 * math.pi
    n_rp = _integrate(op, lambda x: (om * om + x * x) / (2 * w * om) * sq_rp(op, occ, x), cfg) / two_pi
    n_th = _integrate(op, lambda x: w / om * sq_th(op, occ, x), cfg) / two_pi
    m_th = _integrate(op, lambda x: thermal_correction_density(op, occ, x), cfg) / two_pi
    n_eff = occ.flat_value if occ.is_flat else effective_occupation(op.mech, occ, cfg)
    # the decay rate nearest gamma_m stays well defined even when the cavity pair is overdamped
    rates = -2 * op.char_poly.roots().imag
    gamma_m_eff = float(rates[np.argmin(np.abs(rates - op.gamma_m))])
    return _build(op, n_rp, n_th, m_th, gamma_m_eff, n_eff, EnergyMethod.QUADRATURE)


def _lorentz_moments(poles: PoleSet) -> tuple[float, float, float, float]:
    """``int nu^(2k) / |d(nu)|^2`` for k = 0..3 with ``d`` built from ``poles``."""
    a, b = 0.5 * poles.gamma_m, 0.5 * poles.gamma_c
    x2, y2 = poles.omega_eff**2, poles.delta_eff**2
    d2 = ((a + b) ** 2 + x2 + y2) ** 2 - 4 * x2 * y2
    pre = math.pi / (2 * a * b * d2)
    i0 = pre * (a**3 + 4 * a * a * b + 4 * a * b * b + b**3 + a * x2 + b * y2) / ((a * a + x2) * (b * b + y2))
    i2 = pre * (a + b)
    i4 = pre * (a * a * b + a * b * b + a * y2 + b * x2)
    i6 = pre * (a**4 * b + 4 * a**3 * b * b + 4 * a * a * b**3 + a * b**4 + 2 * a * a * b * x2
                + 4 * a * a * b * y2 + 4 * a * b * b * x2 + 2 * a * b * b * y2 + a * y2 * y2 + b * x2 * x2)
    return i0, i2, i4, i6


def _residue_parts(op: OperatingPoint, poles: PoleSet):
    om, w, gm, gc, dl = op.bare_frequency, op.damped_frequency, op.gamma_m, op.gamma_c, op.detuning
    g2 = op.coupling**2
    x2, y2 = poles.omega_eff**2, poles.delta_eff**2
    c2 = dl * dl + gc * gc / 4
    d2 = (y2 + x2 + (gc + gm) ** 2 / 4) ** 2 - 4 * x2 * y2
    prod = om * om * c2 - g2 * w * dl
    brk = gm * om * om + gc * c2 + gm * gc * (gm + gc)
    return om, w, gm, gc, dl, g2, c2, d2, prod, brk


def radiation_pressure_residue(op: OperatingPoint, poles: PoleSet) -> float:
    """Closed form of ``n_rp`` in terms of the zeros."""
    om, w, gm, gc, dl, g2, c2, d2, prod, brk = _residue_parts(op, poles)
    return g2 * gc / (4 * poles.gamma_m * poles.gamma_c * d2) * (
        g2 * w * dl / (2 * prod) * brk + (dl * dl + w * w + (gc + gm) ** 2 / 4) * (gc + gm)
    )


def q_factor_residue(op: OperatingPoint, poles: PoleSet) -> float:
    """``Q = (Gamma_m / 2 pi) int (Omega^2 + nu^2) |c(nu)|^2 |c(-nu)|^2 / |d|^2``.

    Expanding the numerator in even powers of ``nu`` reduces it to four
    rational moments of ``1/|d|^2``.
    """
    om, dl, gc = op.bare_frequency, op.detuning, op.gamma_c
    h2 = gc * gc / 4
    s = dl * dl + h2
    coeff = (om * om * s * s,
             2 * om * om * (h2 - dl * dl) + s * s,
             om * om + 2 * (h2 - dl * dl),
             1.0)
    mom = _lorentz_moments(poles)
    return poles.gamma_m / (2 * math.pi) * sum(c * i for c, i in zip(coeff, mom))


def q_factor_alternative(op: OperatingPoint, poles: PoleSet) -> float:
    """Alternative closed form for ``Q``, kept for comparison only.

    It disagrees with direct quadrature (e.g. 0.997 instead of 2.61 at the
    critical resonant point of preset P0) and is not used elsewhere.
    """
    om, w, gm, gc, dl, g2, c2, d2, prod, brk = _residue_parts(op, poles)
    y2 = poles.delta_eff**2
    gce = poles.gamma_c
    om_e2 = poles.omega_eff**2 + poles.gamma_m**2 / 4
    l_plus = (gc * gc - gce * gce) / 4 - dl * dl + y2
    l_minus = (gc * gc + gce * gce) / 4 - dl * dl - y2
    inner = ((gc + gm) * (l_minus + 2 * om * om) / 16 + 2 * gc * om * om + 2 * gm * c2
             + om * om * l_minus / prod * brk)
    return (om * om + om_e2) / (2 * om_e2) + l_plus / (2 * gce * d2) * inner


def k_factor_residue(op: OperatingPoint, poles: PoleSet) -> float:
    """Closed form of ``K``, the scaled thermal correction."""
    om, w, gm, gc, dl, g2, c2, d2, prod, brk = _residue_parts(op, poles)
    return g2 * dl / (2 * poles.gamma_c * d2) * (
        c2 * (gm * gm / 4 - w * w) / (2 * w * prod) * brk
        + w * (gm / 2 + gc)
        - (gc * c2 + gm * (gm / 2 + gc) ** 2) / (2 * w)
    )


def energy_residue(op: OperatingPoint, n_eff: float, poles: PoleSet) -> EnergyBreakdown:
    """Energy breakdown from the residue closed forms (flat occupation ``n_eff``).

    Parameters
    ----------
    op : OperatingPoint
    n_eff : float
        Flat bath occupation.
    poles : PoleSet
        Zeros of ``d`` from any method; passing them in keeps pole error and
        formula error separable.
    """
    _require_stable(op)
    if not n_eff >= 0:
        raise DomainError("n_eff must be nonnegative")
    if op.coupling == 0:
        n_rp, q, k = 0.0, 1.0, 0.0
    else:
        n_rp = radiation_pressure_residue(op, poles)
        q = q_factor_residue(op, poles)
        k = k_factor_residue(op, poles)
    ratio = op.gamma_m / poles.gamma_m
    half = n_eff + 0.5
    return _build(op, n_rp, ratio * q * half, ratio * k * half, poles.gamma_m, n_eff,
                  EnergyMethod.RESIDUE)


def zero_detuning_energy(op: OperatingPoint, n_eff: float) -> EnergyBreakdown:
    """Closed forms at ``Delta = 0``: ``m_th = 0`` and ``n_th = N_eff + 1/2``."""
    if op.detuning != 0:
        raise DomainError("zero-detuning forms need Delta = 0")
    gm, gc, w = op.gamma_m, op.gamma_c, op.damped_frequency
    n_rp = op.coupling**2 * (gm + gc) / (4 * gm * ((gm + gc) ** 2 / 4 + w * w))
    return _build(op, n_rp, n_eff + 0.5, 0.0, gm, n_eff, EnergyMethod.RESIDUE)


def equivalent_temperature(op: OperatingPoint, n: float) -> float:
    """``hbar omega n / k_B`` in K, a scale for ``n`` quanta (not a true temperature)."""
    return HBAR * op.damped_frequency * n / K_B


MAP_COLUMNS = ("delta_rad_s", "gamma_c_rad_s", "cooling_factor", "n_rp", "n_th", "m_th",
               "stable", "pole_method")


@dataclass
class CoolingMap:
    """Rectangular ``(Delta, gamma_c)`` map of the cooling factor, Delta-major."""

    delta: np.ndarray
    gamma_c: np.ndarray
    cooling_factor: np.ndarray
    n_rp: np.ndarray
    n_th: np.ndarray
    m_th: np.ndarray
    stable: np.ndarray
    pole_method: np.ndarray
    meta: dict

    def grid(self, name: str = "cooling_factor") -> np.ndarray:
        """Column reshaped to ``(len(deltas), len(gamma_cs))``."""
        nd = len(np.unique(self.delta))
        return np.asarray(getattr(self, name)).reshape(nd, -1)

    def argmin(self) -> tuple[float, float, float]:
        """``(Delta, gamma_c, C)`` at the smallest finite cooling factor."""
        vals = np.where(np.isfinite(self.cooling_factor), self.cooling_factor, np.inf)
        i = int(np.argmin(vals))
        return float(self.delta[i]), float(self.gamma_c[i]), float(self.cooling_factor[i])

    def to_csv(self, target=None) -> str:
        buf = io.StringIO()
        if self.meta:
            buf.write("# params: " + ";".join(f"{k}={v}" for k, v in self.meta.items()) + "\n")
        buf.write(",".join(MAP_COLUMNS) + "\n")
        for i in range(len(self.delta)):
            nums = [self.delta[i], self.gamma_c[i], self.cooling_factor[i],
                    self.n_rp[i], self.n_th[i], self.m_th[i]]
            buf.write(",".join(f"{v:.12e}" for v in nums)
                      + f",{int(self.stable[i])},{self.pole_method[i]}\n")
        text = buf.getvalue()
        if target is not None:
            if hasattr(target, "write"):
                target.write(text)
            else:
                Path(target).write_text(text)
        return text


def _map_poles(params, detuning, coupling, method):
    if method == "numeric":
        return poles_numeric(char_poly(params, detuning, coupling))
    if method == "approximate":
        return poles_approximate(params, detuning, coupling)
    try:
        return poles_approximate(params, detuning, coupling)
    except ValidityError:
        return poles_numeric(char_poly(params, detuning, coupling))


def _map_point(params: SystemParams, n_eff: float, detuning: float, gamma_c: float, method: str):
    p = params.with_cavity_decay(gamma_c)
    g = effective_coupling(p, detuning)
    nan = (math.nan,) * 4
    if not stability(p, detuning, g).stable:
        return nan + (False, "unstable")
    op = operating_point(p, detuning, FlatOccupation(n_eff), coupling=g)
    try:
        poles = _map_poles(p, detuning, g, method)
        e = energy_residue(op, n_eff, poles)
        tag = poles.method.value
    except DegeneratePairingError as exc:
        # overdamped cavity pair: no (Gamma, frequency) labelling, integrate directly
        if method != "auto":
            return nan + (True, f"failed:{type(exc).__name__}")
        e = energy_quadrature(op)
        tag = EnergyMethod.QUADRATURE.value
    except OptomechError as exc:
        return nan + (True, f"failed:{type(exc).__name__}")
    return (e.cooling_factor, e.n_rp, e.n_th, e.m_th, True, tag)


def cooling_map(params: SystemParams, spec: OccupationSpectrum | None, delta_grid, gamma_c_grid,
                *, method: str = "auto", workers: int | None = None) -> CoolingMap:
    """Cooling factor over a grid of detunings and cavity decay rates.

    Each point uses the residue forms with approximate zeros where they are
    valid and numeric zeros otherwise (``method="auto"``); stable points whose
    cavity-like zeros are purely damped fall back to direct quadrature.  Unstable or
    failing points are kept as NaN rows with ``stable`` and ``pole_method``
    recording why.

    Parameters
    ----------
    spec : OccupationSpectrum or None
        Bath; reduced to its effective occupation.  ``None`` means the Planck
        occupation at the damped frequency.
    workers : int, optional
        Thread count; defaults to ``OPTOMECH_THREADS`` or 1.  Output order
        does not depend on it.
    """
    if method not in ("auto", "numeric", "approximate"):
        raise DomainError(f"unknown pole method {method!r}")
    if spec is None:
        n_eff = planck_occupation(params.env, params.mech.damped_frequency)
    elif spec.is_flat:
        n_eff = spec.flat_value
    else:
        n_eff = effective_occupation(params.mech, spec)
    deltas = np.asarray(delta_grid, dtype=float)
    gcs = np.asarray(gamma_c_grid, dtype=float)
    points = [(d, g) for d in deltas for g in gcs]
    if workers is None:
        workers = int(os.environ.get("OPTOMECH_THREADS", "1") or 1)

    def run(pt):
        return _map_point(params, n_eff, pt[0], pt[1], method)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run, points))
    else:
        rows = [run(pt) for pt in points]
    cols = list(zip(*rows)) if rows else [()] * 6
    return CoolingMap(
        delta=np.array([p[0] for p in points]),
        gamma_c=np.array([p[1] for p in points]),
        cooling_factor=np.array(cols[0], dtype=float),
        n_rp=np.array(cols[1], dtype=float),
        n_th=np.array(cols[2], dtype=float),
        m_th=np.array(cols[3], dtype=float),
        stable=np.array(cols[4], dtype=bool),
        pole_method=np.array(cols[5], dtype=object),
        meta=params.describe() | {"n_eff": n_eff, "method": method},
    )
