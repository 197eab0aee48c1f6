"""Homodyne and heterodyne spectra of the light leaving the cavity.

Frequencies ``nu`` are measured from the laser frequency ``omega_0``; the
heterodyne local-oscillator frequency is ``mu = omega_0 + nu``.  Spectra are
in shot-noise units, so pure vacuum gives 1.  Elastic (delta-like) parts are
returned as weights, never sampled.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.signal import find_peaks

from .bath_spectrum import OccupationSpectrum
from .errors import DomainError
from .fluctuation_spectra import _require_stable, sq_rp, sq_th
from .optomech_linear import OperatingPoint


def _cavity(op: OperatingPoint, nu):
    """``gc/2 + i (nu - Delta)``."""
    return 0.5 * op.gamma_c + 1j * (nu - op.detuning)


def homodyne_coefficients(op: OperatingPoint, nu, theta: float):
    """Output-field coefficients ``(E_th, E_em, L)`` at ``(nu, theta)``.

    ``E_th`` multiplies the thermal input and ``E_em`` the optical vacuum
    input in the homodyne current; ``L(-nu) = conj(L(nu))``.
    """
    nu = np.asarray(nu, dtype=float)
    w, gm, gc, dl, g = op.damped_frequency, op.gamma_m, op.gamma_c, op.detuning, op.coupling
    big_l = (dl * math.sin(theta) + (0.5 * gc + 1j * nu) * math.cos(theta)) / op.char_poly(-nu)
    e_th = -g * math.sqrt(gm * gc) * (0.5 * gm + 1j * (nu + w)) * big_l
    cav = _cavity(op, nu)
    e_em = -np.conj(cav) / cav + 1j * w * gc * g * g * np.exp(1j * theta) * big_l / cav
    return e_th, e_em, big_l


def _shape(nu, out):
    return float(out) if np.ndim(nu) == 0 else out


def _signal_factor(op: OperatingPoint, nu, theta):
    """Common prefactor that maps ``S_q`` onto the homodyne current."""
    w, gc, dl = op.damped_frequency, op.gamma_c, op.detuning
    h2 = gc * gc / 4
    c, s = math.cos(theta), math.sin(theta)
    num = (0.5 * gc * c + dl * s) ** 2 + (nu * c) ** 2
    return 2 * gc * w * op.coupling**2 * num / (op.bare_frequency * (h2 + (dl - nu) ** 2) * (h2 + (dl + nu) ** 2))


def homodyne_thermal(op: OperatingPoint, spec: OccupationSpectrum | None, nu, theta: float):
    """Thermal part of the inelastic homodyne spectrum."""
    _require_stable(op)
    nu = np.asarray(nu, dtype=float)
    return _shape(nu, _signal_factor(op, nu, theta) * np.asarray(sq_th(op, spec, nu)))


def homodyne_radiation(op: OperatingPoint, nu, theta: float):
    """Shot noise plus radiation-pressure part, interference term included."""
    _require_stable(op)
    nu = np.asarray(nu, dtype=float)
    w, gc, dl, g2 = op.damped_frequency, op.gamma_c, op.detuning, op.coupling**2
    h2 = gc * gc / 4
    signal = _signal_factor(op, nu, theta) * np.asarray(sq_rp(op, None, nu))
    numer = (h2 + nu * nu - dl * dl) * math.sin(2 * theta) - dl * (gc * math.cos(2 * theta) - 2j * nu)
    denom = op.char_poly(nu) * (h2 + (dl - nu) ** 2) * (h2 + (dl + nu) ** 2)
    interference = gc * w * g2 * np.real(numer / denom * (h2 - nu * nu + dl * dl - 1j * gc * nu))
    return _shape(nu, 1.0 + signal + interference)


def homodyne_from_coefficients(op: OperatingPoint, spec: OccupationSpectrum | None, nu, theta: float):
    """``(s_th, s_rp)`` assembled from ``|E_th|^2`` and ``|E_em|^2``; an independent path."""
    occ = op.occupation if spec is None else spec
    nu = np.asarray(nu, dtype=float)
    ep, fp, _ = homodyne_coefficients(op, nu, theta)
    em, fm, _ = homodyne_coefficients(op, -nu, theta)
    s_th = np.abs(ep) ** 2 * (occ(nu) + 0.5) + np.abs(em) ** 2 * (occ(-nu) + 0.5)
    s_rp = 0.5 * (np.abs(fp) ** 2 + np.abs(fm) ** 2)
    return _shape(nu, s_th), _shape(nu, s_rp)


def elastic_weight_homodyne(op: OperatingPoint, theta: float) -> float:
    """Coefficient of ``delta(nu)`` in the homodyne spectrum, ``8 pi gc |zeta|^2 sin^2 theta``."""
    return 8 * math.pi * op.gamma_c * abs(op.cavity_amp) ** 2 * math.sin(theta) ** 2


@dataclass
class HomodyneResult:
    """Homodyne spectrum sampled on a grid.

    Attributes
    ----------
    theta : float
        Quadrature angle in rad, used as given.
    grid : ndarray
    elastic_weight : float
        Weight of the ``delta(nu)`` line.
    s_th, s_rp : ndarray
    meta : dict
    """

    theta: float
    grid: np.ndarray
    elastic_weight: float
    s_th: np.ndarray
    s_rp: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def s_inel(self) -> np.ndarray:
        return self.s_th + self.s_rp

    def to_csv(self, target=None) -> str:
        return _write_csv(target, "nu_rad_s", self.grid, self.s_th, self.s_rp, self.s_inel,
                          {"theta_rad": self.theta, "elastic_weight": self.elastic_weight}, self.meta)


def _plain(value) -> str:
    return repr(float(value)) if isinstance(value, (int, float, np.floating)) else str(value)


def _write_csv(target, index, grid, s_th, s_rp, s_inel, elastic: dict, meta: dict) -> str:
    buf = io.StringIO()
    buf.write("# elastic: " + ";".join(f"{k}={_plain(v)}" for k, v in elastic.items()) + "\n")
    if meta:
        buf.write("# params: " + ";".join(f"{k}={v}" for k, v in meta.items()) + "\n")
    buf.write(f"{index},s_th,s_rp,s_inel\n")
    np.savetxt(buf, np.column_stack([grid, s_th, s_rp, s_inel]), fmt="%.12e", delimiter=",")
    text = buf.getvalue()
    if target is not None:
        if hasattr(target, "write"):
            target.write(text)
        else:
            Path(target).write_text(text)
    return text


def homodyne_spectrum(op: OperatingPoint, spec: OccupationSpectrum | None, theta: float,
                      grid, *, cross_check: bool = True, tol: float = 1e-10) -> HomodyneResult:
    """Inelastic homodyne spectrum on ``grid`` plus the elastic weight.

    With ``cross_check`` the closed forms are compared with the coefficient
    assembly at every point and a ``RuntimeError`` is raised if they differ
    by more than ``tol`` relative.
    """
    _require_stable(op)
    grid = np.asarray(grid, dtype=float)
    s_th = np.asarray(homodyne_thermal(op, spec, grid, theta), dtype=float)
    s_rp = np.asarray(homodyne_radiation(op, grid, theta), dtype=float)
    if cross_check:
        c_th, c_rp = homodyne_from_coefficients(op, spec, grid, theta)
        scale = np.maximum(np.abs(s_th + s_rp), 1.0)
        err = np.max(np.abs(s_th - c_th) / scale, initial=0.0) + np.max(np.abs(s_rp - c_rp) / scale, initial=0.0)
        if err > tol:
            raise RuntimeError(f"homodyne closed form and coefficient assembly differ by {err:.3e}")
    meta = op.params.describe() | {"detuning_rad_s": op.detuning, "coupling_rad_s": op.coupling}
    return HomodyneResult(theta, grid, elastic_weight_homodyne(op, theta), s_th, s_rp, meta)


def squeezing_scan(op: OperatingPoint, spec: OccupationSpectrum | None, theta: float, grid):
    """Grid points where the inelastic homodyne spectrum is below shot noise.

    Returns
    -------
    list of (float, float)
        ``(nu, s_inel)`` pairs with ``s_inel < 1``.
    """
    res = homodyne_spectrum(op, spec, theta, grid, cross_check=False)
    below = res.s_inel < 1
    return [(float(x), float(s)) for x, s in zip(res.grid[below], res.s_inel[below])]


def heterodyne_thermal(op: OperatingPoint, spec: OccupationSpectrum | None, nu):
    """Thermal heterodyne part at ``mu = omega_0 + nu``."""
    _require_stable(op)
    nu = np.asarray(nu, dtype=float)
    gc, dl = op.gamma_c, op.detuning
    factor = gc * op.damped_frequency * op.coupling**2 / (op.bare_frequency * (gc * gc / 4 + (nu - dl) ** 2))
    return _shape(nu, factor * np.asarray(sq_th(op, spec, nu)))


def heterodyne_radiation(op: OperatingPoint, nu):
    """Shot noise plus radiation-pressure heterodyne part, with interference term."""
    _require_stable(op)
    nu = np.asarray(nu, dtype=float)
    w, gc, dl, g2 = op.damped_frequency, op.gamma_c, op.detuning, op.coupling**2
    factor = gc * w * g2 / (op.bare_frequency * (gc * gc / 4 + (nu - dl) ** 2))
    ratio = (0.5 * gc - 1j * (nu + dl)) / _cavity(op, nu)
    interference = -np.imag(gc * w * g2 / op.char_poly(nu) * ratio)
    return _shape(nu, 1.0 + factor * np.asarray(sq_rp(op, None, nu)) + interference)


def heterodyne_radiation_modulus(op: OperatingPoint, nu):
    """Same quantity written as a squared modulus plus a positive term."""
    nu = np.asarray(nu, dtype=float)
    w, gc, dl, g2 = op.damped_frequency, op.gamma_c, op.detuning, op.coupling**2
    d = op.char_poly(nu)
    ratio = (0.5 * gc - 1j * (nu + dl)) / _cavity(op, nu)
    out = np.abs(1 + 1j * w * gc * g2 / (2 * d) * ratio) ** 2 + (w * gc * g2) ** 2 / (4 * np.abs(d) ** 2)
    return _shape(nu, out)


def elastic_weight_heterodyne(op: OperatingPoint) -> float:
    """Weight ``4 pi gc |zeta|^2`` of ``delta(mu - omega_0)`` for a vanishing bandwidth."""
    return 4 * math.pi * op.gamma_c * abs(op.cavity_amp) ** 2


def heterodyne_elastic_lineshape(op: OperatingPoint, nu, kappa: float):
    """Elastic line ``2 kappa gc |zeta|^2 / (kappa^2/4 + nu^2)`` for detector bandwidth ``kappa``.

    The factor 2 is the time average of ``(2 Re z)^2 = 2 |z|^2``; with it the
    line integrates to :func:`elastic_weight_heterodyne` for every ``kappa``.
    """
    if not kappa > 0:
        raise DomainError("detector bandwidth must be positive")
    nu = np.asarray(nu, dtype=float)
    return _shape(nu, 2 * kappa * op.gamma_c * abs(op.cavity_amp) ** 2 / (kappa * kappa / 4 + nu * nu))


@dataclass
class HeterodyneResult:
    """Heterodyne power spectrum against ``mu``.

    Attributes
    ----------
    kappa : float or None
        Detector bandwidth (rad/s); ``None`` is the vanishing-bandwidth limit
        where the elastic part is a pure delta of weight ``elastic_weight``.
    laser_frequency : float
    grid : ndarray
        Local-oscillator frequencies ``mu`` (rad/s).
    sigma_th, sigma_rp : ndarray
    sigma_el : ndarray or None
        Elastic lineshape on the grid for finite ``kappa``.
    """

    kappa: float | None
    laser_frequency: float
    grid: np.ndarray
    elastic_weight: float
    sigma_th: np.ndarray
    sigma_rp: np.ndarray
    sigma_el: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    @property
    def offsets(self) -> np.ndarray:
        """``nu = mu - omega_0``."""
        return self.grid - self.laser_frequency

    @property
    def sigma_inel(self) -> np.ndarray:
        return self.sigma_th + self.sigma_rp

    def to_csv(self, target=None) -> str:
        return _write_csv(target, "mu_rad_s", self.grid, self.sigma_th, self.sigma_rp, self.sigma_inel,
                          {"elastic_weight": self.elastic_weight, "kappa_rad_s": self.kappa,
                           "laser_rad_s": self.laser_frequency}, self.meta)


def heterodyne_spectrum(op: OperatingPoint, spec: OccupationSpectrum | None, laser_frequency: float | None,
                        grid, kappa: float | None = None, *, offsets: bool = False,
                        cross_check: bool = True, tol: float = 1e-10) -> HeterodyneResult:
    """Heterodyne power spectrum.

    Parameters
    ----------
    laser_frequency : float or None
        ``omega_0``; ``None`` takes the drive frequency of ``op``.
    grid : array_like
        Local-oscillator frequencies ``mu``, or offsets ``mu - omega_0`` when
        ``offsets`` is true.
    kappa : float, optional
        Detector bandwidth; only the elastic lineshape depends on it.
    cross_check : bool
        Compare the two forms of the radiation-pressure part to ``tol``.
    """
    _require_stable(op)
    w0 = op.params.laser.frequency if laser_frequency is None else float(laser_frequency)
    grid = np.asarray(grid, dtype=float)
    nu = grid if offsets else grid - w0
    mu = nu + w0
    s_th = np.asarray(heterodyne_thermal(op, spec, nu), dtype=float)
    s_rp = np.asarray(heterodyne_radiation(op, nu), dtype=float)
    if cross_check:
        alt = np.asarray(heterodyne_radiation_modulus(op, nu))
        err = np.max(np.abs(alt - s_rp) / np.maximum(np.abs(alt), 1.0), initial=0.0)
        if err > tol:
            raise RuntimeError(f"heterodyne radiation forms differ by {err:.3e}")
    el = None if kappa is None else np.asarray(heterodyne_elastic_lineshape(op, nu, kappa))
    meta = op.params.describe() | {"detuning_rad_s": op.detuning, "coupling_rad_s": op.coupling}
    return HeterodyneResult(kappa, w0, mu, elastic_weight_heterodyne(op), s_th, s_rp, el, meta)


def count_peaks(values, rel_prominence: float = 0.01) -> int:
    """Number of local maxima with prominence above ``rel_prominence`` of the maximum."""
    values = np.asarray(values, dtype=float)
    peaks, _ = find_peaks(values, prominence=rel_prominence * np.max(values))
    return len(peaks)
