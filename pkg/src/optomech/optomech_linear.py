"""Linearised optomechanical operating point.

The state vector is ``w = (q_hat, p_hat, X, Y)``: mechanical position and
momentum scaled by their zero-point sizes (``q = sqrt(hbar/(m Omega)) q_hat``,
``p = sqrt(m hbar Omega) p_hat``) and the two quadratures of the cavity
field fluctuation in the frame rotating with the laser.  Fluctuations obey
``dw = A w dt - dQ`` with a real drift matrix ``A``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bath_spectrum import FlatOccupation, OccupationSpectrum
from .errors import DomainError
from .numerics import roots_quartic
from .params import HBAR, SystemParams, planck_occupation


@dataclass(frozen=True)
class DetuningRoot:
    """One real solution of the static self-consistency condition."""

    detuning: float
    primary: bool
    stable: bool


@dataclass(frozen=True)
class StabilityReport:
    """Routh-Hurwitz verdict with the ratio of the two sides of the criterion.

    ``margin = lhs / rhs``; the operating point is stable when ``margin < 1``.
    """

    stable: bool
    margin: float
    lhs: float
    rhs: float
    criterion: str

    def __bool__(self):
        return self.stable


@dataclass(frozen=True)
class CharPoly:
    """Characteristic polynomial ``d(nu) = det(A + i nu)`` of the drift matrix.

    ``d(nu) = [(nu + i gc/2)^2 - Delta^2] [(nu + i gm/2)^2 - omega^2] - G^2 omega Delta``.
    """

    bare_frequency: float
    damped_frequency: float
    gamma_m: float
    gamma_c: float
    detuning: float
    coupling: float

    def __call__(self, nu):
        nu = np.asarray(nu, dtype=complex)
        hc, hm = 0.5j * self.gamma_c, 0.5j * self.gamma_m
        w, dl = self.damped_frequency, self.detuning
        optical = (nu + hc - dl) * (nu + hc + dl)
        mechanical = (nu + hm - w) * (nu + hm + w)
        out = optical * mechanical - self.coupling**2 * w * dl
        return complex(out) if out.ndim == 0 else out

    @property
    def coefficients(self) -> np.ndarray:
        """Quartic coefficients in ``nu``, highest power first."""
        hc, hm = 0.5j * self.gamma_c, 0.5j * self.gamma_m
        optical = np.array([1.0, 2 * hc, hc * hc - self.detuning**2])
        mechanical = np.array([1.0, 2 * hm, hm * hm - self.damped_frequency**2])
        out = np.polymul(optical, mechanical).astype(complex)
        out[-1] -= self.coupling**2 * self.damped_frequency * self.detuning
        return out

    @property
    def drift_coefficients(self) -> np.ndarray:
        """Real coefficients of ``det(lam - A)``, highest power first; ``d(nu)`` at ``nu = i lam``."""
        gc, gm, dl, w = self.gamma_c, self.gamma_m, self.detuning, self.damped_frequency
        om2 = self.bare_frequency**2
        c2 = gc * gc / 4 + dl * dl
        return np.array([
            1.0,
            gc + gm,
            c2 + om2 + gc * gm,
            gc * om2 + gm * c2,
            om2 * c2 - self.coupling**2 * w * dl,
        ])

    def roots(self) -> np.ndarray:
        """The four zeros in ``nu``, from the real drift polynomial (exact reflection pairs)."""
        return 1j * roots_quartic(self.drift_coefficients)


@dataclass(frozen=True)
class OperatingPoint:
    """Linearisation data for one laser setting.

    Attributes
    ----------
    params : SystemParams
    detuning : float
        Effective detuning ``Delta`` (rad/s), including the static shift.
    cavity_amp : complex
        Mean intracavity amplitude ``zeta``.
    coupling : float
        Effective linear coupling ``G`` (rad/s).
    mean_q_shift : float
        Static mirror displacement (m).
    dyn_matrix : ndarray
        4x4 drift matrix ``A`` (rad/s).
    noise_matrix : ndarray or None
        Diffusion matrix for the Lyapunov equation; ``None`` for structured
        (non-flat) occupation spectra, which only have a frequency-domain
        description.
    occupation : OccupationSpectrum
        Bath occupation used for ``noise_matrix`` and as default elsewhere.
    stability : StabilityReport
    """

    params: SystemParams
    detuning: float
    cavity_amp: complex
    coupling: float
    mean_q_shift: float
    dyn_matrix: np.ndarray = field(repr=False)
    noise_matrix: np.ndarray | None = field(repr=False)
    occupation: OccupationSpectrum
    stability: StabilityReport

    @property
    def stable(self) -> bool:
        return self.stability.stable

    @property
    def mech(self):
        return self.params.mech

    @property
    def bare_frequency(self) -> float:
        return self.params.mech.bare_frequency

    @property
    def damped_frequency(self) -> float:
        return self.params.mech.damped_frequency

    @property
    def gamma_m(self) -> float:
        return self.params.mech.damping

    @property
    def gamma_c(self) -> float:
        return self.params.cavity.decay

    @property
    def char_poly(self) -> CharPoly:
        return CharPoly(self.bare_frequency, self.damped_frequency, self.gamma_m,
                        self.gamma_c, self.detuning, self.coupling)

    def with_occupation(self, occupation: OccupationSpectrum) -> "OperatingPoint":
        return operating_point(self.params, self.detuning, occupation, coupling=self.coupling)


def cavity_amplitude(params: SystemParams, detuning: float) -> complex:
    """Mean intracavity amplitude ``-i E / (gamma_c/2 + i Delta)``."""
    return -1j * params.drive_amplitude / complex(0.5 * params.cavity.decay, detuning)


def effective_coupling(params: SystemParams, detuning: float) -> float:
    """``G = g0 |zeta| sqrt(2 hbar / (m omega))`` in rad/s."""
    mech = params.mech
    zeta2 = params.drive_amplitude**2 / (0.25 * params.cavity.decay**2 + detuning**2)
    return params.cavity.g0 * math.sqrt(zeta2 * 2 * HBAR / (mech.mass * mech.damped_frequency))


def _real_cubic_roots(b: float, c: float, d: float) -> list[float]:
    """Real roots of ``x^3 + b x^2 + c x + d`` by Cardano's formulas plus Newton polish."""
    shift = b / 3.0
    p = c - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc > 0:
        s = math.sqrt(disc)
        roots = [math.copysign(abs(-q / 2 + s) ** (1 / 3), -q / 2 + s)
                 + math.copysign(abs(-q / 2 - s) ** (1 / 3), -q / 2 - s)]
    elif p == 0:
        roots = [0.0]
    else:
        r = 2.0 * math.sqrt(-p / 3.0)
        arg = max(-1.0, min(1.0, 3.0 * q / (p * r)))
        phi = math.acos(arg) / 3.0
        roots = [r * math.cos(phi - 2.0 * math.pi * k / 3.0) for k in range(3)]
    polished = []
    for t in roots:
        x = t - shift
        for _ in range(4):
            f = ((x + b) * x + c) * x + d
            df = (3 * x + 2 * b) * x + c
            if df == 0:
                break
            step = f / df
            if abs(((x - step + b) * (x - step) + c) * (x - step) + d) >= abs(f):
                break
            x -= step
        polished.append(x)
    return sorted(polished)


def self_consistent_detuning(params: SystemParams, bare_detuning: float | None = None,
                             steps: int = 200) -> list[DetuningRoot]:
    """Real solutions ``Delta`` of ``m Omega^2 (Delta - Delta0)(gc^2/4 + Delta^2) + hbar g0^2 E^2 = 0``.

    Parameters
    ----------
    params : SystemParams
    bare_detuning : float, optional
        ``Delta0``; defaults to ``omega_c - omega_0``.
    steps : int
        Number of continuation steps used to identify the primary root.

    Returns
    -------
    list of DetuningRoot
        Sorted by detuning.  The primary root is the one reached by following
        ``Delta0`` continuously while the drive power is ramped up from zero.
    """
    d0 = params.bare_detuning if bare_detuning is None else float(bare_detuning)
    mech, cav = params.mech, params.cavity
    c2 = 0.25 * cav.decay**2
    kappa = HBAR * cav.g0**2 * params.drive_amplitude**2 / (mech.mass * mech.bare_frequency**2)
    scale = max(abs(d0), math.sqrt(c2), abs(kappa) ** (1 / 3)) or 1.0

    def roots_for(k):
        # x = Delta / scale; x^3 - x0 x^2 + c x - x0 c + k = 0 in scaled units
        x0, cs, ks = d0 / scale, c2 / scale**2, k / scale**3
        return [r * scale for r in _real_cubic_roots(-x0, cs, -x0 * cs + ks)]

    current = d0
    for j in range(1, steps + 1):
        cands = roots_for(kappa * j / steps)
        current = min(cands, key=lambda r: abs(r - current))
    final = roots_for(kappa)
    primary = min(range(len(final)), key=lambda i: abs(final[i] - current))
    out = []
    for i, r in enumerate(final):
        g = effective_coupling(params, r)
        out.append(DetuningRoot(r, i == primary, stability(params, r, g).stable))
    return out


def stability(params: SystemParams, detuning: float, coupling: float) -> StabilityReport:
    """Routh-Hurwitz stability of the linearised dynamics.

    For ``Delta > 0`` the condition is ``G^2 omega Delta < Omega^2 (gc^2/4 + Delta^2)``;
    for ``Delta < 0`` it involves both damping rates; ``Delta = 0`` is always stable.
    """
    mech = params.mech
    gm, gc = mech.damping, params.cavity.decay
    om2, w = mech.bare_frequency**2, mech.damped_frequency
    c2 = 0.25 * gc * gc + detuning * detuning
    lhs = coupling**2 * w * abs(detuning)
    if detuning > 0:
        rhs = om2 * c2
        crit = "red-detuned"
    elif detuning < 0:
        rhs = gc * gm / (gc + gm) * (gc * om2 + gm * c2 + (om2 - c2) ** 2 / (gm + gc))
        crit = "blue-detuned"
    else:
        return StabilityReport(True, 0.0, 0.0, math.inf, "resonant")
    return StabilityReport(bool(lhs < rhs), lhs / rhs, lhs, rhs, crit)


def char_poly(params: SystemParams, detuning: float, coupling: float) -> CharPoly:
    """Characteristic polynomial of the drift matrix at ``(Delta, G)``."""
    mech = params.mech
    return CharPoly(mech.bare_frequency, mech.damped_frequency, mech.damping,
                    params.cavity.decay, detuning, coupling)


def drift_matrix(params: SystemParams, detuning: float, coupling: float) -> np.ndarray:
    """Drift matrix ``A`` for the hatted state ``(q, p, X, Y)``."""
    mech = params.mech
    om, w, gm = mech.bare_frequency, mech.damped_frequency, mech.damping
    hc = 0.5 * params.cavity.decay
    k = coupling * math.sqrt(w / om)
    return np.array([
        [0.0, om, 0.0, 0.0],
        [-om, -gm, k, 0.0],
        [0.0, 0.0, -hc, detuning],
        [k, 0.0, -detuning, -hc],
    ])


def diffusion_matrix(params: SystemParams, occupation: float) -> np.ndarray:
    """Diffusion matrix of the hatted noise for a flat occupation ``N``.

    Thermal block ``(2N+1) [[c, -gm^2/(4 omega)], [-gm^2/(4 omega), c]]`` with
    ``c = gm Omega / (2 omega)``; vacuum optical block ``(gc/2) I``.
    See ``docs/noise_matrix.md`` for the derivation.
    """
    if not occupation >= 0:
        raise DomainError("occupation must be nonnegative")
    mech = params.mech
    om, w, gm = mech.bare_frequency, mech.damped_frequency, mech.damping
    k = 2 * occupation + 1
    diag = k * gm * om / (2 * w)
    off = -k * gm * gm / (4 * w)
    hc = 0.5 * params.cavity.decay
    return np.array([
        [diag, off, 0.0, 0.0],
        [off, diag, 0.0, 0.0],
        [0.0, 0.0, hc, 0.0],
        [0.0, 0.0, 0.0, hc],
    ])


def operating_point(params: SystemParams, detuning: float,
                    occupation: OccupationSpectrum | None = None,
                    *, coupling: float | None = None) -> OperatingPoint:
    """Build the linearisation at effective detuning ``Delta``.

    Parameters
    ----------
    params : SystemParams
    detuning : float
        Effective detuning, e.g. from :func:`self_consistent_detuning`, or a
        user choice.
    occupation : OccupationSpectrum, optional
        Defaults to a flat spectrum at the Planck occupation of the damped
        frequency.
    coupling : float, optional
        Override of ``G``; by default computed from the drive.
    """
    detuning = float(detuning)
    mech = params.mech
    if occupation is None:
        occupation = FlatOccupation(planck_occupation(params.env, mech.damped_frequency))
    zeta = cavity_amplitude(params, detuning)
    g = effective_coupling(params, detuning) if coupling is None else float(coupling)
    shift = HBAR * params.cavity.g0 * abs(zeta) ** 2 / (mech.mass * mech.bare_frequency**2)
    noise = diffusion_matrix(params, occupation.flat_value) if occupation.is_flat else None
    return OperatingPoint(
        params=params,
        detuning=detuning,
        cavity_amp=zeta,
        coupling=g,
        mean_q_shift=shift,
        dyn_matrix=drift_matrix(params, detuning, g),
        noise_matrix=noise,
        occupation=occupation,
        stability=stability(params, detuning, g),
    )
