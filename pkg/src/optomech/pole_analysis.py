"""Zeros of the characteristic polynomial: exact, approximate and numeric.

A stable operating point has four zeros ``nu_m, -conj(nu_m), nu_c, -conj(nu_c)``
with ``nu_m = omega_eff - i Gamma_m / 2`` (mechanical-like) and
``nu_c = Delta_eff - i Gamma_c / 2`` (cavity-like).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import (
    BranchConditionError,
    DegeneratePairingError,
    DomainError,
    NegativeSquaredFrequencyError,
    ValidityError,
)
from .optomech_linear import CharPoly, char_poly, effective_coupling
from .params import SystemParams


class PoleMethod(str, enum.Enum):
    EXACT_RESONANT = "exact"
    APPROXIMATE = "approximate"
    NUMERIC = "numeric"


@dataclass(frozen=True)
class PoleSet:
    """Effective damping rates and frequencies of the hybridised modes.

    Attributes
    ----------
    gamma_m, gamma_c : float
        Effective mechanical and cavity damping ``Gamma_m``, ``Gamma_c`` (rad/s).
    omega_eff, delta_eff : float
        Effective mechanical frequency and effective detuning (rad/s).
    method : PoleMethod
    branch : str or None
        Which closed-form branch produced the result, if any.
    report : dict
        Diagnostic values (validity conditions, discriminants...).
    """

    gamma_m: float
    gamma_c: float
    omega_eff: float
    delta_eff: float
    method: PoleMethod
    branch: str | None = None
    report: dict = field(default_factory=dict, compare=False)

    @property
    def nu_m(self) -> complex:
        return complex(self.omega_eff, -0.5 * self.gamma_m)

    @property
    def nu_c(self) -> complex:
        return complex(self.delta_eff, -0.5 * self.gamma_c)

    @property
    def roots(self) -> np.ndarray:
        m, c = self.nu_m, self.nu_c
        return np.array([m, -m.conjugate(), c, -c.conjugate()])

    @property
    def moduli_product(self) -> float:
        """``|nu_m|^2 |nu_c|^2``."""
        return abs(self.nu_m) ** 2 * abs(self.nu_c) ** 2

    def coefficients(self) -> np.ndarray:
        """Quartic coefficients (in ``nu``) of the factorised form."""
        hc, hm = 0.5j * self.gamma_c, 0.5j * self.gamma_m
        optical = np.array([1.0, 2 * hc, hc * hc - self.delta_eff**2])
        mechanical = np.array([1.0, 2 * hm, hm * hm - self.omega_eff**2])
        return np.polymul(optical, mechanical)


def _pair_roots(roots: np.ndarray, tol: float = 1e-8) -> list[complex]:
    """Group roots into ``{nu, -conj(nu)}`` pairs and return representatives with ``Re > 0``."""
    left = list(roots)
    scale = max(np.max(np.abs(roots)), 1e-300)
    reps = []
    while left:
        r = left.pop(0)
        target = -np.conj(r)
        dist = [abs(x - target) for x in left]
        if not dist:
            raise DegeneratePairingError("odd number of unpaired roots")
        j = int(np.argmin(dist))
        if dist[j] > tol * scale:
            raise DegeneratePairingError(
                f"root {r:.6e} has no reflected partner (closest misses by {dist[j] / scale:.2e} relative)"
            )
        partner = left.pop(j)
        rep = r if r.real > partner.real else partner
        if abs(rep.real) <= 1e-6 * scale:
            # a double root on the imaginary axis (e.g. Delta = 0) is a pair at zero frequency;
            # two distinct purely damped roots have no such representation
            if abs(r.imag - partner.imag) > 1e-6 * scale:
                raise DegeneratePairingError(
                    f"roots {r:.6e}, {partner:.6e} are purely damped (overdamped regime)"
                )
            rep = complex(0.0, rep.imag)
        reps.append(complex(rep.real, 0.5 * (r.imag + partner.imag)))
    return reps


def poles_numeric(cp: CharPoly) -> PoleSet:
    """Zeros of ``d`` from the companion-matrix root finder, paired and labelled.

    The pair whose decay rate is closer to ``gamma_m`` is called mechanical.
    When the two rates agree to ``1e-9`` relative (the resonant
    equal-damping regime) the lower frequency is called mechanical, the same
    convention as :func:`poles_exact_resonant`.

    Raises
    ------
    DegeneratePairingError
        If the roots do not form reflected pairs with nonzero real parts.
    """
    reps = _pair_roots(cp.roots())
    if len(reps) != 2:
        raise DegeneratePairingError("expected two root pairs")

    a, b = reps
    ra, rb = -2 * a.imag, -2 * b.imag
    if abs(ra - rb) <= 1e-9 * max(abs(ra), abs(rb)):
        mech, cav = sorted(reps, key=lambda r: r.real)
    else:
        mech, cav = sorted(reps, key=lambda r: abs(-2 * r.imag - cp.gamma_m))
    return PoleSet(
        gamma_m=-2 * mech.imag,
        gamma_c=-2 * cav.imag,
        omega_eff=mech.real,
        delta_eff=cav.real,
        method=PoleMethod.NUMERIC,
    )


def poles_exact_resonant(params: SystemParams, coupling: float,
                         detuning: float | None = None) -> PoleSet:
    """Closed-form zeros at ``Delta = omega``.

    Two branches exist.  Below the critical coupling, ``4 G^2 < (gc - gm)^2``,
    the damping rates differ and the frequencies coincide.  Above it, under
    the second set of conditions, the damping rates coincide at
    ``(gc + gm)/2`` and the frequencies split as ``sqrt(x_+)``, ``sqrt(x_-)``;
    the cavity-like label goes to ``sqrt(x_+)`` by convention.

    Raises
    ------
    DomainError
        If ``detuning`` is given and differs from ``omega``.
    BranchConditionError
        If neither branch applies, or ``gamma_c == gamma_m``.
    """
    mech = params.mech
    w, gm, gc = mech.damped_frequency, mech.damping, params.cavity.decay
    if detuning is not None and abs(detuning - w) > 1e-12 * w:
        raise DomainError("exact resonant poles need Delta equal to the damped frequency")
    if gc == gm:
        raise BranchConditionError("sign convention undefined for gamma_c == gamma_m")
    g2 = coupling**2
    diff2 = (gc - gm) ** 2
    half_sum = 0.5 * (gc + gm)
    if 4 * g2 < diff2:
        u2 = math.sqrt((w * w + diff2 / 16) ** 2 - g2 * w * w)
        eps = 1.0 if gc > gm else -1.0
        rad = 2 * u2 - 2 * w * w + diff2 / 8
        # rad is >= 0 in exact arithmetic; tiny negatives are rounding at the branch point
        root = math.sqrt(max(rad, 0.0))
        freq2 = 0.5 * (w * w + u2) - diff2 / 32
        if freq2 <= 0:
            raise BranchConditionError("effective frequency not real on the first branch")
        freq = math.sqrt(freq2)
        return PoleSet(half_sum - eps * root, half_sum + eps * root, freq, freq,
                       PoleMethod.EXACT_RESONANT, "distinct-damping",
                       {"u2": u2, "radicand": rad, "critical_ratio": diff2 / (4 * g2) if g2 else math.inf})
    lower = w * w * diff2 / 4
    upper = (w * w + diff2 / 16) ** 2
    if lower < g2 * w * w < upper and w * w > diff2 / 16:
        split = w * math.sqrt(g2 - diff2 / 4)
        base = w * w - diff2 / 16
        x_plus, x_minus = base + split, base - split
        return PoleSet(half_sum, half_sum, math.sqrt(x_minus), math.sqrt(x_plus),
                       PoleMethod.EXACT_RESONANT, "equal-damping",
                       {"x_plus": x_plus, "x_minus": x_minus, "critical_ratio": diff2 / (4 * g2)})
    raise BranchConditionError("coupling outside both resonant branches")


@dataclass(frozen=True)
class ApproxThresholds:
    """Limits for the weak-coupling approximation (all must hold)."""

    rate_ratio: float = 0.01
    chi: float = 0.05
    third: float = 0.05


def chi_factor(params: SystemParams, detuning: float, coupling: float) -> float:
    """Dimensionless optomechanical damping factor ``chi(Delta)``."""
    mech = params.mech
    w, gm, gc = mech.damped_frequency, mech.damping, params.cavity.decay
    h2 = 0.25 * (gc - gm) ** 2
    return coupling**2 * w * detuning / ((h2 + (detuning - w) ** 2) * (h2 + (detuning + w) ** 2))


def moduli_from_rates(params: SystemParams, detuning: float, gamma_m_eff: float,
                      gamma_c_eff: float) -> tuple[float, float]:
    """Squared effective frequencies ``(omega_eff^2, Delta_eff^2)`` from the damping rates.

    Exact consequence of matching the factorised polynomial, valid when the
    two rates differ.
    """
    mech = params.mech
    w, gm, gc = mech.damped_frequency, mech.damping, params.cavity.decay
    span = gamma_c_eff - gamma_m_eff
    if span == 0:
        raise ValidityError("equal effective damping rates: frequencies not determined")
    a = (gamma_c_eff - gm) / span
    b = (gc - gamma_c_eff) / span
    c = (gc - gamma_c_eff) * (gamma_c_eff - gm) / 4
    delta2 = a * detuning**2 - b * w * w - c
    omega2 = a * w * w - b * detuning**2 - c
    return omega2, delta2


def poles_approximate(params: SystemParams, detuning: float, coupling: float,
                      thresholds: ApproxThresholds = ApproxThresholds(),
                      check: bool = True) -> PoleSet:
    """Weak-coupling zeros: ``Gamma_m = gm + chi (gc - gm)``, ``Gamma_c = gc - chi (gc - gm)``.

    Frequencies then follow exactly from :func:`moduli_from_rates`.

    Raises
    ------
    ValidityError
        If a validity condition exceeds its threshold (only when ``check``).
    NegativeSquaredFrequencyError
        If a squared effective frequency is not positive.
    """
    mech = params.mech
    w, gm, gc = mech.damped_frequency, mech.damping, params.cavity.decay
    chi = chi_factor(params, detuning, coupling)
    third = abs(chi) * abs(1 - detuning**2 / w**2 - gc**2 / (4 * w**2))
    report = {"rate_ratio": gm / gc, "chi": chi, "third": third}
    if check:
        bad = [name for name, value, lim in (
            ("rate_ratio", gm / gc, thresholds.rate_ratio),
            ("chi", abs(chi), thresholds.chi),
            ("third", third, thresholds.third),
        ) if not value < lim]
        if bad:
            raise ValidityError(f"approximation invalid: {', '.join(bad)} above threshold ({report})")
    g_m = gm + chi * (gc - gm)
    g_c = gc - chi * (gc - gm)
    omega2, delta2 = moduli_from_rates(params, detuning, g_m, g_c)
    # Delta = 0 gives chi = 0 and the resonant double root Delta_eff = 0
    if omega2 <= 0 or delta2 < 0 or (delta2 == 0 and detuning != 0):
        raise NegativeSquaredFrequencyError(
            f"negative squared frequency (omega_eff^2={omega2:.3e}, Delta_eff^2={delta2:.3e})"
        )
    # self-consistency of the positivity requirements, reported not enforced
    r = 0.25 * (gc - gm) ** 2 / w**2
    report["consistency_1"] = detuning**2 / w**2 - chi / (1 - chi) - chi * (1 - 2 * chi) * r
    report["consistency_2"] = (1 - chi) - chi * (detuning**2 / w**2 + (1 - chi) * (1 - 2 * chi) * r)
    return PoleSet(g_m, g_c, math.sqrt(omega2), math.sqrt(delta2), PoleMethod.APPROXIMATE, None, report)


def pole_system_residuals(poles: PoleSet, cp: CharPoly) -> np.ndarray:
    """Relative residuals of the four matching conditions between ``poles`` and ``cp``."""
    gm, gc, dl = cp.gamma_m, cp.gamma_c, cp.detuning
    om2 = cp.bare_frequency**2
    c2 = gc * gc / 4 + dl * dl
    m2, n2 = abs(poles.nu_m) ** 2, abs(poles.nu_c) ** 2
    pairs = [
        (poles.gamma_m + poles.gamma_c, gc + gm),
        (poles.gamma_c * m2 + poles.gamma_m * n2, gc * om2 + gm * c2),
        (m2 + n2 + poles.gamma_m * poles.gamma_c, om2 + c2 + gc * gm),
        (m2 * n2, om2 * c2 - cp.coupling**2 * cp.damped_frequency * dl),
    ]
    return np.array([abs(lhs - rhs) / max(abs(rhs), 1e-300) for lhs, rhs in pairs])


def critical_cavity_decay(params: SystemParams) -> float:
    """Cavity decay ``gamma_c > gamma_m`` solving ``G^2 = (gamma_c - gamma_m)^2 / 4`` at ``Delta = omega``.

    ``G`` depends on ``gamma_c`` through the drive amplitude and the
    intracavity field, so the equation is solved by bracketing.
    """
    w, gm = params.mech.damped_frequency, params.mech.damping

    def excess(gc):
        return effective_coupling(params.with_cavity_decay(gc), w) ** 2 - 0.25 * (gc - gm) ** 2

    lo = gm * (1 + 1e-9)
    if excess(lo) <= 0:
        raise BranchConditionError("no critical cavity decay: coupling too weak")
    hi = max(2 * gm, w)
    while excess(hi) > 0:
        hi *= 2
        if hi > 1e30:
            raise BranchConditionError("critical cavity decay not bracketed")
    return brentq(excess, lo, hi, xtol=1e-12 * hi, rtol=4 * np.finfo(float).eps, maxiter=500)


def poles_auto(params: SystemParams, detuning: float, coupling: float) -> PoleSet:
    """Approximate poles where valid, numeric otherwise."""
    try:
        return poles_approximate(params, detuning, coupling)
    except ValidityError:
        return poles_numeric(char_poly(params, detuning, coupling))
