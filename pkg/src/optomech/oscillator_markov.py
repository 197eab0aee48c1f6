"""Closed forms for a lone damped oscillator in a Markovian thermal bath.

Only scalar consequences of the master equation are provided: diffusion
coefficients, the positivity slack of the dissipator and the stationary
second moments.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError
from .params import HBAR, MechanicalParams


@dataclass(frozen=True)
class DiffusionCoefficients:
    """Diffusion coefficients of the position/momentum master equation.

    Attributes
    ----------
    d_qq : float
        Units 1/(kg s) (multiplies ``hbar`` to give m^2/s).
    d_pp : float
        Units kg/s^3; ``hbar * d_pp`` is in kg^2 m^2 s^-3.
    d_qp : float
        Units 1/s^2 (same as ``gamma_m**2 / omega``).
    damping : float
        ``gamma_m`` in rad/s, kept for the positivity slack.
    """

    d_qq: float
    d_pp: float
    d_qp: float
    damping: float

    @property
    def lindblad_slack(self) -> float:
        """``d_qq d_pp - d_qp**2 - (gamma_m/2)**2``; nonnegative iff the generator is completely positive."""
        return self.d_qq * self.d_pp - self.d_qp**2 - (self.damping / 2) ** 2


@dataclass(frozen=True)
class EquilibriumMoments:
    """Second moments of position and momentum.

    Attributes
    ----------
    q2 : float
        Position variance ``<q^2> - <q>^2`` in m^2.
    p2 : float
        ``<p^2>`` in kg^2 m^2 s^-2.
    qp_sym : float
        Symmetrised correlation ``<{q, p}>/2`` in J s.
    mean_q, mean_p : float
        First moments (m and kg m/s).
    """

    q2: float
    p2: float
    qp_sym: float
    mean_q: float = 0.0
    mean_p: float = 0.0

    @property
    def uncertainty_product(self) -> float:
        """``q2 p2 - qp_sym**2``, bounded below by ``hbar**2 / 4``."""
        return self.q2 * self.p2 - self.qp_sym**2


def _check_occupation(occupation: float) -> float:
    occupation = float(occupation)
    if not occupation >= 0:
        raise DomainError(f"occupation must be nonnegative, got {occupation!r}")
    return occupation


def diffusion_coefficients(mech: MechanicalParams, occupation: float) -> DiffusionCoefficients:
    """Diffusion coefficients for a bath with ``occupation`` quanta at the damped frequency.

    Examples
    --------
    At zero occupation the positivity slack vanishes:

    >>> from optomech.params import MechanicalParams
    >>> dc = diffusion_coefficients(MechanicalParams(1.0, 1.0, 0.1), 0.0)
    >>> abs(dc.lindblad_slack) < 1e-15
    True
    """
    n = _check_occupation(occupation)
    gm, om, w, m = mech.damping, mech.bare_frequency, mech.damped_frequency, mech.mass
    k = 2 * n + 1
    return DiffusionCoefficients(
        d_qq=gm * k / (2 * m * w),
        d_pp=gm * m * om**2 * k / (2 * w),
        d_qp=gm**2 * k / (4 * w),
        damping=gm,
    )


def equilibrium_moments(mech: MechanicalParams, occupation: float) -> EquilibriumMoments:
    """Stationary moments of the damped oscillator; the means vanish."""
    n = _check_occupation(occupation)
    gm, om, w, m = mech.damping, mech.bare_frequency, mech.damped_frequency, mech.mass
    k = 2 * n + 1
    return EquilibriumMoments(
        q2=HBAR * k / (2 * m * w),
        p2=m * HBAR * om**2 * k / (2 * w),
        qp_sym=-HBAR * gm * k / (4 * w),
    )


def mean_mechanical_energy_eq(mech: MechanicalParams, occupation: float) -> float:
    """Mean of ``p^2/2m + m Omega^2 q^2/2 + gamma_m {q,p}/4`` at equilibrium (J).

    The three pieces add up to ``hbar omega (N + 1/2)``; the anticommutator
    term is negative.
    """
    mom = equilibrium_moments(mech, occupation)
    kinetic = mom.p2 / (2 * mech.mass)
    potential = 0.5 * mech.mass * mech.bare_frequency**2 * mom.q2
    cross = 0.5 * mech.damping * mom.qp_sym
    return kinetic + potential + cross
