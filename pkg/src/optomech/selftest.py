"""Cross-method consistency checks run by ``optomech selftest``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bath_spectrum import FlatOccupation
from .detection import (
    heterodyne_radiation,
    heterodyne_radiation_modulus,
    heterodyne_thermal,
    homodyne_coefficients,
    homodyne_from_coefficients,
    homodyne_radiation,
    homodyne_thermal,
)
from .energy_cooling import energy_quadrature, energy_residue
from .fluctuation_spectra import lyapunov_moments, moment_integrals
from .optomech_linear import effective_coupling, operating_point
from .params import SystemParams, preset_p0
from .pole_analysis import (
    critical_cavity_decay,
    pole_system_residuals,
    poles_exact_resonant,
    poles_numeric,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _rel(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)) / np.maximum(np.abs(np.asarray(b)), 1e-300)))


def _residue_vs_quadrature(params: SystemParams):
    w = params.mech.damped_frequency
    worst = 0.0
    for gc, dl in ((3e6, 0.4 * w), (3e6, 1.8 * w), (2e8, 0.6 * w)):
        op = operating_point(params.with_cavity_decay(gc), dl, FlatOccupation(4.0))
        a = energy_quadrature(op)
        b = energy_residue(op, 4.0, poles_numeric(op.char_poly))
        worst = max(worst, _rel(a.n_rp, b.n_rp), _rel(a.n_th, b.n_th), _rel(a.m_th, b.m_th))
    return worst < 1e-6, f"max relative deviation {worst:.2e}"


def _exact_vs_numeric(params: SystemParams):
    w = params.mech.damped_frequency
    gbar = critical_cavity_decay(params)
    worst = 0.0
    for factor in (0.3, 0.8, 1.2, 3.0):
        p = params.with_cavity_decay(gbar * factor)
        g = effective_coupling(p, w)
        op = operating_point(p, w, coupling=g)
        exact = poles_exact_resonant(p, g)
        numeric = poles_numeric(op.char_poly)
        a = sorted(abs(r) for r in exact.roots)
        b = sorted(abs(r) for r in numeric.roots)
        worst = max(worst, _rel(a, b), float(np.max(pole_system_residuals(exact, op.char_poly))))
    return worst < 1e-9, f"max relative deviation {worst:.2e}"


def _ef0(params: SystemParams):
    w = params.mech.damped_frequency
    op = operating_point(params, 0.7 * w, FlatOccupation(2.0))
    nu = np.linspace(-3 * w, 3 * w, 201)
    worst = 0.0
    for theta in (-1.0, 0.3, 2.2):
        e1, f1, _ = homodyne_coefficients(op, nu, theta)
        e2, f2, _ = homodyne_coefficients(op, -nu, theta)
        lhs = np.abs(e1) ** 2 - np.abs(e2) ** 2 + np.abs(f1) ** 2 - np.abs(f2) ** 2
        scale = np.abs(e1) ** 2 + np.abs(e2) ** 2 + np.abs(f1) ** 2 + np.abs(f2) ** 2
        worst = max(worst, float(np.max(np.abs(lhs) / scale)))
    return worst < 1e-10, f"max scaled residual {worst:.2e}"


def _homodyne_forms(params: SystemParams):
    w = params.mech.damped_frequency
    op = operating_point(params, 0.7 * w, FlatOccupation(2.0))
    nu = np.linspace(-3 * w, 3 * w, 201)
    worst = 0.0
    for theta in (-0.8, 0.0, 1.3):
        th, rp = homodyne_from_coefficients(op, None, nu, theta)
        worst = max(worst, _rel(homodyne_thermal(op, None, nu, theta), th), _rel(homodyne_radiation(op, nu, theta), rp))
    worst = max(worst, _rel(heterodyne_radiation(op, nu), heterodyne_radiation_modulus(op, nu)))
    return worst < 1e-10, f"max relative deviation {worst:.2e}"


def _sum_identity(params: SystemParams):
    w = params.mech.damped_frequency
    op = operating_point(params, 0.7 * w, FlatOccupation(2.0))
    nu = np.linspace(-3 * w, 3 * w, 201)

    def het(x):
        return np.asarray(heterodyne_thermal(op, None, x)) + np.asarray(heterodyne_radiation(op, x))

    def hom(x, th):
        return np.asarray(homodyne_thermal(op, None, x, th)) + np.asarray(homodyne_radiation(op, x, th))

    worst = 0.0
    for theta in (-0.8, 0.4):
        worst = max(worst, _rel(het(nu) + het(-nu), hom(nu, theta) + hom(nu, theta + math.pi / 2)))
    return worst < 1e-9, f"max relative deviation {worst:.2e}"


def _moments(params: SystemParams):
    w = params.mech.damped_frequency
    op = operating_point(params.with_cavity_decay(3e6), 0.5 * w, FlatOccupation(3.0))
    a, b = moment_integrals(op), lyapunov_moments(op)
    worst = max(_rel(a.q2, b.q2), _rel(a.p2, b.p2), _rel(a.qp_sym, b.qp_sym))
    return worst < 1e-7, f"max relative deviation {worst:.2e}"


CHECKS: dict[str, Callable[[SystemParams], tuple[bool, str]]] = {
    "residue-vs-quadrature": _residue_vs_quadrature,
    "exact-vs-numeric-poles": _exact_vs_numeric,
    "ef0-identity": _ef0,
    "homodyne-heterodyne-forms": _homodyne_forms,
    "heterodyne-homodyne-sum": _sum_identity,
    "moments-vs-lyapunov": _moments,
}


def run_selftest(params: SystemParams | None = None) -> list[CheckResult]:
    """Run every check; exceptions count as failures."""
    params = preset_p0() if params is None else params
    out = []
    for name, check in CHECKS.items():
        try:
            ok, detail = check(params)
        except Exception as exc:  # a crash is a failed check, not a crashed selftest
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(name, bool(ok), detail))
    return out
