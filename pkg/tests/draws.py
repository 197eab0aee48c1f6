"""Seeded random operating points shared by the property tests."""

from __future__ import annotations

import math

import numpy as np

from optomech.bath_spectrum import FlatOccupation
from optomech.errors import DegeneratePairingError
from optomech.optomech_linear import operating_point
from optomech.params import CavityParams, LaserDrive, MechanicalParams, SystemParams, ThermalEnv
from optomech.pole_analysis import poles_numeric

OMEGA = 2 * math.pi * 1e7


def system(gamma_m: float, gamma_c: float, omega: float = OMEGA) -> SystemParams:
    """Parameter set with the mechanical scale of the canonical preset."""
    return SystemParams(
        mech=MechanicalParams(2.5e-10, omega, gamma_m),
        cavity=CavityParams(1.77e15, gamma_c, 5e-4),
        laser=LaserDrive(1.77e15, 0.05),
        env=ThermalEnv.zero_temperature(),
    )


def stable_flat_draws(n: int, seed: int):
    """Yield ``n`` stable operating points with well-separated root pairs.

    Rates and couplings are drawn log-uniformly relative to the mechanical
    frequency; the coupling is an explicit override so the whole stable
    region is reachable.
    """
    rng = np.random.default_rng(seed)
    found = 0
    while found < n:
        gm = OMEGA * 10 ** rng.uniform(-5, -1)
        gc = OMEGA * 10 ** rng.uniform(-1.3, 1.3)
        dl = OMEGA * rng.uniform(-3, 3)
        g = OMEGA * 10 ** rng.uniform(-3.5, -0.5)
        occ = 10 ** rng.uniform(-2, 3)
        p = system(gm, gc)
        op = operating_point(p, dl, FlatOccupation(occ), coupling=g)
        if not op.stable or op.stability.margin > 0.9:
            continue
        try:
            poles = poles_numeric(op.char_poly)
        except DegeneratePairingError:
            continue
        found += 1
        yield op, occ, poles
