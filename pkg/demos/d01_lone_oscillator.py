"""
A damped oscillator in a thermal bath
=====================================

Stationary moments of a single damped mode, the Markov diffusion
coefficients, and what happens when the bath occupation depends on frequency.
"""

# %%
# The preset mechanical mode: 10 MHz, quality factor 1e5, room temperature.
import numpy as np

from optomech.bath_spectrum import FlatOccupation, OhmicMatchedOccupation, effective_occupation
from optomech.oscillator_markov import diffusion_coefficients, equilibrium_moments
from optomech.params import HBAR, K_B, planck_occupation, preset_p0

params = preset_p0()
mech = params.mech
n = planck_occupation(params.env, mech.damped_frequency)
print(f"damped frequency {mech.damped_frequency:.6e} rad/s, occupation {n:.1f}")

# %%
# Equal sharing of energy between the two quadratures, and an uncertainty
# product far above the ground-state bound.
mom = equilibrium_moments(mech, n)
kinetic = mom.p2 / (2 * mech.mass)
potential = 0.5 * mech.mass * mech.bare_frequency**2 * mom.q2
print(f"kinetic / potential = {kinetic / potential:.15f}")
print(f"uncertainty product / (hbar^2/4) = {mom.uncertainty_product / (HBAR**2 / 4):.3e}")
print(f"energy / k_B T = {(kinetic + potential) / (K_B * params.env.temperature):.6f}")

# %%
# The diffusion coefficients keep the reduced state positive; the slack in
# the positivity condition grows with occupation and vanishes (up to
# rounding) in the ground state.
for occ in (0.0, 1.0, n):
    dc = diffusion_coefficients(mech, occ)
    print(f"N={occ:10.1f}  d_qq={dc.d_qq:.3e}  d_pp={dc.d_pp:.3e}  slack={dc.lindblad_slack:.3e}")

# %%
# A bath with Ohmic spectral density gives a frequency-dependent occupation.
# The oscillator only samples it near its own frequency, so the effective
# occupation sits close to the Planck value.
ohmic = OhmicMatchedOccupation(mech, params.env)
print(f"effective occupation (ohmic) {effective_occupation(mech, ohmic):.3f}, Planck {n:.3f}")
print(f"flat spectrum check {effective_occupation(mech, FlatOccupation(n)):.3f}")
print(np.round(ohmic(np.array([-2, -1, 1, 2]) * mech.damped_frequency), 2))
