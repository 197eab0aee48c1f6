"""
What a detector sees
====================

Homodyne spectra of the outgoing light, including a squeezed quadrature at
zero temperature, and heterodyne spectra where the two mode peaks merge as
the cavity gets broader.
"""

# %%
import math

import numpy as np

from optomech.bath_spectrum import FlatOccupation
from optomech.detection import count_peaks, heterodyne_spectrum, homodyne_spectrum, squeezing_scan
from optomech.fluctuation_spectra import auto_grid
from optomech.optomech_linear import operating_point
from optomech.params import preset_p0
from optomech.pole_analysis import critical_cavity_decay

# %%
# Zero temperature, resonant drive, 50 uW: the -pi/4 quadrature dips below
# shot noise around zero frequency.
p = preset_p0(temperature=0.0, gamma_c=3352924.149249553).with_power(4.979070132003682e-05)
op = operating_point(p, 0.0, FlatOccupation(0.0))
w = p.mech.damped_frequency
grid = np.linspace(-0.2 * w, 0.2 * w, 9)
for theta in (-math.pi / 4, math.pi / 4):
    s = homodyne_spectrum(op, None, theta, grid).s_inel
    print(f"theta={theta:+.3f}: " + " ".join(f"{v:.3f}" for v in s))
print(f"{len(squeezing_scan(op, None, -math.pi / 4, grid))} of {len(grid)} points squeezed")

# %%
# Heterodyne at red detuning: two peaks for a narrow cavity, one for a broad one.
base = preset_p0()
gbar = critical_cavity_decay(base)
for factor in (0.1, 0.4, 2.0, 4.0):
    p = base.with_cavity_decay(factor * gbar)
    op = operating_point(p, w)
    nu = auto_grid(op, symmetric=True)
    res = heterodyne_spectrum(op, None, None, nu, offsets=True)
    window = (nu > 0) & (nu < 2 * w)
    print(f"gamma_c={factor:.1f}*crit: {count_peaks(res.sigma_inel[window])} peak(s)")
