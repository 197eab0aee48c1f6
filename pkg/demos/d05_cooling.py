"""
Laser cooling of the mechanical mode
====================================

Energy of the driven mode split into radiation-pressure and thermal parts,
the cooling factor at the critical point, heating on resonance, and a small
cooling map.
"""

# %%
import numpy as np

from optomech.bath_spectrum import FlatOccupation
from optomech.energy_cooling import (
    cooling_map,
    energy_quadrature,
    energy_residue,
    equivalent_temperature,
    zero_detuning_energy,
)
from optomech.optomech_linear import operating_point
from optomech.params import planck_occupation, preset_p0
from optomech.pole_analysis import critical_cavity_decay, poles_exact_resonant

base = preset_p0()
w = base.mech.damped_frequency
n = planck_occupation(base.env, w)

# %%
# Red detuning at the critical cavity decay: closed forms and quadrature.
p = base.with_cavity_decay(critical_cavity_decay(base))
op = operating_point(p, w, FlatOccupation(n))
res = energy_residue(op, n, poles_exact_resonant(p, op.coupling))
num = energy_quadrature(op)
print(f"gamma_m/Gamma_m {res.rate_ratio:.4e}  Q {res.q_factor:.6f} (quadrature {num.q_factor:.6f})")
print(f"K {res.k_factor:.6e}  cooling factor {res.cooling_factor:.4e}")
print(f"occupation {res.total:.2f} quanta, down from {n:.0f}")

# %%
# On resonance the laser only heats; the heating is worth a few kelvin.
op0 = operating_point(base, 0.0, FlatOccupation(n))
z = zero_detuning_energy(op0, n)
print(f"radiation-pressure quanta {z.n_rp:.4e} = {equivalent_temperature(op0, z.n_rp):.3f} K")

# %%
# Broad-cavity map; the best point sits below the cavity width.
cmap = cooling_map(base, None, np.linspace(1e6, 3e9, 40), np.geomspace(5 * w, 50 * w, 40))
d, g, c = cmap.argmin()
print(f"min cooling factor {c:.3e} at Delta={d:.3e}, gamma_c={g:.3e}")
