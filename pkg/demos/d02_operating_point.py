"""
Where the driven cavity settles
===============================

Static radiation pressure shifts the cavity; the shifted detuning fixes the
coupling strength and decides whether the linearised dynamics is stable.
"""

# %%
from optomech.optomech_linear import operating_point, self_consistent_detuning, stability
from optomech.params import preset_p0
from optomech.pole_analysis import critical_cavity_decay

params = preset_p0()
w = params.mech.damped_frequency

# %%
# With the laser on the bare resonance the mirror is pushed outwards and the
# laser ends up on the blue side of the shifted cavity.
for root in self_consistent_detuning(params):
    print(f"Delta={root.detuning:.4e} rad/s primary={root.primary} stable={root.stable}")

# %%
# Red detuning by one mechanical frequency is the cooling configuration.
op = operating_point(params, w)
print(f"coupling G={op.coupling:.4e} rad/s, |cavity amplitude|^2={abs(op.cavity_amp)**2:.4e}")
print(f"stable={op.stable}, margin={op.stability.margin:.3e} ({op.stability.criterion})")

# %%
# The blue-detuned mirror image is unstable.
print(stability(params, -w, op.coupling))

# %%
# Cavity decay rate where the two resonant modes stop splitting in frequency.
print(f"critical cavity decay {critical_cavity_decay(params):.6e} rad/s")
