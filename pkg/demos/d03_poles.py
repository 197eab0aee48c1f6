"""
Hybridised modes of the driven system
=====================================

Three ways to get the damping rates and frequencies of the two modes: the
numerical roots of the characteristic quartic, the closed forms at exact
resonance, and the weak-coupling expansion.
"""

# %%
from optomech.errors import ValidityError
from optomech.optomech_linear import char_poly, effective_coupling
from optomech.params import preset_p0
from optomech.pole_analysis import (
    critical_cavity_decay,
    poles_approximate,
    poles_exact_resonant,
    poles_numeric,
)

base = preset_p0()
w = base.mech.damped_frequency
gbar = critical_cavity_decay(base)

# %%
# At resonance the closed forms match the numerical roots on both sides of
# the critical decay rate.
for factor in (0.5, 2.0):
    p = base.with_cavity_decay(factor * gbar)
    g = effective_coupling(p, w)
    num = poles_numeric(char_poly(p, w, g))
    exact = poles_exact_resonant(p, g)
    print(f"gamma_c={factor}*crit  branch={exact.branch}")
    print(f"  Gamma_m numeric {num.gamma_m:.10e}  exact {exact.gamma_m:.10e}")
    print(f"  omega   numeric {num.omega_eff:.10e}  exact {exact.omega_eff:.10e}")

# %%
# The expansion needs a broad cavity; near the critical decay it refuses.
for gc in (gbar, 3e9):
    p = base.with_cavity_decay(gc)
    g = effective_coupling(p, w / 2)
    try:
        approx = poles_approximate(p, w / 2, g)
        num = poles_numeric(char_poly(p, w / 2, g))
        print(f"gamma_c={gc:.2e}: approx {approx.gamma_m:.6e}, numeric {num.gamma_m:.6e}")
    except ValidityError as exc:
        print(f"gamma_c={gc:.2e}: {type(exc).__name__}: {exc}")
