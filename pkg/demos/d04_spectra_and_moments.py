"""
Position spectra and their moments
==================================

The mechanical position spectrum splits into a part driven by the thermal
bath and a part driven by optical vacuum noise. Integrating it gives the
stationary moments, which agree with a Lyapunov solution for flat baths.
"""

# %%
import numpy as np

from optomech.bath_spectrum import FlatOccupation
from optomech.fluctuation_spectra import auto_grid, lyapunov_moments, moment_integrals, spectrum_table
from optomech.optomech_linear import operating_point
from optomech.params import preset_p0

params = preset_p0(gamma_c=2e7)
w = params.mech.damped_frequency
op = operating_point(params, w, FlatOccupation(10.0))

# %%
# Sample on a grid refined around the poles and look at the peak region.
grid = auto_grid(op, n=401, symmetric=True)
table = spectrum_table(op, grid)
i = int(np.argmax(table["Sq_total"]))
print(f"peak at nu={grid[i]:.4e} rad/s; thermal share {table['Sq_th'][i] / table['Sq_total'][i]:.4f}")

# %%
# Moments by quadrature against the covariance equation.
quad = moment_integrals(op)
lyap = lyapunov_moments(op)
for name in ("q2", "p2", "qp_sym"):
    a, b = getattr(quad, name), getattr(lyap, name)
    print(f"{name:7s} quadrature {a: .10e}  lyapunov {b: .10e}")

# %%
# The table goes to CSV with its parameters in the header.
print(table.to_csv().splitlines()[1])
