"""
Field states in a truncated Fock space
======================================

Prepare the four families of single-mode states, look at how the
truncation is chosen, and read off their photon statistics.
"""

# %%
import numpy as np

from ocolab import StatePrep, absorption_rate, photon_statistics, prepare_thermal

# %%
# A thermal field with mean photon number 0.7.  The dimension is chosen
# automatically so that the neglected tail (weighted by (1+n)^2) is below 1e-12;
# the state is *not* renormalized, the tail is reported instead.
rho = prepare_thermal(0.7)
print(rho.dim, rho.tail_mass_bound, rho.trace)
print(np.round(rho.chi[:4], 4))

# %%
# The same preparations from the short text form used on the command line.
for spec in ["thermal:nbar=0.7", "coherent:alpha=1+0.5j", "fock:n=3", "squeezed:r=0.8"]:
    s = photon_statistics(StatePrep.parse(spec).prepare())
    print(f"{spec:24s} <n>={s.mean:.6f}  Q={s.mandel_q:+.6f}")

# %%
# Thermal light is super-Poissonian (Q = <n>), coherent light Poissonian
# (Q = 0), Fock states maximally sub-Poissonian (Q = -1) and squeezed vacuum
# strongly bunched (Q = 2<n> + 1).
# The absorption rate of an ideal broadband detector is gamma * <n>.
print(absorption_rate(prepare_thermal(0.7), gamma=1.0))
