"""
One-count operators
===================

Apply a single detection event with different detector models and compare
the resulting photon-number distributions.
"""

# %%
import numpy as np

from ocolab import A, E, N, Beta, H, apply_jump, mean_after_jump, photon_statistics, predict_distribution
from ocolab import prepare_coherent, prepare_squeezed_vacuum, prepare_thermal

# %%
# A: the annihilation operator (weights sqrt(n)), E: the exponential-phase
# operator (weight 1), H(y): an atom with interaction parameter y, Beta(b):
# a family interpolating between A (b=0) and E (b=1/2), N: a number-conserving
# count n rho n.
rho = prepare_thermal(0.7)
for model in (A, E, H(2.0), Beta(0.25), N):
    out = apply_jump(model, rho)
    print(f"{str(model):10s} weight={out.norm:.4f}  P0,P1 = {np.round(out.state.chi[:2], 4)}")

# %%
# The closed forms agree with applying the operator to the density matrix.
out = apply_jump(A, rho)
print(np.max(np.abs(out.state.chi - predict_distribution(A, rho.chi))))

# %%
# Counting a photon with the A detector *raises* the mean of a thermal field
# (to 2<n>) and leaves a coherent field unchanged; E leaves a thermal field
# unchanged.
print(photon_statistics(rho).mean, mean_after_jump(A, photon_statistics(rho)))
coh = prepare_coherent(1.2)
print(np.max(np.abs(apply_jump(A, coh).state.chi[:-1] - coh.chi[:-1])))
print(np.max(np.abs(apply_jump(E, rho).state.chi[:-1] - rho.chi[:-1])))

# %%
# Squeezed vacuum is even more dramatic: <n> -> 3<n> + 1.
sq = prepare_squeezed_vacuum(0.8)
print(photon_statistics(sq).mean, mean_after_jump(A, photon_statistics(sq)))
