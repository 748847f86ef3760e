"""
The atom detector from first principles
=======================================

Evolve atom (ground state) plus field under the resonant Jaynes-Cummings
interaction, condition on finding the atom excited, and compare with the
H(y) one-count operator.
"""

# %%
import math

import numpy as np

from ocolab import H, JCParams, apply_jump, conditioned_field_state, excitation_probability, prepare_coherent
from ocolab.jc import format_oracle_table, oracle_report
from ocolab.fock import prepare_fock, prepare_thermal

# %%
rho = prepare_coherent(0.9 + 0.4j)
y = 2.0
oracle = conditioned_field_state(y, rho)
model = apply_jump(H(y), rho)
print(np.max(np.abs(oracle.state.elements - model.state.elements)), oracle.norm, excitation_probability(y, rho))

# %%
# The unitary can also be built by a Taylor series instead of the closed form.
print(conditioned_field_state(JCParams(y, "series"), rho).norm)

# %%
# A small table: zero-weight rows are where the atom can never be excited.
rows = oracle_report(
    [("vacuum", prepare_fock(0)), ("fock:n=1", prepare_fock(1)), ("thermal", prepare_thermal(0.7))],
    [0.5, math.pi, 7.3],
)
print(format_oracle_table(rows))
