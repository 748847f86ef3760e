"""
Post-count probability sweeps
=============================

The four sweeps: coherent and thermal inputs versus chi_0, the two thermal
branches versus chi_1, and the atom model versus interaction parameter y.
"""

# %%
import math

from ocolab.figures import sweep_figure, table_report, write_csv

# %%
fig2 = sweep_figure("fig2", grid=[0.3, 0.6, 0.9])
for row in fig2.sections[0][1]:
    print(dict(zip(fig2.columns, row.round(4).tolist())))

# %%
# For the thermal field chi_0 = 1/2 +- sqrt(1/4 - chi_1): two branches.
fig3 = sweep_figure("fig3")
print([label for label, _ in fig3.sections])

# %%
# The atom detector cannot leave an n = 1 field behind when sin(y sqrt(2)) = 0,
# nor an empty one when sin(y) = 0.
fig4 = sweep_figure("fig4", points=1000)
zeros = table_report(fig4)["sections"][0]["zeros"]
print(zeros["P0_H"], [k * math.pi for k in (1, 2, 3)])
print(zeros["P1_H"])

# %%
# Tables are written as CSV with full float precision.
write_csv(fig4, "fig4.csv")

# %%
# With matplotlib installed:
#
#     import matplotlib.pyplot as plt
#     plt.plot(fig4.column("y"), fig4.column("P0_H"), fig4.column("y"), fig4.column("P1_H"))
#     plt.show()
