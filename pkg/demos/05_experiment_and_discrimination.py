"""
Telling detectors apart
=======================

Simulate the two-step experiment: a QND measurement of the photon number,
a single absorption by the detector under test, and a second QND readout.
Then rank candidate detector models by likelihood.
"""

# %%
from ocolab import A, E, H, ExperimentConfig, StatePrep, discriminate, predict_pn, run_experiment
from ocolab.fock import thermal_nbar_from_chi0

# %%
prep = StatePrep("thermal", 0.7)
report = run_experiment(ExperimentConfig(prep, A, 10**6, seed=1))
print(report.chi0_hat, report.chi1_hat)
print(report.p0_hat, "+-", report.p0_se, "vs", predict_pn(A, prep.prepare().chi, 0))

# %%
# Stop after a fixed number of absorptions and compare A, E and an atom model.
prep = StatePrep("thermal", thermal_nbar_from_chi0(0.75))
report = run_experiment(ExperimentConfig(prep, E, 10**8, seed=2, target_accepted=10**4))
result = discriminate(report, prep.prepare().chi, [A, E, H(2.0)])
print(result.ranking, result.log_likelihood_ratios, result.low_confidence)

# %%
# Same seed, same bytes.
again = run_experiment(ExperimentConfig(prep, E, 10**8, seed=2, target_accepted=10**4))
print(again.to_text() == report.to_text())
