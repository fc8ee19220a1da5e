"""CoRR against local and random search as dimension grows (Salomon).

Every method gets the same number of true function evaluations. In low
dimension CoRR lands in the central basin. From about ten dimensions on,
uniform samples crowd into a thin shell near the boundary, the quadratic fit
turns linear along some axes and CoRR's answer moves to the sphere (error 1),
while Nelder-Mead settles on the ring just inside it (error about 0.997).
Random search and simulated annealing often reach the inner ring (about 0.5).
Takes a few minutes.
"""

import numpy as np

from corr.bench import ExperimentConfig, compare_budget, run_trial

T = 2000
TRIALS = 5
METHODS = ("corr", "corr_hybrid", "random_search", "simulated_annealing", "nelder_mead")

cfg = ExperimentConfig(experiment="compare", functions=["salomon"], t_values=[T], trials=TRIALS).validate()
print(f"budget per run: {compare_budget(cfg, T)} evaluations")
print("dim  " + "  ".join(f"{m:>20}" for m in METHODS))
for dim in (2, 5, 10, 15):
    meds = []
    for m in METHODS:
        errs = [run_trial((cfg, "salomon", dim, T, k, m)).error for k in range(TRIALS)]
        meds.append(np.median(errs))
    print(f"{dim:>3}  " + "  ".join(f"{v:>20.3e}" for v in meds))
