"""Minimize each benchmark in one and two dimensions with CoRR.

Each run draws two sets of T uniform samples on B(0, 2), searches the mean
level ``mu`` of a convex quadratic surrogate, and reports the value at the
surrogate's minimizer. Run with ``python demos/quickstart.py``.
"""

import numpy as np

from corr import FUNCTION_NAMES, CorrConfig, corr_optimize, make_function

T = 300

for dim in (1, 2):
    print(f"dimension {dim}, T = {T} samples per set")
    for name in FUNCTION_NAMES:
        fn = make_function(name, dim)
        res = corr_optimize(fn, CorrConfig(T=T, seed=0))
        dist = np.linalg.norm(res.x_hat - fn.x_star)
        print(
            f"  {name:>18}: error {res.f_hat - fn.f_star:.2e}  |x_hat - x*| {dist:.2e}"
            f"  mu_hat {res.mu_hat:+.3f}  evals {res.eval_count}"
        )

# The hybrid variant hands CoRR's answer to Nelder-Mead for a local finish.
fn = make_function("salomon", 3)
plain = corr_optimize(fn, CorrConfig(T=2000, seed=1))
hybrid = corr_optimize(fn, CorrConfig(T=2000, seed=1, polish=True))
print(f"salomon 3-D: CoRR {plain.f_hat:.2e}, CoRR + polish {hybrid.f_hat:.2e}")
