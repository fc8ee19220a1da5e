"""Mean-constrained L1 fit of the convex quadratic surrogate.

For fixed ``mu`` the fit is ::

    min_theta  mean_{x in X1} |h(x; theta) - f(x)|
    s.t.       mean_{x in X2} h(x; theta) = mu
               theta1 >= 0,  |theta| <= box_bound

Because the constant feature averages to exactly 1 over ``X2``, the equality
fixes the offset: ``theta3 = mu - m @ beta`` with ``beta = (theta1, theta2)``
and ``m`` the mean of ``(x**2, x)`` over ``X2``. What remains is a LAD
regression of ``f - mu`` on centered features, handed to :func:`lad_solve`.
Only the right-hand side depends on ``mu``, so :class:`EnvelopeFitter`
builds the design once and reuses it across a ``mu`` search.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .lp import lad_solve
from .sampler import SampleSet
from .surrogate import QuadSurrogate, features

log = logging.getLogger(__name__)

BOX_BOUND = 1e6
LP_TOL = 1e-8
CLAMP_TOL = 1e-9
FIT_STATUSES = ("optimal", "iteration_cap", "infeasible_numeric")


@dataclass(frozen=True)
class FitProblem:
    fit_set: SampleSet
    mean_set: SampleSet
    mu: float
    box_bound: float = BOX_BOUND
    lp_tol: float = LP_TOL

    def __post_init__(self):
        if self.fit_set.dim != self.mean_set.dim:
            raise ValueError("fit_set and mean_set differ in dimension")
        if not np.isfinite(self.mu):
            raise ValueError("mu must be finite")
        if not self.box_bound > 0:
            raise ValueError("box_bound must be positive")


@dataclass(frozen=True)
class FitResult:
    theta: QuadSurrogate
    objective: float
    status: str
    constraint_residual: float
    iterations: int = 0


class EnvelopeFitter:
    """Precomputed design for repeated fits on one pair of sample sets.

    The last optimal coefficients seed the next fit (see :func:`lad_solve`),
    so a sequence of fits is deterministic given the sequence of ``mu``.
    """

    def __init__(self, fit_set, mean_set, box_bound=BOX_BOUND, lp_tol=LP_TOL):
        if fit_set.dim != mean_set.dim:
            raise ValueError("fit_set and mean_set differ in dimension")
        self.n = n = fit_set.dim
        self.box_bound = float(box_bound)
        self.lp_tol = float(lp_tol)
        self.f = np.asarray(fit_set.values, dtype=float)
        self.phi1 = features(fit_set.points)
        self.phi2 = features(mean_set.points)
        self.m = self.phi2[:, :2 * n].mean(axis=0)
        self.Z = np.asfortranarray(self.phi1[:, :2 * n] - self.m)
        q = 2 * n
        eye = np.eye(q)
        # theta1 in [0, B], theta2 in [-B, B]; two offset rows added per mu
        self._G_box = np.vstack([-eye[:n], eye, -eye[n:]])
        self._h_box = np.concatenate([np.zeros(n), np.full(q + n, self.box_bound)])
        self._G = np.vstack([self._G_box, -self.m, self.m])
        self._hint = None

    def lp_data(self, mu):
        """``(Z, y, G, h)`` of the reduced LAD problem at ``mu``."""
        B = self.box_bound
        h = np.concatenate([self._h_box, [B - mu, B + mu]])
        return self.Z, self.f - mu, self._G, h

    def fit(self, mu):
        mu = float(mu)
        if not np.isfinite(mu):
            raise ValueError("mu must be finite")
        n = self.n
        T = len(self.f)
        Z, y, G, h = self.lp_data(mu)
        sol = lad_solve(Z, y, G, h, gap_tol=0.1 * self.lp_tol * T, beta_hint=self._hint)
        if sol.status == "optimal":
            self._hint = sol.beta
        status = sol.status
        beta = sol.beta.copy()
        quad = beta[:n]
        if np.any(quad < 0):
            worst = float(quad.min())
            level = logging.DEBUG if worst >= -CLAMP_TOL else logging.WARNING
            log.log(level, "clamping theta1 entries down to %.3g to zero", worst)
            beta[:n] = np.maximum(quad, 0.0)
        beta = np.clip(beta, -self.box_bound, self.box_bound)
        theta3 = mu - self.m @ beta
        if status != "optimal" and abs(theta3) > self.box_bound * (1 + 1e-9):
            status = "infeasible_numeric"
        theta = np.concatenate([beta, [theta3]])
        objective = float(np.mean(np.abs(self.phi1 @ theta - self.f)))
        residual = float(abs(np.mean(self.phi2 @ theta) - mu))
        return FitResult(
            theta=QuadSurrogate.from_flat(theta),
            objective=objective,
            status=status,
            constraint_residual=residual,
            iterations=sol.iterations,
        )


def fit_envelope(problem):
    fitter = EnvelopeFitter(problem.fit_set, problem.mean_set, problem.box_bound, problem.lp_tol)
    return fitter.fit(problem.mu)


def write_lp(problem, path):
    """Write the full fit LP in CPLEX LP text format.

    Variables are ``t1..tp`` (surrogate parameters in feature order) and
    ``s1..sT`` (absolute residuals); the objective is scaled by ``1/T``.
    """
    phi1 = features(problem.fit_set.points)
    mbar = features(problem.mean_set.points).mean(axis=0)
    f = problem.fit_set.values
    T, p = phi1.shape
    n = problem.fit_set.dim
    B = problem.box_bound

    def lin(coefs, names):
        terms = [f"{float(c)!r} {v}" for c, v in zip(coefs, names) if c != 0]
        return " + ".join(terms).replace("+ -", "- ") if terms else "0 t1"

    tnames = [f"t{j + 1}" for j in range(p)]
    lines = ["\\ mean-constrained L1 fit of a diagonal quadratic surrogate", "Minimize"]
    lines.append(" obj: " + lin([1.0 / T] * T, [f"s{i + 1}" for i in range(T)]))
    lines.append("Subject To")
    for i in range(T):
        row = lin(phi1[i], tnames)
        lines.append(f" up{i + 1}: {row} - 1.0 s{i + 1} <= {float(f[i])!r}")
        lines.append(f" lo{i + 1}: {row} + 1.0 s{i + 1} >= {float(f[i])!r}")
    lines.append(f" mean: {lin(mbar, tnames)} = {float(problem.mu)!r}")
    lines.append("Bounds")
    for j, t in enumerate(tnames):
        lower = 0.0 if j < n else -B
        lines.append(f" {float(lower)!r} <= {t} <= {float(B)!r}")
    for i in range(T):
        lines.append(f" s{i + 1} >= 0")
    lines.append("End")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
