"""Budget-limited comparison optimizers.

Every optimizer counts true function evaluations against ``budget`` and
stops as soon as it is spent. The best point ever evaluated is returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .sampler import ball_uniform, make_rng
from .surrogate import project_to_ball as project_ball

METHODS = ("random_search", "simulated_annealing", "nelder_mead", "corr_hybrid")

SA_T0 = 1.0
SA_COOLING = 0.995
SA_STEP = 0.3
NM_STEP = 0.2


@dataclass
class BaselineResult:
    method: str
    x_best: np.ndarray
    f_best: float
    eval_count: int
    trace: list = field(default_factory=list, repr=False)  # best-so-far after each evaluation


class _BudgetSpent(Exception):
    pass


class _Counter:
    """Wraps ``fn`` with an evaluation budget and best-so-far tracking."""

    def __init__(self, fn, budget):
        self.fn = fn
        self.budget = budget
        self.count = 0
        self.x_best = None
        self.f_best = np.inf
        self.trace = []

    def __call__(self, x):
        if self.count >= self.budget:
            raise _BudgetSpent
        self.count += 1
        v = self.fn(x)
        if v < self.f_best:
            self.f_best = v
            self.x_best = np.array(x, dtype=float)
        self.trace.append(self.f_best)
        return v

    def seed_best(self, x, v):
        self.x_best = np.array(x, dtype=float)
        self.f_best = float(v)


def random_search(fn, budget, seed):
    if budget < 1:
        raise ValueError("budget must be >= 1")
    ev = _Counter(fn, budget)
    rng = make_rng(seed, 10)
    pts = ball_uniform(rng, fn.dim, fn.domain_radius, budget)
    for x in pts:
        ev(x)
    return BaselineResult("random_search", ev.x_best, ev.f_best, ev.count, ev.trace)


def simulated_annealing(fn, budget, seed, t0=SA_T0, cooling=SA_COOLING, step_scale=SA_STEP):
    """Metropolis random walk with temperature ``t0 * cooling**k`` at step k.

    Proposals are Gaussian with standard deviation ``step_scale`` and are
    projected back onto the domain. With ``t0 = 0`` only non-worsening moves
    are accepted.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if not 0 < cooling < 1:
        raise ValueError("cooling must lie in (0, 1)")
    rng = make_rng(seed, 11)
    ev = _Counter(fn, budget)
    radius = fn.domain_radius
    x = ball_uniform(rng, fn.dim, radius, 1)[0]
    fx = ev(x)
    temp = float(t0)
    try:
        while True:
            y = project_ball(x + step_scale * rng.standard_normal(fn.dim), radius)
            fy = ev(y)
            delta = fy - fx
            u = rng.random()
            if delta <= 0 or (temp > 0 and u < np.exp(-delta / temp)):
                x, fx = y, fy
            temp *= cooling
    except _BudgetSpent:
        pass
    return BaselineResult("simulated_annealing", ev.x_best, ev.f_best, ev.count, ev.trace)


def nelder_mead(fn, x0, budget, step=NM_STEP, f0=None, xtol=1e-14):
    """Nelder-Mead on the ball with adaptive coefficients.

    Uses the dimension-dependent expansion/contraction/shrink coefficients
    of Gao and Han (2012); in 1-D they reduce to the classical values. Every
    trial vertex is projected onto the domain before evaluation. When the
    simplex collapses below ``xtol`` while budget remains, the search is
    restarted around the incumbent with a simplex ten times its last size.

    ``f0`` is the known value at ``x0``; when given, ``x0`` is not
    re-evaluated. With ``budget == 0`` ``x0`` is returned unchanged.
    """
    x0 = np.asarray(x0, dtype=float)
    n = len(x0)
    radius = fn.domain_radius
    if np.linalg.norm(x0) > radius * (1 + 1e-12):
        raise ValueError("x0 outside the domain")
    if budget <= 0:
        fb = fn(x0) if f0 is None else float(f0)
        return BaselineResult("nelder_mead", x0.copy(), fb, 0, [])
    ev = _Counter(fn, budget)
    if f0 is not None:
        ev.seed_best(x0, f0)
    alpha = 1.0
    gamma = 1.0 + 2.0 / n if n > 1 else 2.0
    rho = 0.75 - 1.0 / (2.0 * n) if n > 1 else 0.5
    sigma = 1.0 - 1.0 / n if n > 1 else 0.5
    proj = lambda z: project_ball(z, radius)  # noqa: E731
    try:
        if f0 is None:
            ev(x0)
        size = step
        while True:
            xb = ev.x_best
            simplex = [xb]
            values = [ev.f_best]
            for i in range(n):
                v = xb.copy()
                # step away from the boundary when the outward vertex would be clipped
                v[i] += size if xb[i] <= 0 else -size
                v = proj(v)
                simplex.append(v)
                values.append(ev(v))
            simplex = np.array(simplex)
            values = np.array(values)
            while True:
                order = np.argsort(values, kind="stable")
                simplex, values = simplex[order], values[order]
                diam = np.max(np.linalg.norm(simplex[1:] - simplex[0], axis=1))
                if diam < xtol:
                    break
                centroid = simplex[:-1].mean(axis=0)
                xr = proj(centroid + alpha * (centroid - simplex[-1]))
                fr = ev(xr)
                if fr < values[0]:
                    xe = proj(centroid + gamma * (xr - centroid))
                    fe = ev(xe)
                    if fe < fr:
                        simplex[-1], values[-1] = xe, fe
                    else:
                        simplex[-1], values[-1] = xr, fr
                    continue
                if fr < values[-2]:
                    simplex[-1], values[-1] = xr, fr
                    continue
                if fr < values[-1]:
                    xc = proj(centroid + rho * (xr - centroid))
                    fc = ev(xc)
                    if fc <= fr:
                        simplex[-1], values[-1] = xc, fc
                        continue
                else:
                    xc = proj(centroid - rho * (centroid - simplex[-1]))
                    fc = ev(xc)
                    if fc < values[-1]:
                        simplex[-1], values[-1] = xc, fc
                        continue
                for i in range(1, n + 1):
                    simplex[i] = proj(simplex[0] + sigma * (simplex[i] - simplex[0]))
                    values[i] = ev(simplex[i])
            size = max(10.0 * diam, 1e-12)
    except _BudgetSpent:
        pass
    return BaselineResult("nelder_mead", ev.x_best, ev.f_best, ev.count, ev.trace)
